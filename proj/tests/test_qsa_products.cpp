#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "subalign/classical/alignment.hpp"
#include "subalign/classical/pca.hpp"
#include "subalign/qsa/matrix_product.hpp"
#include "subalign/qsa/qpca.hpp"

using namespace subalign;
using namespace subalign::qsa;

namespace {

Matrix gaussian(Index rows, Index cols, std::mt19937_64 &rng, double sigma = 1.0) {
    std::normal_distribution<double> g(0.0, sigma);
    Matrix m(rows, cols);
    for (Index i = 0; i < m.size(); ++i) {
        m.data()[i] = g(rng);
    }
    return m;
}

Matrix orthonormal(Index rows, Index cols, std::mt19937_64 &rng) {
    Eigen::HouseholderQR<Matrix> qr(gaussian(rows, rows, rng));
    return Matrix(qr.householderQ()).leftCols(cols);
}

Matrix centered(const Matrix &x) { return x.colwise() - x.rowwise().mean(); }

/// Distinct spread per feature so the covariance spectrum is well separated.
Matrix anisotropic(Index dims, Index n, std::mt19937_64 &rng) {
    Matrix x = gaussian(dims, n, rng);
    for (Index m = 0; m < dims; ++m) {
        x.row(m) *= 3.0 / static_cast<double>(m + 1);
    }
    return centered(orthonormal(dims, dims, rng) * x);
}

} // namespace

TEST(Qpca, RecoversClassicalSubspaceAtHighPrecision) {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 5; ++rep) {
        const Matrix x = anisotropic(4, 12, rng);
        const auto classical = pca_subspace(x, 2);
        QpcaOptions opt;
        opt.precision_qubits = 8;
        const auto q = qpca(x, 2, opt);
        EXPECT_LE(projector_distance(q.basis.P, classical.P), 0.05) << "rep " << rep;
        for (Index k = 0; k < 2; ++k) {
            EXPECT_GE(q.sampled_eigenphases(k), 0.0);
            EXPECT_LT(q.sampled_eigenphases(k), 1.0);
            // Eigenvalue read from a 2^-8 phase lattice.
            const double step = 2.0 * kPi / 256.0 / q.t0 * x.squaredNorm();
            EXPECT_LE(std::abs(q.eigenvalue_estimates(k) - classical.eigenvalues(k)), step) << k;
        }
        EXPECT_EQ(q.copies_used, 64LL * 255);
    }
}

TEST(Qpca, PhasesStrictlyBelowHalf) {
    std::mt19937_64 rng(9);
    // Rank one: the single eigenvalue of rho is 1 and sits on the top lattice point.
    Vector u = gaussian(3, 1, rng).col(0);
    Matrix x = u * Vector::LinSpaced(6, -2.5, 2.5).transpose();
    const auto q = qpca(x, 1, QpcaOptions{6, 16, {}});
    EXPECT_NEAR(q.sampled_eigenphases(0), 0.5 - 1.0 / 64.0, 1e-12);
    EXPECT_LE(projector_distance(q.basis.P, u.normalized()), 1e-9);
}

TEST(Qpca, OrthogonalDesignWarnsDegenerate) {
    Matrix x(2, 4);
    x << 1, -1, 0, 0, 0, 0, 1, -1;
    const auto q = qpca(x, 2, QpcaOptions{6, 8, {}});
    EXPECT_FALSE(q.warnings.empty());
    EXPECT_NEAR(q.eigenvalue_estimates(0), q.eigenvalue_estimates(1), 1e-12);
    EXPECT_LE((q.basis.P.transpose() * q.basis.P - Matrix::Identity(2, 2)).norm(), 1e-9);
}

TEST(Qpca, CloseEigenvaluesNeedPrecision) {
    std::mt19937_64 rng(2);
    Matrix x = gaussian(3, 40, rng);
    x.row(0) *= 2.0;
    x.row(1) *= 1.97;
    x.row(2) *= 0.3;
    x = centered(x);
    EXPECT_THROW(qpca(x, 1, QpcaOptions{3, 8, {}}), PrecisionError);
    // Both close directions inside the cut: the span is resolved regardless.
    EXPECT_LE(projector_distance(qpca(x, 2, QpcaOptions{3, 8, {}}).basis.P, pca_subspace(x, 2).P), 1e-6);
    const auto q = qpca(x, 1, QpcaOptions{10, 8, {}});
    EXPECT_LE(projector_distance(q.basis.P, pca_subspace(x, 1).P), 1e-6);
}

TEST(Qpca, RejectsBadArguments) {
    std::mt19937_64 rng(1);
    const Matrix x = gaussian(3, 5, rng);
    EXPECT_THROW(qpca(x, 4), ConfigError);
    EXPECT_THROW(qpca(x, 0), ConfigError);
    EXPECT_THROW(qpca(gaussian(17, 5, rng), 1), CapError);
    EXPECT_THROW(qpca(x, 1, QpcaOptions{0, 8, {}}), ConfigError);
    EXPECT_THROW(qpca(x, 1, QpcaOptions{4, 0, {}}), ConfigError);
}

TEST(Qpca, CopyErrorShrinksWithCopies) {
    std::mt19937_64 rng(4);
    const Matrix x = anisotropic(4, 10, rng);
    const auto few = qpca(x, 1, QpcaOptions{4, 8, {}});
    const auto many = qpca(x, 1, QpcaOptions{4, 128, {}});
    EXPECT_LT(many.lmr_error, few.lmr_error);
    EXPECT_LE(many.lmr_error, 2.0 * many.lmr_constant * many.t0 * many.t0 / 128.0 + 1e-12);
}

TEST(Qpca, SampledModeFindsSameBasis) {
    std::mt19937_64 rng(8);
    const Matrix x = anisotropic(4, 12, rng);
    const auto exact = qpca(x, 2, QpcaOptions{8, 16, {}});
    const auto sampled = qpca(x, 2, QpcaOptions{8, 16, quantum::ShotPlan::sampled(2000, 3)});
    EXPECT_LE(projector_distance(exact.basis.P, sampled.basis.P), 1e-9);
}

TEST(OverlapAngle, IdentitiesHold) {
    std::mt19937_64 rng(12);
    for (int rep = 0; rep < 50; ++rep) {
        const Vector u = gaussian(4, 1, rng).col(0).normalized();
        const Vector v = gaussian(4, 1, rng).col(0).normalized();
        const double th = overlap_angle(u, v);
        EXPECT_NEAR(std::sin(th) * std::sin(th) - std::cos(th) * std::cos(th), u.dot(v), 1e-12);
        const CMatrix g = overlap_grover_operator(u, v);
        EXPECT_TRUE(quantum::is_unitary(g));
        // The probe state lies in the e^{+-2i theta} eigenspaces of G.
        const CVector phi = overlap_probe_state(u, v);
        const CVector gphi = g * phi;
        const CVector g2phi = g * gphi;
        const CVector lhs = g2phi - 2.0 * std::cos(2.0 * th) * gphi + phi;
        EXPECT_LE(lhs.norm(), 1e-10);
    }
}

TEST(MatrixProduct, ExactThetaReproducesProduct) {
    std::mt19937_64 rng(21);
    for (int rep = 0; rep < 10; ++rep) {
        const Index dims = 2 + rep % 4;
        const Index a = 1 + rep % 3;
        const Index b = 1 + (rep * 7) % 5;
        const Matrix p = gaussian(dims, a, rng);
        const Matrix q = gaussian(dims, b, rng);
        const auto st = matrix_product_state(p, q);
        const Matrix oracle = p.transpose() * q;
        EXPECT_LE((st.matrix() - oracle).cwiseAbs().maxCoeff(), 1e-9) << "rep " << rep;
        EXPECT_LE(st.garbage_weight, 1e-12);
        EXPECT_NEAR(st.scale, p.norm() * q.norm(), 1e-12);
        // Success probability equals ||P^T Q||_F^2 / (||P|| ||Q||)^2.
        EXPECT_NEAR(st.success_probability, oracle.squaredNorm() / (st.scale * st.scale), 1e-10);
    }
}

TEST(MatrixProduct, SubspaceProductOrthonormal) {
    std::mt19937_64 rng(3);
    const Matrix ps = orthonormal(4, 2, rng);
    const Matrix pt = orthonormal(4, 2, rng);
    const auto st = matrix_product_state(ps, pt);
    EXPECT_LE((st.matrix() - alignment_matrix(ps, pt)).cwiseAbs().maxCoeff(), 1e-9);
    const auto self = matrix_product_state(ps, ps);
    EXPECT_LE((self.matrix() - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(MatrixProduct, FinitePrecisionWithinTolerance) {
    std::mt19937_64 rng(17);
    const Matrix ps = orthonormal(4, 2, rng);
    const Matrix pt = orthonormal(4, 2, rng);
    const auto st = matrix_product_state(ps, pt, MatrixProductOptions{8, false});
    const double err = (st.matrix() - ps.transpose() * pt).cwiseAbs().maxCoeff();
    EXPECT_LE(err, 0.02);
    EXPECT_LE(err, st.amplitude_error_bound + 1e-12);
    const auto coarse = matrix_product_state(ps, pt, MatrixProductOptions{3, false});
    EXPECT_GT((coarse.matrix() - ps.transpose() * pt).cwiseAbs().maxCoeff(), err);
}

TEST(MatrixProduct, AntiparallelAndZeroColumns) {
    Matrix p(2, 2);
    p << 1, 0, 0, 0;
    Matrix q(2, 2);
    q << -2, 0, 0, 3;
    const auto st = matrix_product_state(p, q);
    Matrix oracle(2, 2);
    oracle << -2, 0, 0, 0;
    EXPECT_LE((st.matrix() - oracle).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(MatrixProduct, OrthogonalOperandsAreDegenerate) {
    Matrix p(2, 1);
    p << 1, 0;
    Matrix q(2, 1);
    q << 0, 1;
    EXPECT_THROW(matrix_product_state(p, q), PostselectionError);
}

TEST(MatrixProduct, ShapeMismatch) {
    EXPECT_THROW(matrix_product_state(Matrix::Ones(3, 2), Matrix::Ones(2, 2)), ShapeError);
    EXPECT_THROW(matrix_product_state(Matrix::Zero(2, 2), Matrix::Ones(2, 2)), EncodingError);
}
