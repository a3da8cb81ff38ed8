#include <gtest/gtest.h>

#include <random>

#include "subalign/classical/alignment.hpp"
#include "subalign/classical/pca.hpp"
#include "subalign/classical/svm.hpp"

using namespace subalign;

namespace {

Matrix gaussian(Index rows, Index cols, std::mt19937_64 &rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix m(rows, cols);
    for (Index i = 0; i < m.size(); ++i) {
        m.data()[i] = g(rng);
    }
    return m;
}

Matrix random_orthonormal(Index rows, Index cols, std::mt19937_64 &rng) {
    Eigen::HouseholderQR<Matrix> qr(gaussian(rows, rows, rng));
    return Matrix(qr.householderQ()).leftCols(cols);
}

} // namespace

TEST(Pca, SingleDirection) {
    Matrix x = Matrix::Zero(3, 4);
    x.row(0) << -1.5, -0.5, 0.5, 1.5;
    const SubspaceBasis b = pca_subspace(x, 1);
    EXPECT_LE((b.P - Vector::Unit(3, 0)).norm(), 1e-12);
}

TEST(Pca, FullRankIsOrthogonal) {
    std::mt19937_64 rng(1);
    const Matrix x = center_matrix(gaussian(4, 30, rng));
    const SubspaceBasis b = pca_subspace(x, 4);
    EXPECT_LE((b.P * b.P.transpose() - Matrix::Identity(4, 4)).norm(), 1e-10);
}

TEST(Pca, MatchesDenseEigensolver) {
    std::mt19937_64 rng(2);
    const Matrix x = center_matrix(gaussian(4, 50, rng));
    const SubspaceBasis b = pca_subspace(x, 2);
    // Oracle: generic (non-symmetric) eigensolver on X X^T.
    Eigen::EigenSolver<Matrix> es(x * x.transpose());
    std::vector<std::pair<double, Vector>> pairs;
    for (Index k = 0; k < 4; ++k) {
        pairs.emplace_back(es.eigenvalues()(k).real(), es.eigenvectors().col(k).real().normalized());
    }
    std::sort(pairs.begin(), pairs.end(), [](auto &a, auto &c) { return a.first > c.first; });
    for (Index k = 0; k < 2; ++k) {
        EXPECT_NEAR(b.eigenvalues(k), pairs[static_cast<std::size_t>(k)].first, 1e-10);
        EXPECT_NEAR(std::abs(b.P.col(k).dot(pairs[static_cast<std::size_t>(k)].second)), 1.0, 1e-10);
    }
    EXPECT_LE((b.P.transpose() * b.P - Matrix::Identity(2, 2)).norm(), 1e-10);
}

TEST(Pca, SignConvention) {
    std::mt19937_64 rng(5);
    const Matrix x = center_matrix(gaussian(5, 20, rng));
    const SubspaceBasis b = pca_subspace(x, 3);
    for (Index k = 0; k < 3; ++k) {
        Index arg = 0;
        b.P.col(k).cwiseAbs().maxCoeff(&arg);
        EXPECT_GT(b.P(arg, k), 0.0);
    }
}

TEST(Pca, SignTieGoesToLowestIndex) {
    Matrix m(2, 1);
    m << -std::sqrt(0.5), std::sqrt(0.5);
    fix_column_signs(m);
    EXPECT_GT(m(0, 0), 0.0);
}

TEST(Pca, RangeAndDegeneracy) {
    std::mt19937_64 rng(3);
    const Matrix x = center_matrix(gaussian(3, 10, rng));
    EXPECT_THROW(pca_subspace(x, 0), ConfigError);
    EXPECT_THROW(pca_subspace(x, 4), ConfigError);
    Matrix iso(2, 4);
    iso << 1, -1, 0, 0, 0, 0, 1, -1;
    EXPECT_TRUE(pca_subspace(iso, 1).degenerate());
    EXPECT_FALSE(pca_subspace(x, 2).degenerate());
    const SubspaceBasis b = pca_subspace(x, 3);
    for (Index k = 0; k < 3; ++k) {
        EXPECT_GE(b.eigenvalues(k), -1e-12);
        if (k > 0) {
            EXPECT_LE(b.eigenvalues(k), b.eigenvalues(k - 1));
        }
    }
}

TEST(Alignment, IdentityAndCoordinateCases) {
    Matrix ps(3, 2);
    ps << 1, 0, 0, 1, 0, 0;
    Matrix pt(3, 2);
    pt << 0, 0, 1, 0, 0, 1;
    Matrix expected(2, 2);
    expected << 0, 0, 1, 0;
    EXPECT_EQ(alignment_matrix(ps, pt), expected);
    EXPECT_LE((alignment_matrix(ps, ps) - Matrix::Identity(2, 2)).norm(), 1e-15);
    Matrix a(2, 1);
    a << std::cos(kPi / 3), std::sin(kPi / 3);
    Matrix b(2, 1);
    b << 1, 0;
    EXPECT_NEAR(alignment_matrix(a, b)(0, 0), 0.5, 1e-15);
    EXPECT_THROW(alignment_matrix(ps, b), ShapeError);
    EXPECT_THROW(alignment_matrix(ps, pt.leftCols(1)), ShapeError);
}

TEST(Alignment, BuildIdentityBasis) {
    std::mt19937_64 rng(4);
    const Matrix xs = gaussian(3, 6, rng);
    const Matrix xt = gaussian(3, 5, rng);
    const Matrix i3 = Matrix::Identity(3, 3);
    const AlignmentArtifacts art = build_alignment(i3, i3, xs, xt);
    EXPECT_LE((art.A - i3).norm(), 1e-15);
    EXPECT_LE((art.X_hat_a - xs).norm(), 1e-15);
    EXPECT_LE((art.X_hat_t - xt).norm(), 1e-15);
}

TEST(Alignment, SelfAlignment) {
    std::mt19937_64 rng(6);
    const Matrix x = center_matrix(gaussian(4, 10, rng));
    const Domain d(x);
    const SaPipeline sa = subspace_alignment(d, d, 2);
    EXPECT_LE((sa.artifacts.X_hat_a - sa.artifacts.X_hat_t).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Alignment, MatchesProjectorProducts) {
    std::mt19937_64 rng(7);
    const Matrix xs = center_matrix(gaussian(3, 12, rng));
    const Matrix xt = center_matrix(gaussian(3, 12, rng));
    const Matrix ps = pca_subspace(xs, 2).P;
    const Matrix pt = pca_subspace(xt, 2).P;
    const AlignmentArtifacts art = build_alignment(ps, pt, xs, xt);
    Matrix oracle = Matrix::Zero(3, 3);
    const Matrix pps = ps * ps.transpose();
    const Matrix ppt = pt * pt.transpose();
    for (Index i = 0; i < 3; ++i) {
        for (Index j = 0; j < 3; ++j) {
            for (Index k = 0; k < 3; ++k) {
                oracle(i, j) += pps(i, k) * ppt(k, j);
            }
        }
    }
    EXPECT_LE((art.A - oracle).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((art.M_star - ps.transpose() * pt).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE(art.M_star.jacobiSvd().singularValues()(0), 1.0 + 1e-10);
}

TEST(Alignment, ArgminOptimality) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix ps = random_orthonormal(6, 2, rng);
        const Matrix pt = random_orthonormal(6, 2, rng);
        const Matrix m = alignment_matrix(ps, pt);
        const double best = (ps * m - pt).norm();
        for (int k = 0; k < 100; ++k) {
            Matrix delta = gaussian(2, 2, rng);
            delta /= delta.norm();
            EXPECT_GE((ps * (m + 1e-3 * delta) - pt).norm(), best);
        }
    }
}

TEST(Alignment, RotationInvariantA) {
    std::mt19937_64 rng(9);
    const Matrix ps = random_orthonormal(5, 3, rng);
    const Matrix pt = random_orthonormal(5, 3, rng);
    const Matrix a = ps * alignment_matrix(ps, pt) * pt.transpose();
    for (int k = 0; k < 20; ++k) {
        const Matrix rs = random_orthonormal(3, 3, rng);
        const Matrix rt = random_orthonormal(3, 3, rng);
        const Matrix ps2 = ps * rs;
        const Matrix pt2 = pt * rt;
        const Matrix a2 = ps2 * alignment_matrix(ps2, pt2) * pt2.transpose();
        EXPECT_LE((a - a2).norm(), 1e-10);
    }
}

TEST(Alignment, SameSpanGivesProjector) {
    std::mt19937_64 rng(10);
    const Matrix ps = random_orthonormal(5, 2, rng);
    const Matrix pt = ps * random_orthonormal(2, 2, rng);
    const Matrix a = ps * alignment_matrix(ps, pt) * pt.transpose();
    EXPECT_LE((a * a - a).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((a - a.transpose()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Similarity, Cases) {
    std::mt19937_64 rng(11);
    const Vector xs = gaussian(4, 1, rng);
    const Vector xt = gaussian(4, 1, rng);
    EXPECT_NEAR(similarity(xs, xt, Matrix::Identity(4, 4)), xs.dot(xt), 1e-14);
    const Matrix ps = random_orthonormal(4, 2, rng);
    const Matrix pt = random_orthonormal(4, 2, rng);
    const Matrix m = alignment_matrix(ps, pt);
    const Matrix a = ps * m * pt.transpose();
    const double factored = (ps.transpose() * xs).dot(m * (pt.transpose() * xt));
    EXPECT_NEAR(similarity(xs, xt, a), factored, 1e-12);
    const Matrix full = random_orthonormal(4, 4, rng);
    const Matrix p2 = full.leftCols(2);
    const Vector perp = full.col(3);
    EXPECT_NEAR(similarity(perp, xt, p2 * alignment_matrix(p2, pt) * pt.transpose()), 0.0, 1e-14);
    EXPECT_THROW(similarity(xs, gaussian(3, 1, rng), a), ShapeError);
}

TEST(NearestNeighbour, TiesAndExactHits) {
    Matrix train(1, 3);
    train << -1, 1, 5;
    Matrix q(1, 2);
    q << 0, 5;
    EXPECT_EQ(nn_classify(train, {7, 8, 9}, q), (std::vector<int>{7, 9}));
}

TEST(NearestNeighbour, MatchesBruteForce) {
    std::mt19937_64 rng(12);
    const Matrix train = gaussian(3, 40, rng);
    const Matrix q = gaussian(3, 40, rng);
    std::vector<int> labels(40);
    for (int i = 0; i < 40; ++i) {
        labels[static_cast<std::size_t>(i)] = i;
    }
    const auto got = nn_classify(train, labels, q);
    for (Index j = 0; j < 40; ++j) {
        int best = -1;
        double bd = 1e300;
        for (Index i = 0; i < 40; ++i) {
            double d = 0.0;
            for (Index m = 0; m < 3; ++m) {
                d += (train(m, i) - q(m, j)) * (train(m, i) - q(m, j));
            }
            if (d < bd) {
                bd = d;
                best = static_cast<int>(i);
            }
        }
        EXPECT_EQ(got[static_cast<std::size_t>(j)], best);
    }
}

TEST(Svm, TwoPointHandSolve) {
    Matrix xs(2, 2);
    xs << 1, 0, 0, 1;
    const SvmModel model = svm_train(xs, {1, -1}, Matrix::Identity(2, 2), 1.0);
    // F = [[0,1,1],[1,2,0],[1,0,2]]; (b, a1, a2) = (0, 1/2, -1/2) by hand.
    EXPECT_NEAR(model.b, 0.0, 1e-14);
    EXPECT_NEAR(model.alpha(0), 0.5, 1e-14);
    EXPECT_NEAR(model.alpha(1), -0.5, 1e-14);
}

TEST(Svm, AllPositiveLabelsClassifyPositive) {
    std::mt19937_64 rng(13);
    const Matrix xs = gaussian(3, 6, rng);
    const SvmModel model = svm_train(xs, std::vector<int>(6, 1), Matrix::Identity(3, 3), 1.0);
    for (Index i = 0; i < 6; ++i) {
        EXPECT_EQ(svm_classify(model, xs.col(i)), 1);
    }
}

TEST(Svm, SolvesSystemAndDecomposes) {
    std::mt19937_64 rng(14);
    const Matrix xs = gaussian(3, 8, rng);
    const Matrix ps = random_orthonormal(3, 2, rng);
    const Matrix pt = random_orthonormal(3, 2, rng);
    const Matrix a = ps * alignment_matrix(ps, pt) * pt.transpose();
    std::vector<int> y{1, -1, 1, 1, -1, -1, 1, -1};
    const SvmModel model = svm_train(xs, y, a, 2.0);
    const Matrix f = model.F();
    Vector sol(9);
    sol << model.b, model.alpha;
    Vector rhs = Vector::Zero(9);
    for (int i = 0; i < 8; ++i) {
        rhs(i + 1) = y[static_cast<std::size_t>(i)];
    }
    const double finf = f.cwiseAbs().rowwise().sum().maxCoeff();
    EXPECT_LE((f * sol - rhs).cwiseAbs().maxCoeff(), 1e-8 * finf);
    EXPECT_TRUE(((model.J() + model.K_gamma()).array() == f.array()).all());
}

TEST(Svm, OrthogonalQueryGivesBias) {
    std::mt19937_64 rng(15);
    const Matrix full = random_orthonormal(3, 3, rng);
    const Matrix ps = full.leftCols(2);
    const Matrix pt = full.leftCols(2);
    const Matrix a = ps * alignment_matrix(ps, pt) * pt.transpose();
    const Matrix xs = gaussian(3, 4, rng);
    const SvmModel model = svm_train(xs, {1, 1, -1, 1}, a, 1.0);
    EXPECT_NEAR(model.decision(full.col(2)), model.b, 1e-12);
    EXPECT_EQ(svm_classify(model, full.col(2)), sign_label(model.b));
}

TEST(Svm, Errors) {
    Matrix xs = Matrix::Identity(2, 2);
    EXPECT_THROW(svm_train(xs, {1, -1}, Matrix::Identity(2, 2), 0.0), ConfigError);
    EXPECT_THROW(svm_train(xs, {1, 2}, Matrix::Identity(2, 2), 1.0), ConfigError);
    // Duplicate points with no regularizer make F singular.
    Matrix dup(2, 2);
    dup << 1, 1, 0, 0;
    EXPECT_THROW(svm_train(dup, {1, -1}, Matrix::Identity(2, 2), std::numeric_limits<double>::infinity()),
                 IllConditionedError);
    EXPECT_EQ(sign_label(0.0), 1);
}

TEST(Svm, JsonRoundTrip) {
    std::mt19937_64 rng(16);
    const Matrix xs = gaussian(2, 3, rng);
    const SvmModel model = svm_train(xs, {1, -1, 1}, Matrix::Identity(2, 2), std::numeric_limits<double>::infinity());
    const SvmModel back = svm_model_from_json(nlohmann::json::parse(to_json(model).dump()));
    EXPECT_TRUE(std::isinf(back.gamma));
    EXPECT_DOUBLE_EQ(back.b, model.b);
    EXPECT_EQ(back.alpha, model.alpha);
    EXPECT_EQ(back.support, model.support);
}
