#include <gtest/gtest.h>

#include <random>

#include "subalign/classical/alignment.hpp"
#include "subalign/classical/kernels.hpp"

using namespace subalign;

namespace {

Matrix gaussian(Index rows, Index cols, std::mt19937_64 &rng, double sigma = 1.0) {
    std::normal_distribution<double> g(0.0, sigma);
    Matrix m(rows, cols);
    for (Index i = 0; i < m.size(); ++i) {
        m.data()[i] = g(rng);
    }
    return m;
}

/// Dense-matrix oracle for the ry_cz_ring circuit: Kronecker products of RY
/// rotations (qubit j = bit j) and diagonal CZ layers.
Eigen::VectorXd dense_feature_state(const Vector &angles, int q) {
    const Index dim = Index{1} << q;
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(dim);
    psi(0) = 1.0;
    const Index layers = (angles.size() + q - 1) / q;
    for (Index layer = 0; layer < layers; ++layer) {
        Matrix u = Matrix::Ones(1, 1);
        for (int j = q - 1; j >= 0; --j) {
            const Index m = layer * q + j;
            const double t = m < angles.size() ? angles(m) : 0.0;
            Matrix r(2, 2);
            r << std::cos(t / 2), -std::sin(t / 2), std::sin(t / 2), std::cos(t / 2);
            Matrix next(u.rows() * 2, u.cols() * 2);
            for (Index a = 0; a < u.rows(); ++a) {
                for (Index b = 0; b < u.cols(); ++b) {
                    next.block(a * 2, b * 2, 2, 2) = u(a, b) * r;
                }
            }
            u = next;
        }
        psi = u * psi;
        std::vector<std::pair<int, int>> pairs;
        if (q == 2) {
            pairs = {{0, 1}};
        } else if (q > 2) {
            for (int j = 0; j < q; ++j) {
                pairs.emplace_back(j, (j + 1) % q);
            }
        }
        for (auto [a, b] : pairs) {
            for (Index i = 0; i < dim; ++i) {
                if (((i >> a) & 1) && ((i >> b) & 1)) {
                    psi(i) = -psi(i);
                }
            }
        }
    }
    return psi;
}

} // namespace

TEST(KernelSpec, Parsing) {
    EXPECT_EQ(parse_kernel_spec("linear", 3).kind, KernelKind::linear);
    EXPECT_EQ(parse_kernel_spec("poly:3", 3).degree, 3);
    EXPECT_EQ(parse_kernel_spec("cosine", 3).kind, KernelKind::cosine);
    EXPECT_EQ(parse_kernel_spec("hard", 5).qubit_count, 3);
    EXPECT_EQ(parse_kernel_spec("hard", 1).qubit_count, 1);
    EXPECT_THROW(parse_kernel_spec("rbf", 3), ConfigError);
    EXPECT_THROW(parse_kernel_spec("poly:0", 3), ConfigError);
    EXPECT_THROW(parse_kernel_spec("poly:x", 3), ConfigError);
    EXPECT_THROW(KernelSpec::hard(4, "zz_map"), ConfigError);
}

TEST(KernelMatrix, CosineAndPolynomialMatchDirectEvaluation) {
    std::mt19937_64 rng(1);
    const Matrix x = gaussian(4, 7, rng);
    const Matrix y = gaussian(4, 5, rng);
    const Matrix kc = kernel_matrix(x, y, KernelSpec::cosine());
    const Matrix kp = kernel_matrix(x, y, KernelSpec::polynomial(3));
    for (Index i = 0; i < 7; ++i) {
        for (Index j = 0; j < 5; ++j) {
            double c = 1.0;
            double dot = 0.0;
            for (Index m = 0; m < 4; ++m) {
                // cos(a - b) = cos a cos b + sin a sin b
                c *= std::cos(x(m, i)) * std::cos(y(m, j)) + std::sin(x(m, i)) * std::sin(y(m, j));
                dot += x(m, i) * y(m, j);
            }
            EXPECT_NEAR(kc(i, j), c, 1e-12);
            EXPECT_NEAR(kp(i, j), dot * dot * dot, 1e-12 * std::max(1.0, std::abs(dot * dot * dot)));
        }
    }
    EXPECT_TRUE((kernel_matrix(x, y, KernelSpec::polynomial(1)).array() ==
                 kernel_matrix(x, y, KernelSpec::linear()).array())
                    .all());
    EXPECT_LE((kernel_matrix(x, x, KernelSpec::cosine()).diagonal().array() - 1.0).abs().maxCoeff(), 1e-15);
    EXPECT_THROW(kernel_matrix(x, gaussian(3, 2, rng), KernelSpec::linear()), ShapeError);
}

TEST(KernelMatrix, HardKernelDiagonalIsOne) {
    std::mt19937_64 rng(2);
    for (Index dims : {1, 2, 3, 4, 5, 8}) {
        const Matrix x = gaussian(dims, 6, rng);
        const Matrix k = kernel_matrix(x, x, KernelSpec::hard(dims));
        EXPECT_LE((k.diagonal().array() - 1.0).abs().maxCoeff(), 1e-10) << dims;
        EXPECT_LE((k - k.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(KernelMatrix, HardKernelMatchesDenseCircuit) {
    std::mt19937_64 rng(3);
    for (Index dims : {2, 3, 6}) {
        const Matrix x = gaussian(dims, 4, rng);
        const KernelSpec spec = with_fitted_range(KernelSpec::hard(dims), x, x);
        const Matrix k = kernel_matrix(x, x, spec);
        const int q = spec.qubit_count;
        for (Index i = 0; i < 4; ++i) {
            for (Index j = 0; j < 4; ++j) {
                Vector ai(dims);
                Vector aj(dims);
                for (Index m = 0; m < dims; ++m) {
                    const double w = spec.range_hi(m) - spec.range_lo(m);
                    ai(m) = kPi * (x(m, i) - spec.range_lo(m)) / w;
                    aj(m) = kPi * (x(m, j) - spec.range_lo(m)) / w;
                }
                EXPECT_NEAR(k(i, j), dense_feature_state(ai, q).dot(dense_feature_state(aj, q)), 1e-12);
            }
        }
    }
}

TEST(KernelPca, WeightsAreOrthonormalInFeatureSpace) {
    std::mt19937_64 rng(4);
    const Matrix x = gaussian(3, 6, rng);
    const Matrix k = kernel_matrix(x, x, KernelSpec::cosine());
    const KernelPcaWeights w = kernel_pca_weights(k, 3);
    const Matrix kc = center_kernel(k);
    EXPECT_LE((w.W.transpose() * kc * w.W - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE((w.W.transpose() * k * w.W - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(KernelPca, IdentityGramIsDegenerateOrRankDeficient) {
    const KernelPcaWeights w = kernel_pca_weights(Matrix::Identity(6, 6), 2);
    EXPECT_FALSE(w.warnings.empty());
    EXPECT_THROW(kernel_pca_weights(Matrix::Identity(6, 6), 6), RankDeficiencyError);
}

TEST(KernelPca, RejectsNonSymmetricAndIndefinite) {
    Matrix k = Matrix::Identity(3, 3);
    k(0, 1) = 0.5;
    EXPECT_THROW(kernel_pca_weights(k, 1), ValidationError);
    Matrix ind = Matrix::Zero(3, 3);
    ind(0, 0) = 1.0;
    ind(1, 1) = -1.0;
    EXPECT_THROW(kernel_pca_weights(ind, 1), ValidationError);
}

TEST(KernelPca, LinearKernelReproducesPcaProjections) {
    std::mt19937_64 rng(5);
    const Matrix x = center_matrix(gaussian(4, 10, rng));
    const KernelPcaWeights w = kernel_pca_weights(kernel_matrix(x, x, KernelSpec::linear()), 2);
    const Matrix kproj = w.W.transpose() * center_kernel(x.transpose() * x);
    const Matrix pproj = pca_subspace(x, 2).P.transpose() * x;
    for (Index k = 0; k < 2; ++k) {
        const double s = kproj.row(k).dot(pproj.row(k)) >= 0.0 ? 1.0 : -1.0;
        EXPECT_LE((s * kproj.row(k) - pproj.row(k)).cwiseAbs().maxCoeff(), 1e-8);
    }
}

TEST(KernelAlignment, LinearReducesToPlainAlignment) {
    std::mt19937_64 rng(6);
    const Domain s(gaussian(4, 12, rng));
    const Domain t(gaussian(4, 10, rng, 2.0));
    const KernelSaResult kr = kernel_sa(s, t, 2, KernelSpec::linear());
    const SaPipeline sa = subspace_alignment(s, t, 2);
    // Column signs are fixed per space, so compare up to a diagonal +-1 on each side.
    const Matrix ks = kr.ws.W.transpose() * kr.K_ss;
    const Matrix kt = kr.wt.W.transpose() * kr.K_tt;
    const Matrix ps = sa.ps.P.transpose() * sa.xs;
    const Matrix pt = sa.pt.P.transpose() * sa.xt;
    Matrix ss = Matrix::Zero(2, 2);
    Matrix st = Matrix::Zero(2, 2);
    for (Index k = 0; k < 2; ++k) {
        ss(k, k) = ks.row(k).dot(ps.row(k)) >= 0 ? 1 : -1;
        st(k, k) = kt.row(k).dot(pt.row(k)) >= 0 ? 1 : -1;
    }
    EXPECT_LE((ss * kr.M * st - sa.artifacts.M_star).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE((st * kr.X_hat_t_phi - sa.artifacts.X_hat_t).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE((st * kr.X_hat_a_phi - sa.artifacts.X_hat_a).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(KernelAlignment, SelfAlignmentIsIdentity) {
    std::mt19937_64 rng(7);
    const Matrix x = gaussian(3, 8, rng);
    const Matrix k = center_kernel(kernel_matrix(x, x, KernelSpec::cosine()));
    const KernelPcaWeights w = kernel_pca_weights(k, 3);
    EXPECT_LE((kernel_alignment(w.W, k, w.W) - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_THROW(kernel_alignment(w.W, k.leftCols(5), w.W), ShapeError);
}

TEST(KernelAlignment, CosineObjectiveIsMinimalAtOptimum) {
    std::mt19937_64 rng(8);
    const Domain s(gaussian(3, 8, rng));
    const Domain t(gaussian(3, 8, rng, 1.5));
    const KernelSaResult r = kernel_sa(s, t, 2, KernelSpec::cosine());
    const double best = r.objective();
    for (int k = 0; k < 100; ++k) {
        const Matrix m = r.M + 0.01 * gaussian(2, 2, rng);
        EXPECT_GE(kernel_objective(r.ws.W, r.K_ss, r.K_st, r.K_tt, r.wt.W, m), best - 1e-12);
    }
}

TEST(KernelSa, LinearPredictionsEqualPlainSa) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SynthSpec spec;
        spec.D = 2 + static_cast<int>(seed % 5);
        spec.n_s = 20 + static_cast<int>(seed % 31);
        spec.n_t = 50 - static_cast<int>(seed % 17);
        spec.class_count = 2 + static_cast<int>(seed % 3);
        spec.domain_shift.rotation_angle = 0.3 * static_cast<double>(seed % 7);
        spec.seed = seed;
        const auto [s, t] = synth_shifted_gaussians(spec);
        const Index d = 1 + static_cast<Index>(seed % 2);
        EXPECT_EQ(kernel_sa_nn_predict(s, t, d, KernelSpec::linear()), sa_nn_predict(s, t, d)) << seed;
    }
}

TEST(KernelSa, SimilarityThroughGramMatrices) {
    std::mt19937_64 rng(9);
    const Domain s(gaussian(3, 9, rng));
    const Domain t(gaussian(3, 7, rng));
    const KernelSaResult r = kernel_sa(s, t, 2, KernelSpec::linear());
    const SaPipeline sa = subspace_alignment(s, t, 2);
    const Matrix expect = sa.xs.transpose() * sa.artifacts.A * sa.xt;
    EXPECT_LE((r.similarity() - expect).cwiseAbs().maxCoeff(), 1e-8);
}
