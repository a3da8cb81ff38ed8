#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "subalign/classical/pca.hpp"
#include "subalign/datasets.hpp"
#include "subalign/linalg.hpp"
#include "subalign/quantum/density.hpp"
#include "subalign/quantum/ops.hpp"
#include "subalign/quantum/phase_estimation.hpp"
#include "subalign/quantum/sampling.hpp"
#include "subalign/quantum/state.hpp"

namespace subalign::qsa {

inline constexpr Index kMaxQpcaDim = 16;

struct QpcaOptions {
    int precision_qubits = 8;
    int copies = 64; ///< density-exponentiation slices per unit of evolution time
    quantum::ShotPlan plan = quantum::ShotPlan::exact();
};

struct QpcaResult {
    SubspaceBasis basis;
    Vector sampled_eigenphases; ///< mode phase per returned component, in [0, 1)
    Vector eigenvalue_estimates; ///< of X X^T, from lambda = 2 pi phase / t0 * ||X||_F^2
    int precision_qubits = 0;
    long long copies_used = 0;
    double t0 = 0.0;
    double lmr_error = 0.0;          ///< trace distance of one copy-based e^{i rho t0} vs exact
    double lmr_constant = 0.0;       ///< measured C in error <= C t0^2 / l
    Vector phase_distribution;       ///< exact outcome distribution of the phase register
    std::vector<std::string> warnings;
};

namespace detail {

struct PhaseCluster {
    Matrix projector;             ///< onto the dominant eigenspace of the conditional state
    Matrix vectors;               ///< orthonormal basis of that eigenspace (D_pad x m)
    std::uint64_t mode_bin = 0;
    double mode_weight = -1.0;
    double weight = 0.0;
};

/// Eigenspace of the largest eigenvalue of a real symmetric matrix, with
/// eigenvalues within a relative 1e-6 of the top treated as one space.
inline Matrix dominant_eigenspace(const Matrix &rho) {
    const SymmetricEigen eig = symmetric_eigen_descending(rho);
    Index m = 1;
    while (m < eig.values.size() && eig.values(m) >= eig.values(0) * (1.0 - 1e-6)) {
        ++m;
    }
    return eig.vectors.leftCols(m);
}

} // namespace detail

/// Quantum PCA of column samples X (D x n, centered by the caller).
///
/// Amplitude-encodes X over an index register I and data register M, so that
/// the M marginal is rho = X X^T / ||X||_F^2. Phase estimation of e^{i rho t0}
/// (t0 placing the largest possible eigenphase just below 1/2) is run on the
/// purified state; every phase bin's conditional M state is diagonal in the
/// eigenbasis of rho, so its dominant eigenvector is read off per bin. Bins are
/// grouped by dominant projector, each group's phase is its most likely bin,
/// and the d groups with the largest phases form the basis.
inline QpcaResult qpca(const Matrix &x, Index d, const QpcaOptions &options = {}) {
    using namespace quantum;
    const Index dims = x.rows();
    if (dims > kMaxQpcaDim) {
        throw CapError("qpca: D = " + std::to_string(dims) + " exceeds the density-operator budget of " +
                       std::to_string(kMaxQpcaDim) + "; reduce D");
    }
    if (d < 1 || d > dims) {
        throw ConfigError("qpca: d = " + std::to_string(d) + " outside 1.." + std::to_string(dims));
    }
    const int n = options.precision_qubits;
    check_precision(n);
    if (options.copies < 1) {
        throw ConfigError("qpca: copies must be >= 1");
    }
    options.plan.validate();

    const QuantumState psi = encode_matrix(x, "I", "M");
    const double frob2 = psi.global_scale() * psi.global_scale();
    const DensityOperator rho = partial_trace(psi, "I");
    const double purity = rho.purity();
    const double big_n = std::ldexp(1.0, n);
    const double t0 = 2.0 * kPi * (0.5 - 1.0 / big_n) / std::sqrt(purity);

    QpcaResult out;
    out.precision_qubits = n;
    out.t0 = t0;
    out.copies_used = static_cast<long long>(options.copies) * ((1LL << n) - 1);

    // Copy-based evolution diagnostic on a fixed probe state.
    {
        const Index dm = rho.dimension();
        const CVector probe = CVector::Constant(dm, 1.0 / std::sqrt(static_cast<double>(dm)));
        const DensityOperator sigma(rho.layout(), probe * probe.adjoint());
        const auto lmr = density_exponentiation(rho, sigma, -t0, options.copies);
        out.lmr_error = lmr.trace_distance;
        out.lmr_constant = lmr.constant;
    }

    QuantumState s = psi.with_register({"phase", n});
    const BitSelection target = select_registers(s.layout(), {"M"});
    const PowerTable table = PowerTable::from_hermitian({rho.matrix()}, t0, n);
    apply_phase_estimation(s, BitSelection{}, target, "phase", table);
    const Vector dist = marginal_probabilities(s, "phase");
    out.phase_distribution = dist;

    // Bins to analyse and their weights (exact probabilities or shot counts).
    std::vector<std::pair<std::uint64_t, double>> bins;
    if (options.plan.is_exact()) {
        for (Index k = 0; k < dist.size(); ++k) {
            if (dist(k) > 1e-9) {
                bins.emplace_back(static_cast<std::uint64_t>(k), dist(k));
            }
        }
    } else {
        auto rng = options.plan.rng();
        std::map<std::uint64_t, double> counts;
        for (int shot = 0; shot < options.plan.shots; ++shot) {
            counts[sample_index(dist, rng)] += 1.0;
        }
        bins.assign(counts.begin(), counts.end());
    }
    std::stable_sort(bins.begin(), bins.end(), [](const auto &a, const auto &b) { return a.second > b.second; });

    std::vector<detail::PhaseCluster> clusters;
    std::vector<Matrix> conditionals;
    conditionals.reserve(bins.size());
    for (const auto &bin_weight : bins) {
        const Projected cond = postselect(s, "phase", bin_weight.first);
        const Matrix rho_b = partial_trace(cond.state, "I").matrix().real();
        conditionals.push_back(0.5 * (rho_b + rho_b.transpose()));
        const Matrix vecs = detail::dominant_eigenspace(conditionals.back());
        const Matrix proj = vecs * vecs.transpose();
        const bool known = std::any_of(clusters.begin(), clusters.end(),
                                       [&](const auto &c) { return (c.projector - proj).norm() <= 1e-6; });
        if (!known) {
            clusters.push_back({proj, vecs, 0, -1.0, 0.0});
        }
    }
    // Each direction's own phase distribution: bin weight times its share of
    // the conditional state.
    for (auto &c : clusters) {
        for (std::size_t k = 0; k < bins.size(); ++k) {
            const double w = bins[k].second * (c.projector * conditionals[k]).trace() /
                             static_cast<double>(c.vectors.cols());
            c.weight += w;
            if (w > c.mode_weight * (1.0 + 1e-9)) {
                c.mode_weight = w;
                c.mode_bin = bins[k].first;
            }
        }
    }

    std::stable_sort(clusters.begin(), clusters.end(), [n](const auto &a, const auto &b) {
        return signed_phase_of(a.mode_bin, n) > signed_phase_of(b.mode_bin, n);
    });

    Matrix basis(dims, d);
    Vector phases(d);
    Vector lambdas(d);
    Index filled = 0;
    for (std::size_t ci = 0; ci < clusters.size() && filled < d; ++ci) {
        const auto &c = clusters[ci];
        if (filled + c.vectors.cols() >= d && ci + 1 < clusters.size() &&
            clusters[ci + 1].mode_bin == c.mode_bin) {
            throw PrecisionError("qpca: eigen-directions " + std::to_string(d) + " and " + std::to_string(d + 1) +
                                 " share phase bin " + std::to_string(c.mode_bin) + "; their gap is below the 2^-" +
                                 std::to_string(n) + " resolution (" + std::to_string(1.0 / big_n) + ")");
        }
        if (c.vectors.cols() > 1) {
            out.warnings.push_back("degenerate eigenphase at bin " + std::to_string(c.mode_bin) + ": multiplicity " +
                                   std::to_string(c.vectors.cols()));
        }
        for (Index k = 0; k < c.vectors.cols() && filled < d; ++k) {
            basis.col(filled) = c.vectors.col(k).head(dims);
            phases(filled) = phase_of(c.mode_bin, n);
            lambdas(filled) = 2.0 * kPi * signed_phase_of(c.mode_bin, n) / t0 * frob2;
            ++filled;
        }
    }
    if (filled < d) {
        throw PrecisionError("qpca: resolved " + std::to_string(filled) + " of " + std::to_string(d) +
                             " eigen-directions with " + std::to_string(n) +
                             " precision qubits; eigenphase gap below the 2^-" + std::to_string(n) +
                             " resolution (" + std::to_string(1.0 / big_n) + ")");
    }
    // Exact dominant vectors are orthonormal already; re-orthonormalize the
    // spans of degenerate clusters that were cut short.
    Eigen::HouseholderQR<Matrix> qr(basis);
    Matrix q = Matrix(qr.householderQ()).leftCols(d);
    for (Index k = 0; k < d; ++k) {
        if (q.col(k).dot(basis.col(k)) < 0.0) {
            q.col(k) *= -1.0;
        }
    }
    fix_column_signs(q);
    out.basis.P = q;
    out.basis.eigenvalues = lambdas;
    out.basis.warnings = out.warnings;
    out.sampled_eigenphases = phases;
    out.eigenvalue_estimates = lambdas;
    return out;
}

inline QpcaResult qpca(const Domain &x, Index d, const QpcaOptions &options = {}) {
    return qpca(x.samples(), d, options);
}

} // namespace subalign::qsa
