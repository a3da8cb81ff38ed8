#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "subalign/linalg.hpp"
#include "subalign/quantum/amplitude_estimation.hpp"
#include "subalign/quantum/grover.hpp"
#include "subalign/quantum/ops.hpp"
#include "subalign/quantum/sampling.hpp"
#include "subalign/quantum/state.hpp"
#include "subalign/quantum/swap_test.hpp"

namespace subalign::qsa {

inline constexpr Index kMaxQnnDim = 8;
inline constexpr Index kMaxQnnSources = 64;

struct QnnPoint {
    std::vector<double> distances; ///< estimated Euclidean distance to each source point
    std::size_t nearest = 0;
    std::uint64_t queries = 0;
    bool ambiguous = false;
};

struct QnnResult {
    std::vector<int> labels;
    std::vector<QnnPoint> points;
    std::vector<std::string> warnings;
};

struct QnnOptions {
    quantum::ShotPlan plan = quantum::ShotPlan::exact();
    int ae_bits = 7;
    int repeats = 15;
};

/// Swap-test circuit encoding the distance between x_t and x_a.
///
/// With Z = |x_t|^2 + |x_a|^2, |psi> = (|0>|x_t^> + |1>|x_a^>) / sqrt 2 on (anc, x) and
/// |phi> = (|x_t| |0> - |x_a| |1>) / sqrt Z on p; the partial swap test of anc
/// against p has P(1) = (1 - |x_t - x_a|^2 / (2 Z)) / 2. The returned vector is
/// the final state over (swap_anc, anc, x, p).
inline CVector distance_swap_state(const Vector &xt, const Vector &xa) {
    using namespace quantum;
    const int qd = ceil_log2(static_cast<std::uint64_t>(xt.size()));
    const Index dd = Index{1} << qd;
    const double nt = xt.norm();
    const double na = xa.norm();
    const double z = nt * nt + na * na;
    auto unit = [dd](const Vector &v, double n) {
        CVector u = CVector::Zero(dd);
        if (n > 0.0) {
            u.head(v.size()) = (v / n).cast<Complex>();
        } else {
            u(0) = 1.0;
        }
        return u;
    };
    CVector psi(2 * dd);
    psi.head(dd) = unit(xt, nt) / std::sqrt(2.0);
    psi.tail(dd) = unit(xa, na) / std::sqrt(2.0);
    CVector phi(2);
    phi << nt / std::sqrt(z), -na / std::sqrt(z);
    const QuantumState a(RegisterLayout{{"anc", 1}, {"x", qd}}, psi);
    const QuantumState b(RegisterLayout{{"p", 1}}, phi);
    QuantumState s = QuantumState::basis(RegisterLayout{{"swap_anc", 1}}).tensor(a.tensor(b));
    const BitSelection anc({s.layout().offset("swap_anc")});
    apply_matrix(s, anc, gates::hadamard());
    apply_controlled_swap(s, s.layout().offset("swap_anc"), "anc", "p");
    apply_matrix(s, anc, gates::hadamard());
    return s.amplitudes();
}

struct DistanceEstimate {
    double squared = 0.0;
    double resolution = 0.0; ///< in squared-distance units
};

/// Squared distance from amplitude estimation of the swap-test ancilla:
/// |x_t - x_a|^2 = 2 Z (1 - 2 P(1)).
inline DistanceEstimate estimate_squared_distance(const Vector &xt, const Vector &xa, int ae_bits,
                                                  const quantum::ShotPlan &plan) {
    using namespace quantum;
    const double z = xt.squaredNorm() + xa.squaredNorm();
    if (!(z > 0.0)) {
        return {0.0, 0.0};
    }
    const CVector final_state = distance_swap_state(xt, xa);
    const CMatrix prep = state_preparation(final_state);
    const Index dim = final_state.size();
    CMatrix pi = CMatrix::Zero(dim, dim);
    for (Index i = dim / 2; i < dim; ++i) {
        pi(i, i) = 1.0;
    }
    const AmplitudeEstimate ae = amplitude_estimation(prep, pi, ae_bits, plan);
    DistanceEstimate out;
    out.squared = std::max(0.0, 2.0 * z * (1.0 - 2.0 * ae.estimate));
    out.resolution = plan.is_exact() ? 1e-9 * z : 4.0 * z * ae_error_bound(ae_bits);
    return out;
}

/// Quantum nearest-neighbour labels for the columns of X_hat_t against the
/// labelled columns of X_hat_a: per-pair distances by amplitude estimation,
/// then Grover minimum finding over the estimates.
inline QnnResult q_nn_classify(const Matrix &x_hat_a, const std::vector<int> &labels, const Matrix &x_hat_t,
                               const QnnOptions &options = {}) {
    using namespace quantum;
    if (x_hat_a.rows() != x_hat_t.rows()) {
        throw ShapeError("q_nn_classify: source is " + shape_string(x_hat_a) + ", target is " +
                         shape_string(x_hat_t));
    }
    if (static_cast<Index>(labels.size()) != x_hat_a.cols()) {
        throw ShapeError("q_nn_classify: label count does not match source count");
    }
    if (x_hat_a.rows() > kMaxQnnDim || x_hat_a.cols() > kMaxQnnSources) {
        throw CapError("q_nn_classify: d = " + std::to_string(x_hat_a.rows()) + ", n_s = " +
                       std::to_string(x_hat_a.cols()) + " exceed the register budget (d <= 8, n_s <= 64)");
    }
    if (x_hat_a.cols() == 0) {
        throw ConfigError("q_nn_classify: empty source set");
    }
    options.plan.validate();

    QnnResult out;
    const std::size_t ns = labels.size();
    for (Index j = 0; j < x_hat_t.cols(); ++j) {
        const ShotPlan point_plan = options.plan.derived(static_cast<std::uint64_t>(j));
        QnnPoint pt;
        std::vector<double> d2(ns);
        std::vector<double> res(ns);
        for (std::size_t i = 0; i < ns; ++i) {
            const auto est = estimate_squared_distance(x_hat_t.col(j), x_hat_a.col(static_cast<Index>(i)),
                                                       options.ae_bits, point_plan.derived(i));
            d2[i] = est.squared;
            res[i] = est.resolution;
            pt.distances.push_back(std::sqrt(est.squared));
        }
        const MinFindResult mf = grover_min_find(d2, point_plan.derived(ns), options.repeats);
        pt.nearest = mf.index;
        pt.queries = mf.queries;

        std::vector<std::size_t> order(ns);
        for (std::size_t i = 0; i < ns; ++i) {
            order[i] = i;
        }
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d2[a] < d2[b]; });
        if (ns > 1) {
            const std::size_t a = order[0];
            const std::size_t b = order[1];
            if (d2[b] - d2[a] <= std::max(res[a], res[b])) {
                pt.ambiguous = true;
                out.warnings.push_back("target " + std::to_string(j) + ": sources " + std::to_string(a) + " and " +
                                       std::to_string(b) + " are within the distance resolution");
            }
        }
        out.labels.push_back(labels[pt.nearest]);
        out.points.push_back(std::move(pt));
    }
    return out;
}

} // namespace subalign::qsa
