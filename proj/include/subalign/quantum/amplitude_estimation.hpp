#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "subalign/linalg.hpp"
#include "subalign/quantum/ops.hpp"
#include "subalign/quantum/phase_estimation.hpp"
#include "subalign/quantum/sampling.hpp"

namespace subalign::quantum {

inline constexpr int kMaxAeBits = 10;

struct AmplitudeEstimate {
    double estimate = 0.0;   ///< sin^2(pi k / 2^m), or the median over shots
    double amplitude = 0.0;  ///< exact ||Pi A|0>||^2
    std::uint64_t outcome = 0;
    int bits = 0;
};

/// Worst-case error of one canonical AE draw that lands in the main lobe.
inline double ae_error_bound(int m) {
    const double inv = std::ldexp(1.0, -m);
    return kPi * inv + kPi * kPi * inv * inv;
}

/// Grover iterate Q = -A S_0 A^dag S_chi with S_chi = I - 2 Pi and S_0 = I - 2|0><0|.
inline CMatrix grover_iterate(const CMatrix &a, const CMatrix &pi) {
    const Index n = a.rows();
    CMatrix s_chi = CMatrix::Identity(n, n) - 2.0 * pi;
    CMatrix s0 = CMatrix::Identity(n, n);
    s0(0, 0) = -1.0;
    return -(a * s0 * a.adjoint() * s_chi);
}

inline void validate_projector(const CMatrix &pi, Index dim) {
    if (pi.rows() != dim || pi.cols() != dim) {
        throw ShapeError("amplitude_estimation: projector size does not match state preparation");
    }
    if ((pi * pi - pi).cwiseAbs().maxCoeff() > 1e-10) {
        throw ValidationError("amplitude_estimation: good projector is not idempotent");
    }
    if ((pi - pi.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
        throw ValidationError("amplitude_estimation: good projector is not Hermitian");
    }
}

/// Outcome distribution of the m-bit phase register when phase estimation of Q
/// is run on A|0>.
inline Vector amplitude_estimation_distribution(const CMatrix &a, const CMatrix &pi, int m) {
    if (m < 1 || m > kMaxAeBits) {
        throw ConfigError("amplitude_estimation: m must be in 1.." + std::to_string(kMaxAeBits));
    }
    if (!is_unitary(a)) {
        throw ValidationError("amplitude_estimation: state preparation is not unitary");
    }
    validate_projector(pi, a.rows());
    const int q = ceil_log2(static_cast<std::uint64_t>(a.rows()));
    if ((Index{1} << q) != a.rows()) {
        throw ShapeError("amplitude_estimation: state preparation must act on whole qubits");
    }
    const QuantumState input(RegisterLayout{{"work", q}}, a.col(0));
    const QuantumState out = phase_estimation(grover_iterate(a, pi), input, m, {"work"}, "ae");
    return marginal_probabilities(out, "ae");
}

inline double ae_value(std::uint64_t k, int m) {
    const double s = std::sin(kPi * phase_of(k, m));
    return s * s;
}

/// Canonical amplitude estimation of a = ||Pi A|0>||^2 with m evaluation bits.
/// Exact mode returns a itself. Sampled mode draws plan.shots outcomes and
/// reports the median of sin^2(pi k / 2^m); a single shot is the textbook
/// one-run estimator.
inline AmplitudeEstimate amplitude_estimation(const CMatrix &a, const CMatrix &pi, int m, const ShotPlan &plan) {
    plan.validate();
    const Vector dist = amplitude_estimation_distribution(a, pi, m);
    AmplitudeEstimate out;
    out.bits = m;
    const CVector good = pi * a.col(0);
    out.amplitude = good.squaredNorm();
    if (plan.is_exact()) {
        out.estimate = out.amplitude;
        out.outcome = static_cast<std::uint64_t>(std::llround(std::asin(std::sqrt(std::min(1.0, out.amplitude))) /
                                                              kPi * std::ldexp(1.0, m))) %
                      (std::uint64_t{1} << m);
        return out;
    }
    auto rng = plan.rng();
    std::vector<double> draws;
    draws.reserve(static_cast<std::size_t>(plan.shots));
    for (int s = 0; s < plan.shots; ++s) {
        const std::uint64_t k = sample_index(dist, rng);
        if (s == 0) {
            out.outcome = k;
        }
        draws.push_back(ae_value(k, m));
    }
    const auto mid = draws.begin() + static_cast<std::ptrdiff_t>(draws.size() / 2);
    std::nth_element(draws.begin(), mid, draws.end());
    out.estimate = *mid;
    return out;
}

} // namespace subalign::quantum
