#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "subalign/linalg.hpp"
#include "subalign/quantum/layout.hpp"
#include "subalign/quantum/state.hpp"

namespace subalign::quantum {

namespace gates {

inline CMatrix hadamard() {
    const double r = 1.0 / std::sqrt(2.0);
    CMatrix h(2, 2);
    h << r, r, r, -r;
    return h;
}

inline CMatrix pauli_x() {
    CMatrix x(2, 2);
    x << 0, 1, 1, 0;
    return x;
}

inline CMatrix pauli_z() {
    CMatrix z(2, 2);
    z << 1, 0, 0, -1;
    return z;
}

/// exp(-i theta Y / 2).
inline CMatrix ry(double theta) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    CMatrix m(2, 2);
    m << c, -s, s, c;
    return m;
}

inline CMatrix phase(double phi) {
    CMatrix m = CMatrix::Identity(2, 2);
    m(1, 1) = std::polar(1.0, phi);
    return m;
}

} // namespace gates

inline bool is_unitary(const CMatrix &u, double tol = 1e-10) {
    if (u.rows() != u.cols()) {
        return false;
    }
    return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

/// Unitary whose first column is the unit vector `target`: a phase times the
/// Householder reflection exchanging phase * |0> and `target`.
inline CMatrix state_preparation(const CVector &target) {
    const Index n = target.size();
    if (std::abs(target.squaredNorm() - 1.0) > 1e-10) {
        throw ValidationError("state_preparation: target is not normalized");
    }
    const double r0 = std::abs(target(0));
    const Complex ph = r0 > 0.0 ? target(0) / r0 : Complex(1.0, 0.0);
    CVector w = -target;
    w(0) += ph;
    const double nw2 = w.squaredNorm();
    CMatrix h = CMatrix::Identity(n, n);
    if (nw2 > 1e-28) {
        h -= (2.0 / nw2) * w * w.adjoint();
    }
    return ph * h;
}

/// Applies family(c) to the target bits for each value c of the control bits.
/// `family` returns a pointer to a 2^t x 2^t matrix, or nullptr for identity.
template <class Family>
void apply_uniformly_controlled(QuantumState &state, const BitSelection &control, const BitSelection &target,
                                Family &&family) {
    if ((control.mask() & target.mask()) != 0) {
        throw ConfigError("apply_uniformly_controlled: control and target overlap");
    }
    const std::uint64_t rest = full_mask(state.layout()) & ~(control.mask() | target.mask());
    const Index tdim = static_cast<Index>(target.size());
    CVector &amps = state.mutable_amplitudes();
    CVector fiber(tdim);
    CVector out(tdim);
    for (std::size_t c = 0; c < control.size(); ++c) {
        const CMatrix *u = family(static_cast<std::uint64_t>(c));
        if (u == nullptr) {
            continue;
        }
        if (u->rows() != tdim || u->cols() != tdim) {
            throw ShapeError("apply_uniformly_controlled: operator size does not match target");
        }
        const std::uint64_t cbits = control.deposit(c);
        for_each_submask(rest, [&](std::uint64_t r) {
            const std::uint64_t base = cbits | r;
            for (Index t = 0; t < tdim; ++t) {
                fiber(t) = amps(static_cast<Index>(base | target.deposit(static_cast<std::size_t>(t))));
            }
            out.noalias() = (*u) * fiber;
            for (Index t = 0; t < tdim; ++t) {
                amps(static_cast<Index>(base | target.deposit(static_cast<std::size_t>(t)))) = out(t);
            }
        });
    }
}

inline void apply_matrix(QuantumState &state, const BitSelection &target, const CMatrix &u) {
    apply_uniformly_controlled(state, BitSelection{}, target, [&](std::uint64_t) { return &u; });
}

inline void apply_matrix(QuantumState &state, const std::vector<std::string> &registers, const CMatrix &u) {
    apply_matrix(state, select_registers(state.layout(), registers), u);
}

/// Applies u to `target` only where all control bits equal `control_value`.
inline void apply_controlled(QuantumState &state, const BitSelection &control, std::uint64_t control_value,
                             const BitSelection &target, const CMatrix &u) {
    apply_uniformly_controlled(state, control, target,
                               [&](std::uint64_t c) { return c == control_value ? &u : nullptr; });
}

/// Multiplies each amplitude by phase(index).
template <class PhaseFn> void apply_diagonal(QuantumState &state, PhaseFn &&phase) {
    CVector &amps = state.mutable_amplitudes();
    for (Index i = 0; i < amps.size(); ++i) {
        amps(i) *= phase(static_cast<std::uint64_t>(i));
    }
}

inline void apply_hadamard_all(QuantumState &state, const std::string &reg) {
    const CMatrix h = gates::hadamard();
    const int w = state.layout().width(reg);
    for (int b = 0; b < w; ++b) {
        apply_matrix(state, select_qubit(state.layout(), reg, b), h);
    }
}

inline void apply_cz(QuantumState &state, int bit_a, int bit_b) {
    const std::uint64_t m = (std::uint64_t{1} << bit_a) | (std::uint64_t{1} << bit_b);
    apply_diagonal(state, [m](std::uint64_t i) { return (i & m) == m ? Complex(-1.0) : Complex(1.0); });
}

/// Controlled swap of two equal-width registers on a single control qubit.
inline void apply_controlled_swap(QuantumState &state, int control_bit, const std::string &a,
                                  const std::string &b) {
    const auto &layout = state.layout();
    const int w = layout.width(a);
    if (layout.width(b) != w) {
        throw ShapeError("controlled swap: registers '" + a + "' and '" + b + "' differ in width");
    }
    const int oa = layout.offset(a);
    const int ob = layout.offset(b);
    const std::uint64_t ma = ((std::uint64_t{1} << w) - 1) << oa;
    const std::uint64_t mb = ((std::uint64_t{1} << w) - 1) << ob;
    const std::uint64_t cm = std::uint64_t{1} << control_bit;
    if ((cm & (ma | mb)) != 0) {
        throw ConfigError("controlled swap: control lies inside a swapped register");
    }
    CVector &amps = state.mutable_amplitudes();
    for (std::uint64_t i = 0; i < state.dimension(); ++i) {
        if ((i & cm) == 0) {
            continue;
        }
        const std::uint64_t va = (i & ma) >> oa;
        const std::uint64_t vb = (i & mb) >> ob;
        if (va < vb) {
            const std::uint64_t j = (i & ~(ma | mb)) | (vb << oa) | (va << ob);
            std::swap(amps(static_cast<Index>(i)), amps(static_cast<Index>(j)));
        }
    }
}

/// Outcome distribution of the listed registers (first listed most significant).
inline Vector marginal_probabilities(const QuantumState &state, const std::vector<std::string> &registers) {
    const BitSelection sel = select_registers(state.layout(), registers);
    Vector p = Vector::Zero(static_cast<Index>(sel.size()));
    const CVector &amps = state.amplitudes();
    for (std::uint64_t i = 0; i < state.dimension(); ++i) {
        p(static_cast<Index>(sel.extract(i))) += std::norm(amps(static_cast<Index>(i)));
    }
    return p;
}

inline Vector marginal_probabilities(const QuantumState &state, const std::string &reg) {
    return marginal_probabilities(state, std::vector<std::string>{reg});
}

struct Projected {
    QuantumState state; ///< register removed, renormalized
    double probability; ///< Born probability of the outcome
};

inline constexpr double kMinPostselection = 1e-14;

/// Keeps the branch where `reg` reads `value`, drops the register and renormalizes.
inline Projected postselect(const QuantumState &state, const std::string &reg, std::uint64_t value) {
    const auto &layout = state.layout();
    const int off = layout.offset(reg);
    const int w = layout.width(reg);
    if (value >= (std::uint64_t{1} << w)) {
        throw ConfigError("postselect: value outside register '" + reg + "'");
    }
    const RegisterLayout rest = layout.without(reg);
    const std::uint64_t low = (std::uint64_t{1} << off) - 1;
    CVector kept(static_cast<Index>(rest.dimension()));
    for (std::uint64_t j = 0; j < rest.dimension(); ++j) {
        const std::uint64_t i = ((j & ~low) << w) | (value << off) | (j & low);
        kept(static_cast<Index>(j)) = state.amplitudes()(static_cast<Index>(i));
    }
    const double p = kept.squaredNorm();
    if (!(p > kMinPostselection)) {
        throw PostselectionError("postselection on " + reg + " = " + std::to_string(value) +
                                 " has probability " + std::to_string(p));
    }
    return {QuantumState(rest, kept / std::sqrt(p), state.global_scale()), p};
}

/// Draws one index from a probability vector.
inline std::uint64_t sample_index(const Vector &probabilities, std::mt19937_64 &rng) {
    std::discrete_distribution<std::uint64_t> dist(probabilities.data(),
                                                   probabilities.data() + probabilities.size());
    return dist(rng);
}

} // namespace subalign::quantum
