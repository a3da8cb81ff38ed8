#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "subalign/quantum/ops.hpp"
#include "subalign/quantum/state.hpp"

namespace subalign::quantum {

using ValueMap = std::function<double(std::uint64_t)>;

/// [[f, -s], [s, f]] with s = sqrt(1 - f^2): sends |0> to f|0> + s|1>.
inline CMatrix rotation_for(double f) {
    const double s = std::sqrt(std::max(0.0, 1.0 - f * f));
    CMatrix r(2, 2);
    r << f, -s, s, f;
    return r;
}

/// Rotates the ancilla qubit `ancilla_bit` by rotation_for(f(v)) where v is the
/// value of `values`. With `inverse` the transposed rotations are applied.
inline void apply_conditional_rotation(QuantumState &state, const BitSelection &values, int ancilla_bit,
                                       const ValueMap &f, bool inverse = false) {
    std::vector<CMatrix> rots;
    rots.reserve(values.size());
    for (std::size_t v = 0; v < values.size(); ++v) {
        const double fv = f(static_cast<std::uint64_t>(v));
        if (!(std::abs(fv) <= 1.0 + 1e-12)) {
            throw RangeError("conditional rotation: |f(" + std::to_string(v) + ")| = " + std::to_string(fv) +
                             " exceeds 1");
        }
        const CMatrix r = rotation_for(std::clamp(fv, -1.0, 1.0));
        rots.push_back(inverse ? CMatrix(r.transpose()) : r);
    }
    apply_uniformly_controlled(state, values, BitSelection({ancilla_bit}),
                               [&](std::uint64_t v) { return &rots[static_cast<std::size_t>(v)]; });
}

/// Appends ancilla `ancilla` = |0> and writes f(v)|0> + sqrt(1 - f(v)^2)|1> on it
/// for every basis value v of `value_register`.
inline QuantumState conditional_rotation(const QuantumState &state, const std::string &value_register,
                                         const ValueMap &f, const std::string &ancilla = "R") {
    QuantumState s = state.with_register({ancilla, 1});
    apply_conditional_rotation(s, select_registers(s.layout(), {value_register}),
                               s.layout().offset(ancilla), f);
    return s;
}

/// Keeps the ancilla-0 branch; returns the renormalized state and its Born probability.
inline Projected postselect_r0(const QuantumState &state, const std::string &ancilla = "R") {
    return postselect(state, ancilla, 0);
}

} // namespace subalign::quantum
