#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "subalign/linalg.hpp"
#include "subalign/quantum/ops.hpp"
#include "subalign/quantum/qft.hpp"
#include "subalign/quantum/state.hpp"

namespace subalign::quantum {

inline constexpr int kMaxPrecisionQubits = 12;

inline void check_precision(int precision) {
    if (precision < 1 || precision > kMaxPrecisionQubits) {
        throw ConfigError("precision_qubits must be in 1.." + std::to_string(kMaxPrecisionQubits) + " (got " +
                          std::to_string(precision) + ")");
    }
}

/// U_c^{2^k} and their adjoints for every control value c and precision bit k.
class PowerTable {
  public:
    PowerTable() = default;

    /// Powers by repeated squaring of the given unitaries (one per control value).
    PowerTable(const std::vector<CMatrix> &unitaries, int precision) {
        check_precision(precision);
        for (const auto &u : unitaries) {
            if (!is_unitary(u)) {
                throw ValidationError("phase estimation: operator is not unitary within 1e-10");
            }
            std::vector<CMatrix> fwd;
            std::vector<CMatrix> adj;
            CMatrix p = u;
            for (int k = 0; k < precision; ++k) {
                fwd.push_back(p);
                adj.push_back(p.adjoint());
                p = p * p;
            }
            forward_.push_back(std::move(fwd));
            adjoint_.push_back(std::move(adj));
        }
    }

    /// Powers of e^{i H_c t} evaluated spectrally, for Hermitian H_c.
    static PowerTable from_hermitian(const std::vector<CMatrix> &hamiltonians, double t, int precision) {
        check_precision(precision);
        PowerTable table;
        for (const auto &h : hamiltonians) {
            if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
                throw ValidationError("phase estimation: generator is not Hermitian within 1e-10");
            }
            Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
            const CMatrix &v = eig.eigenvectors();
            std::vector<CMatrix> fwd;
            std::vector<CMatrix> adj;
            for (int k = 0; k < precision; ++k) {
                const double tk = t * std::ldexp(1.0, k);
                CVector ph(eig.eigenvalues().size());
                for (Index j = 0; j < ph.size(); ++j) {
                    ph(j) = std::polar(1.0, eig.eigenvalues()(j) * tk);
                }
                CMatrix p = v * ph.asDiagonal() * v.adjoint();
                adj.push_back(p.adjoint());
                fwd.push_back(std::move(p));
            }
            table.forward_.push_back(std::move(fwd));
            table.adjoint_.push_back(std::move(adj));
        }
        return table;
    }

    std::size_t controls() const noexcept { return forward_.size(); }
    int precision() const noexcept { return forward_.empty() ? 0 : static_cast<int>(forward_[0].size()); }

    const CMatrix *power(std::uint64_t control, int k, bool adjoint) const {
        const auto &src = adjoint ? adjoint_ : forward_;
        return &src.at(static_cast<std::size_t>(control)).at(static_cast<std::size_t>(k));
    }

  private:
    std::vector<std::vector<CMatrix>> forward_;
    std::vector<std::vector<CMatrix>> adjoint_;
};

namespace detail {

inline BitSelection with_top_bit(const BitSelection &control, int bit) {
    auto positions = control.positions();
    positions.push_back(bit);
    return BitSelection(std::move(positions));
}

inline void controlled_powers(QuantumState &state, const BitSelection &control, const BitSelection &target,
                              const std::string &phase_reg, const PowerTable &table, bool adjoint) {
    const int n = state.layout().width(phase_reg);
    const int off = state.layout().offset(phase_reg);
    if (table.precision() != n) {
        throw ShapeError("phase estimation: power table precision does not match the register");
    }
    if (table.controls() != control.size()) {
        throw ShapeError("phase estimation: power table needs one operator per control value");
    }
    const std::uint64_t top = std::uint64_t{1} << control.bits();
    for (int k = 0; k < n; ++k) {
        const BitSelection sel = with_top_bit(control, off + k);
        apply_uniformly_controlled(state, sel, target, [&](std::uint64_t c) -> const CMatrix * {
            if ((c & top) == 0) {
                return nullptr;
            }
            return table.power(c & (top - 1), k, adjoint);
        });
    }
}

} // namespace detail

/// Textbook phase estimation on an existing register `phase_reg` (initially |0>):
/// Hadamards, controlled-U_c^{2^k} on bit k, inverse QFT. The operator applied
/// to `target` is selected by the value of `control`.
inline void apply_phase_estimation(QuantumState &state, const BitSelection &control, const BitSelection &target,
                                   const std::string &phase_reg, const PowerTable &table) {
    apply_hadamard_all(state, phase_reg);
    detail::controlled_powers(state, control, target, phase_reg, table, false);
    apply_inverse_qft(state, phase_reg);
}

/// Exact inverse of apply_phase_estimation.
inline void apply_inverse_phase_estimation(QuantumState &state, const BitSelection &control,
                                           const BitSelection &target, const std::string &phase_reg,
                                           const PowerTable &table) {
    apply_qft(state, phase_reg);
    detail::controlled_powers(state, control, target, phase_reg, table, true);
    apply_hadamard_all(state, phase_reg);
}

/// Appends a `precision`-qubit register and runs phase estimation of U on the
/// listed registers of `input` (all registers when the list is empty).
/// An eigenstate with eigenphase k/2^n leaves |k> in the new register.
inline QuantumState phase_estimation(const CMatrix &u, const QuantumState &input, int precision,
                                     std::vector<std::string> target_registers = {},
                                     const std::string &phase_reg = "phase") {
    check_precision(precision);
    if (target_registers.empty()) {
        for (const auto &r : input.layout().registers()) {
            target_registers.push_back(r.name);
        }
    }
    QuantumState s = input.with_register({phase_reg, precision});
    const BitSelection target = select_registers(s.layout(), target_registers);
    if (static_cast<std::size_t>(u.rows()) != target.size()) {
        throw ShapeError("phase_estimation: U is " + std::to_string(u.rows()) + "-dimensional, target is " +
                         std::to_string(target.size()));
    }
    const PowerTable table({u}, precision);
    apply_phase_estimation(s, BitSelection{}, target, phase_reg, table);
    return s;
}

/// Eigenphase represented by outcome k of an n-bit register, in [0, 1).
inline double phase_of(std::uint64_t k, int precision) { return std::ldexp(static_cast<double>(k), -precision); }

/// Outcome k read as a signed phase in [-1/2, 1/2).
inline double signed_phase_of(std::uint64_t k, int precision) {
    const double p = phase_of(k, precision);
    return p >= 0.5 ? p - 1.0 : p;
}

/// Closed-form probability of reading k for eigenphase phi with n bits.
inline double phase_estimation_probability(double phi, std::uint64_t k, int precision) {
    const double n = std::ldexp(1.0, precision);
    const double delta = phi - static_cast<double>(k) / n;
    const double den = std::sin(kPi * delta);
    if (std::abs(den) < 1e-15) {
        return 1.0;
    }
    const double num = std::sin(kPi * n * delta);
    return (num * num) / (n * n * den * den);
}

} // namespace subalign::quantum
