#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "subalign/linalg.hpp"
#include "subalign/quantum/layout.hpp"
#include "subalign/quantum/state.hpp"

namespace subalign::quantum {

/// Unit-trace Hermitian PSD operator over a register layout.
class DensityOperator {
  public:
    DensityOperator() : DensityOperator(RegisterLayout{}, CMatrix::Ones(1, 1)) {}

    DensityOperator(RegisterLayout layout, CMatrix matrix) : layout_(std::move(layout)), m_(std::move(matrix)) {
        if (layout_.total_qubits() > kMaxDensityQubits) {
            throw CapError("density operator needs " + std::to_string(layout_.total_qubits()) +
                           " qubits; cap is " + std::to_string(kMaxDensityQubits));
        }
        const auto dim = static_cast<Index>(layout_.dimension());
        if (m_.rows() != dim || m_.cols() != dim) {
            throw ShapeError("DensityOperator: matrix size does not match layout");
        }
        if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
            throw ValidationError("DensityOperator: matrix is not Hermitian within 1e-10");
        }
        const double tr = m_.trace().real();
        if (std::abs(tr - 1.0) > 1e-10) {
            throw ValidationError("DensityOperator: trace " + std::to_string(tr) + " is not 1");
        }
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(m_, Eigen::EigenvaluesOnly);
        if (eig.eigenvalues().minCoeff() < -1e-10) {
            throw ValidationError("DensityOperator: negative eigenvalue " +
                                  std::to_string(eig.eigenvalues().minCoeff()));
        }
    }

    static DensityOperator pure(const QuantumState &s) {
        return DensityOperator(s.layout(), s.amplitudes() * s.amplitudes().adjoint());
    }

    /// Normalizes a PSD matrix proportional to a density operator to unit trace.
    static DensityOperator from_unnormalized(RegisterLayout layout, const CMatrix &m) {
        const double tr = m.trace().real();
        if (!(tr > 0.0)) {
            throw EncodingError("density operator with non-positive trace");
        }
        CMatrix h = 0.5 * (m + m.adjoint()) / tr;
        return DensityOperator(std::move(layout), std::move(h));
    }

    const RegisterLayout &layout() const noexcept { return layout_; }
    const CMatrix &matrix() const noexcept { return m_; }
    Index dimension() const noexcept { return m_.rows(); }
    double purity() const { return (m_ * m_).trace().real(); }

  private:
    RegisterLayout layout_;
    CMatrix m_;
};

/// Traces `over` out of a pure state. Costs O(kept^2 * traced).
inline DensityOperator partial_trace(const QuantumState &s, const std::string &over) {
    const auto &layout = s.layout();
    const int off = layout.offset(over);
    const int w = layout.width(over);
    const RegisterLayout rest = layout.without(over);
    const auto kept = static_cast<Index>(rest.dimension());
    const Index traced = Index{1} << w;
    const std::uint64_t low = (std::uint64_t{1} << off) - 1;
    CMatrix psi(kept, traced);
    for (Index j = 0; j < kept; ++j) {
        const auto uj = static_cast<std::uint64_t>(j);
        for (Index t = 0; t < traced; ++t) {
            const std::uint64_t i = ((uj & ~low) << w) | (static_cast<std::uint64_t>(t) << off) | (uj & low);
            psi(j, t) = s.amplitudes()(static_cast<Index>(i));
        }
    }
    CMatrix rho = psi * psi.adjoint();
    rho = 0.5 * (rho + rho.adjoint());
    return DensityOperator(rest, std::move(rho));
}

inline DensityOperator partial_trace(const DensityOperator &rho, const std::string &over) {
    const auto &layout = rho.layout();
    const int off = layout.offset(over);
    const int w = layout.width(over);
    const RegisterLayout rest = layout.without(over);
    const auto kept = static_cast<Index>(rest.dimension());
    const Index traced = Index{1} << w;
    const std::uint64_t low = (std::uint64_t{1} << off) - 1;
    auto full = [&](Index j, Index t) {
        const auto uj = static_cast<std::uint64_t>(j);
        return static_cast<Index>(((uj & ~low) << w) | (static_cast<std::uint64_t>(t) << off) | (uj & low));
    };
    CMatrix out = CMatrix::Zero(kept, kept);
    for (Index a = 0; a < kept; ++a) {
        for (Index b = 0; b < kept; ++b) {
            Complex acc = 0.0;
            for (Index t = 0; t < traced; ++t) {
                acc += rho.matrix()(full(a, t), full(b, t));
            }
            out(a, b) = acc;
        }
    }
    out = 0.5 * (out + out.adjoint());
    return DensityOperator(rest, std::move(out));
}

/// (1/2) sum |eig(a - b)|.
inline double trace_distance(const CMatrix &a, const CMatrix &b) {
    const CMatrix diff = a - b;
    const CMatrix h = 0.5 * (diff + diff.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(h, Eigen::EigenvaluesOnly);
    return 0.5 * eig.eigenvalues().cwiseAbs().sum();
}

inline double trace_distance(const DensityOperator &a, const DensityOperator &b) {
    return trace_distance(a.matrix(), b.matrix());
}

/// e^{i s H} for Hermitian H, evaluated spectrally.
inline CMatrix hermitian_exp(const CMatrix &h, double s) {
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
    CVector ph(eig.eigenvalues().size());
    for (Index j = 0; j < ph.size(); ++j) {
        ph(j) = std::polar(1.0, s * eig.eigenvalues()(j));
    }
    return eig.eigenvectors() * ph.asDiagonal() * eig.eigenvectors().adjoint();
}

/// e^{-i rho t} sigma e^{i rho t}.
inline CMatrix exact_conjugation(const CMatrix &rho, const CMatrix &sigma, double t) {
    const CMatrix u = hermitian_exp(rho, -t);
    return u * sigma * u.adjoint();
}

struct DensityExponentiation {
    DensityOperator result;
    double trace_distance = 0.0; ///< against the exact conjugation
    double constant = 0.0;       ///< measured C in trace_distance <= C t^2 / l
    int copies_used = 0;
};

namespace detail {

/// Index of the swapped basis state |b>|a> for joint index a*d + b.
inline Index swapped_index(Index joint, Index d) { return (joint % d) * d + joint / d; }

} // namespace detail

/// l slices of sigma -> tr_1[ U (rho (x) sigma) U^dag ] with the partial swap
/// U = cos(dt) I - i sin(dt) S, dt = t / l. Each slice consumes a fresh copy of rho.
inline DensityExponentiation density_exponentiation(const DensityOperator &rho, const DensityOperator &sigma,
                                                    double t, int slices) {
    if (slices < 1) {
        throw ConfigError("density_exponentiation: slices must be >= 1");
    }
    if (!(rho.layout() == sigma.layout())) {
        throw ShapeError("density_exponentiation: rho and sigma layouts differ");
    }
    const Index d = rho.dimension();
    if (2 * rho.layout().total_qubits() > kMaxDensityQubits) {
        throw CapError("density_exponentiation: joint register exceeds the density-operator cap");
    }
    const double dt = t / slices;
    const Complex c = std::cos(dt);
    const Complex is = Complex(0.0, std::sin(dt));
    CMatrix cur = sigma.matrix();
    const Index n = d * d;
    CMatrix joint(n, n);
    CMatrix left(n, n);
    for (int step = 0; step < slices; ++step) {
        for (Index a = 0; a < d; ++a) {
            for (Index b = 0; b < d; ++b) {
                joint.block(a * d, b * d, d, d) = rho.matrix()(a, b) * cur;
            }
        }
        // left = U joint, with (S X)(r, .) = X(swap(r), .)
        for (Index r = 0; r < n; ++r) {
            left.row(r) = c * joint.row(r) - is * joint.row(detail::swapped_index(r, d));
        }
        // joint = left U^dag, with (X S)(., k) = X(., swap(k))
        for (Index k = 0; k < n; ++k) {
            joint.col(k) = c * left.col(k) + is * left.col(detail::swapped_index(k, d));
        }
        CMatrix next = CMatrix::Zero(d, d);
        for (Index a = 0; a < d; ++a) {
            next += joint.block(a * d, a * d, d, d);
        }
        cur = 0.5 * (next + next.adjoint());
    }
    DensityExponentiation out{DensityOperator(sigma.layout(), cur), 0.0, 0.0, slices};
    out.trace_distance = trace_distance(cur, exact_conjugation(rho.matrix(), sigma.matrix(), t));
    out.constant = t == 0.0 ? 0.0 : out.trace_distance * slices / (t * t);
    return out;
}

} // namespace subalign::quantum
