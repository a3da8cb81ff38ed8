#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "subalign/linalg.hpp"
#include "subalign/quantum/layout.hpp"

namespace subalign::quantum {

inline constexpr double kNormTolerance = 1e-10;

/// Normalized amplitude vector over a register layout. `global_scale` carries
/// the norm that amplitude encoding strips off, so scale * amplitude recovers
/// the encoded entry.
class QuantumState {
  public:
    QuantumState() : QuantumState(RegisterLayout{}, CVector::Ones(1)) {}

    QuantumState(RegisterLayout layout, CVector amplitudes, double global_scale = 1.0)
        : layout_(std::move(layout)), amps_(std::move(amplitudes)), scale_(global_scale) {
        if (static_cast<std::uint64_t>(amps_.size()) != layout_.dimension()) {
            throw ShapeError("QuantumState: " + std::to_string(amps_.size()) + " amplitudes for a " +
                             std::to_string(layout_.total_qubits()) + "-qubit layout");
        }
        if (!std::isfinite(scale_) || scale_ < 0.0) {
            throw ValidationError("QuantumState: global_scale must be finite and >= 0");
        }
        const double n2 = amps_.squaredNorm();
        if (std::abs(n2 - 1.0) > kNormTolerance) {
            throw ValidationError("QuantumState: squared norm " + std::to_string(n2) + " is not 1");
        }
    }

    static QuantumState basis(const RegisterLayout &layout, std::uint64_t index = 0) {
        if (index >= layout.dimension()) {
            throw ConfigError("QuantumState::basis: index outside the state space");
        }
        CVector amps = CVector::Zero(static_cast<Index>(layout.dimension()));
        amps(static_cast<Index>(index)) = 1.0;
        return QuantumState(layout, std::move(amps));
    }

    /// Normalizes `raw`; the dropped norm is multiplied into the scale.
    static QuantumState from_unnormalized(const RegisterLayout &layout, const CVector &raw,
                                          double extra_scale = 1.0) {
        const double n = raw.norm();
        if (!(n > 0.0) || !std::isfinite(n)) {
            throw EncodingError("cannot normalize a zero or non-finite amplitude vector");
        }
        return QuantumState(layout, raw / n, extra_scale * n);
    }

    const RegisterLayout &layout() const noexcept { return layout_; }
    const CVector &amplitudes() const noexcept { return amps_; }
    double global_scale() const noexcept { return scale_; }
    int qubits() const noexcept { return layout_.total_qubits(); }
    std::uint64_t dimension() const noexcept { return layout_.dimension(); }
    Complex amplitude(std::uint64_t index) const { return amps_(static_cast<Index>(index)); }

    /// Raw access for in-place gate kernels; callers keep the norm intact.
    CVector &mutable_amplitudes() noexcept { return amps_; }

    QuantumState with_scale(double scale) const { return QuantumState(layout_, amps_, scale); }

    /// This state (high bits) tensored with `lower` (low bits).
    QuantumState tensor(const QuantumState &lower) const {
        const Index nl = lower.amps_.size();
        CVector out(amps_.size() * nl);
        for (Index i = 0; i < amps_.size(); ++i) {
            out.segment(i * nl, nl) = amps_(i) * lower.amps_;
        }
        return QuantumState(layout_.concatenated(lower.layout_), std::move(out), scale_ * lower.scale_);
    }

    /// Appends a register initialised to |value>.
    QuantumState with_register(Register reg, std::uint64_t value = 0) const {
        const RegisterLayout extra{reg};
        return tensor(basis(extra, value));
    }

    /// Real parts of the amplitudes times the global scale.
    Vector scaled_real() const { return scale_ * amps_.real(); }

  private:
    RegisterLayout layout_;
    CVector amps_;
    double scale_ = 1.0;
};

namespace detail {

inline QuantumState encode_vector(const CVector &v, bool pad_to_power_of_two, const std::string &name) {
    if (v.size() == 0) {
        throw EncodingError("amplitude_encode: empty vector");
    }
    const int q = ceil_log2(static_cast<std::uint64_t>(v.size()));
    const Index dim = Index{1} << q;
    if (dim != v.size() && !pad_to_power_of_two) {
        throw EncodingError("amplitude_encode: length " + std::to_string(v.size()) +
                            " is not a power of two and padding is disabled");
    }
    CVector padded = CVector::Zero(dim);
    padded.head(v.size()) = v;
    if (!(padded.norm() > 0.0)) {
        throw EncodingError("amplitude_encode: zero vector");
    }
    return QuantumState::from_unnormalized(RegisterLayout{{name, q}}, padded);
}

} // namespace detail

/// Encodes v / ||v|| into a register `name`, zero-padding to a power of two.
/// Accepts real or complex vectors.
template <class Derived>
QuantumState amplitude_encode(const Eigen::MatrixBase<Derived> &v, bool pad_to_power_of_two = true,
                              const std::string &name = "q") {
    return detail::encode_vector(v.template cast<Complex>(), pad_to_power_of_two, name);
}

/// |psi_X> = sum_{i,m} x_{mi} |i>|m> / ||X||_F with index register `index_name`
/// over the n columns and data register `data_name` over the D rows.
inline QuantumState encode_matrix(const Matrix &x, const std::string &index_name = "i",
                                  const std::string &data_name = "m") {
    const int qi = ceil_log2(static_cast<std::uint64_t>(x.cols()));
    const int qm = ceil_log2(static_cast<std::uint64_t>(x.rows()));
    const RegisterLayout layout{{index_name, qi}, {data_name, qm}};
    const Index dm = Index{1} << qm;
    CVector raw = CVector::Zero(static_cast<Index>(layout.dimension()));
    for (Index i = 0; i < x.cols(); ++i) {
        for (Index m = 0; m < x.rows(); ++m) {
            raw(i * dm + m) = x(m, i);
        }
    }
    if (!(raw.norm() > 0.0)) {
        throw EncodingError("encode_matrix: zero matrix");
    }
    return QuantumState::from_unnormalized(layout, raw);
}

/// Inverse of encode_matrix: scale * amplitudes read back as a rows x cols matrix.
inline Matrix decode_matrix(const QuantumState &s, const std::string &index_name, const std::string &data_name,
                            Index rows, Index cols) {
    const auto &layout = s.layout();
    if (layout.registers().size() != 2 || layout.registers()[0].name != index_name ||
        layout.registers()[1].name != data_name) {
        throw ShapeError("decode_matrix: layout must be (" + index_name + ", " + data_name + ")");
    }
    const Index dm = Index{1} << layout.width(data_name);
    if (rows > dm || cols > (Index{1} << layout.width(index_name))) {
        throw ShapeError("decode_matrix: requested shape exceeds the registers");
    }
    Matrix out(rows, cols);
    for (Index i = 0; i < cols; ++i) {
        for (Index m = 0; m < rows; ++m) {
            out(m, i) = s.global_scale() * s.amplitudes()(i * dm + m).real();
        }
    }
    return out;
}

inline Complex inner_product(const QuantumState &a, const QuantumState &b) {
    if (a.dimension() != b.dimension()) {
        throw ShapeError("inner_product: dimensions differ");
    }
    return a.amplitudes().dot(b.amplitudes());
}

} // namespace subalign::quantum
