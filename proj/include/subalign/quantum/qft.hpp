#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "subalign/linalg.hpp"
#include "subalign/quantum/state.hpp"

namespace subalign::quantum {

/// In-place radix-2 DFT of a length-2^k buffer: out_k = sum_j e^{sign 2 pi i jk/N} in_j / sqrt(N).
inline void unitary_dft(CVector &buf, int sign) {
    const Index n = buf.size();
    for (Index i = 1, j = 0; i < n; ++i) {
        Index bit = n >> 1;
        for (; j & bit; bit >>= 1) {
            j ^= bit;
        }
        j ^= bit;
        if (i < j) {
            std::swap(buf(i), buf(j));
        }
    }
    for (Index len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * kPi / static_cast<double>(len);
        for (Index k = 0; k < len / 2; ++k) {
            const Complex w = std::polar(1.0, ang * static_cast<double>(k));
            for (Index s = 0; s < n; s += len) {
                const Complex u = buf(s + k);
                const Complex v = w * buf(s + k + len / 2);
                buf(s + k) = u + v;
                buf(s + k + len / 2) = u - v;
            }
        }
    }
    buf /= std::sqrt(static_cast<double>(n));
}

/// QFT|j> = N^{-1/2} sum_k e^{2 pi i jk/N}|k> on register `reg`; inverse uses e^{-...}.
inline void apply_qft(QuantumState &state, const std::string &reg, bool inverse = false) {
    const auto &layout = state.layout();
    const int w = layout.width(reg);
    if (w == 0) {
        return;
    }
    const int off = layout.offset(reg);
    const std::uint64_t rmask = ((std::uint64_t{1} << w) - 1) << off;
    const std::uint64_t rest = full_mask(layout) & ~rmask;
    const Index n = Index{1} << w;
    CVector &amps = state.mutable_amplitudes();
    CVector fiber(n);
    for_each_submask(rest, [&](std::uint64_t base) {
        for (Index t = 0; t < n; ++t) {
            fiber(t) = amps(static_cast<Index>(base | (static_cast<std::uint64_t>(t) << off)));
        }
        unitary_dft(fiber, inverse ? -1 : +1);
        for (Index t = 0; t < n; ++t) {
            amps(static_cast<Index>(base | (static_cast<std::uint64_t>(t) << off))) = fiber(t);
        }
    });
}

inline void apply_inverse_qft(QuantumState &state, const std::string &reg) { apply_qft(state, reg, true); }

} // namespace subalign::quantum
