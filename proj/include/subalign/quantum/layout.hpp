#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "subalign/error.hpp"

namespace subalign::quantum {

/// Desk-scale caps: dense statevectors up to 24 qubits, density operators up to 12.
inline constexpr int kMaxStateQubits = 24;
inline constexpr int kMaxDensityQubits = 12;

struct Register {
    std::string name;
    int qubits = 0;
};

/// Ordered list of named registers. The first register holds the most
/// significant bits of a basis index, so |i>|m> has index i * 2^{q_m} + m.
class RegisterLayout {
  public:
    RegisterLayout() = default;

    RegisterLayout(std::initializer_list<Register> regs) : RegisterLayout(std::vector<Register>(regs)) {}

    explicit RegisterLayout(std::vector<Register> regs, int cap = kMaxStateQubits) : regs_(std::move(regs)) {
        int total = 0;
        for (std::size_t i = 0; i < regs_.size(); ++i) {
            if (regs_[i].qubits < 0) {
                throw ConfigError("register '" + regs_[i].name + "' has negative width");
            }
            for (std::size_t j = 0; j < i; ++j) {
                if (regs_[j].name == regs_[i].name) {
                    throw ConfigError("duplicate register name '" + regs_[i].name + "'");
                }
            }
            total += regs_[i].qubits;
        }
        if (total > cap) {
            throw CapError("register layout needs " + std::to_string(total) + " qubits; cap is " +
                           std::to_string(cap));
        }
        total_ = total;
    }

    const std::vector<Register> &registers() const noexcept { return regs_; }
    int total_qubits() const noexcept { return total_; }
    std::uint64_t dimension() const noexcept { return std::uint64_t{1} << total_; }

    bool contains(const std::string &name) const noexcept {
        for (const auto &r : regs_) {
            if (r.name == name) {
                return true;
            }
        }
        return false;
    }

    std::size_t position(const std::string &name) const {
        for (std::size_t i = 0; i < regs_.size(); ++i) {
            if (regs_[i].name == name) {
                return i;
            }
        }
        throw ConfigError("unknown register '" + name + "'");
    }

    int width(const std::string &name) const { return regs_[position(name)].qubits; }

    /// Bit offset of the register's least significant qubit.
    int offset(const std::string &name) const {
        const std::size_t pos = position(name);
        int off = 0;
        for (std::size_t i = pos + 1; i < regs_.size(); ++i) {
            off += regs_[i].qubits;
        }
        return off;
    }

    std::uint64_t value_of(std::uint64_t index, const std::string &name) const {
        const int w = width(name);
        return (index >> offset(name)) & ((std::uint64_t{1} << w) - 1);
    }

    RegisterLayout appended(Register reg) const {
        auto regs = regs_;
        regs.push_back(std::move(reg));
        return RegisterLayout(std::move(regs));
    }

    RegisterLayout concatenated(const RegisterLayout &lower) const {
        auto regs = regs_;
        regs.insert(regs.end(), lower.regs_.begin(), lower.regs_.end());
        return RegisterLayout(std::move(regs));
    }

    RegisterLayout without(const std::string &name) const {
        const std::size_t pos = position(name);
        auto regs = regs_;
        regs.erase(regs.begin() + static_cast<std::ptrdiff_t>(pos));
        return RegisterLayout(std::move(regs));
    }

    bool operator==(const RegisterLayout &other) const {
        if (regs_.size() != other.regs_.size()) {
            return false;
        }
        for (std::size_t i = 0; i < regs_.size(); ++i) {
            if (regs_[i].name != other.regs_[i].name || regs_[i].qubits != other.regs_[i].qubits) {
                return false;
            }
        }
        return true;
    }

  private:
    std::vector<Register> regs_;
    int total_ = 0;
};

/// A set of bit positions read as one integer (positions listed LSB first),
/// with a deposit table mapping each value to its index mask.
class BitSelection {
  public:
    BitSelection() : table_{0} {}

    explicit BitSelection(std::vector<int> positions) : positions_(std::move(positions)) {
        const std::size_t size = std::size_t{1} << positions_.size();
        table_.assign(size, 0);
        for (std::size_t v = 0; v < size; ++v) {
            std::uint64_t m = 0;
            for (std::size_t b = 0; b < positions_.size(); ++b) {
                if ((v >> b) & 1U) {
                    m |= std::uint64_t{1} << positions_[b];
                }
            }
            table_[v] = m;
        }
        for (int p : positions_) {
            mask_ |= std::uint64_t{1} << p;
        }
    }

    std::size_t bits() const noexcept { return positions_.size(); }
    std::size_t size() const noexcept { return table_.size(); }
    std::uint64_t mask() const noexcept { return mask_; }
    std::uint64_t deposit(std::size_t value) const noexcept { return table_[value]; }
    const std::vector<int> &positions() const noexcept { return positions_; }

    std::uint64_t extract(std::uint64_t index) const noexcept {
        std::uint64_t v = 0;
        for (std::size_t b = 0; b < positions_.size(); ++b) {
            v |= ((index >> positions_[b]) & 1U) << b;
        }
        return v;
    }

  private:
    std::vector<int> positions_;
    std::vector<std::uint64_t> table_;
    std::uint64_t mask_ = 0;
};

/// Bits of the listed registers; the first listed register is most significant.
inline BitSelection select_registers(const RegisterLayout &layout, const std::vector<std::string> &names) {
    std::vector<int> positions;
    for (auto it = names.rbegin(); it != names.rend(); ++it) {
        const int off = layout.offset(*it);
        const int w = layout.width(*it);
        for (int b = 0; b < w; ++b) {
            positions.push_back(off + b);
        }
    }
    for (std::size_t i = 0; i < positions.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (positions[i] == positions[j]) {
                throw ConfigError("register listed twice in a selection");
            }
        }
    }
    return BitSelection(std::move(positions));
}

/// A single qubit of a register (bit 0 = least significant).
inline BitSelection select_qubit(const RegisterLayout &layout, const std::string &name, int bit) {
    if (bit < 0 || bit >= layout.width(name)) {
        throw ConfigError("qubit " + std::to_string(bit) + " outside register '" + name + "'");
    }
    return BitSelection({layout.offset(name) + bit});
}

/// Calls fn(sub) for every submask of `mask` (including 0), ascending.
template <class Fn> inline void for_each_submask(std::uint64_t mask, Fn &&fn) {
    std::uint64_t sub = 0;
    do {
        fn(sub);
        sub = (sub - mask) & mask;
    } while (sub != 0);
}

inline std::uint64_t full_mask(const RegisterLayout &layout) {
    return layout.dimension() - 1;
}

} // namespace subalign::quantum
