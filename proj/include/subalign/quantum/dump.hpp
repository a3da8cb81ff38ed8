#pragma once

#include <string>

#include <json.hpp>

#include "subalign/quantum/state.hpp"

namespace subalign::quantum {

inline nlohmann::json layout_to_json(const RegisterLayout &layout) {
    nlohmann::json regs = nlohmann::json::array();
    for (const auto &r : layout.registers()) {
        regs.push_back({{"name", r.name}, {"qubits", r.qubits}});
    }
    return regs;
}

inline RegisterLayout layout_from_json(const nlohmann::json &j) {
    std::vector<Register> regs;
    for (const auto &r : j) {
        regs.push_back({r.at("name").get<std::string>(), r.at("qubits").get<int>()});
    }
    return RegisterLayout(std::move(regs));
}

/// Debug dump: layout, scale and the nonzero amplitudes as [index, re, im].
inline nlohmann::json state_to_json(const QuantumState &s, double threshold = 0.0) {
    nlohmann::json amps = nlohmann::json::array();
    for (std::uint64_t i = 0; i < s.dimension(); ++i) {
        const Complex a = s.amplitude(i);
        if (std::abs(a) > threshold) {
            amps.push_back({i, a.real(), a.imag()});
        }
    }
    return {{"schema", "subalign.state/1"},
            {"layout", layout_to_json(s.layout())},
            {"global_scale", s.global_scale()},
            {"amplitudes", std::move(amps)}};
}

inline QuantumState state_from_json(const nlohmann::json &j) {
    const RegisterLayout layout = layout_from_json(j.at("layout"));
    CVector amps = CVector::Zero(static_cast<Index>(layout.dimension()));
    for (const auto &e : j.at("amplitudes")) {
        const auto i = e.at(0).get<std::uint64_t>();
        if (i >= layout.dimension()) {
            throw ShapeError("state JSON: basis index outside the layout");
        }
        amps(static_cast<Index>(i)) = Complex(e.at(1).get<double>(), e.at(2).get<double>());
    }
    return QuantumState(layout, std::move(amps), j.at("global_scale").get<double>());
}

} // namespace subalign::quantum
