#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "subalign/classical/kernels.hpp"
#include "subalign/datasets.hpp"
#include "subalign/error.hpp"
#include "subalign/quantum/amplitude_estimation.hpp"
#include "subalign/quantum/phase_estimation.hpp"

namespace subalign::harness {

/// Bad configuration value; names the offending key.
class UsageError : public ConfigError {
  public:
    UsageError(const std::string &field, const std::string &what)
        : ConfigError(field + ": " + what), field_(field) {}
    const std::string &field() const noexcept { return field_; }

  private:
    std::string field_;
};

enum class Track { classical, quantum, both };
enum class Classifier { nn, svm, both };

struct QuantumKnobs {
    int precision_qubits = 8;
    int hhl_precision_qubits = 10;
    int ae_bits = 7;
    int shots = 1024;
    int repeats = 15;
    bool exact_theta = true;
    bool sampled = false;               ///< false: exact expectation values
    std::vector<int> precision_sweep;   ///< empty: no sweep
};

/// Flat key=value experiment description.
struct ExperimentConfig {
    std::string dataset = "synth";      ///< "synth" or "csv"
    SynthSpec synth;
    std::string source_csv;
    std::string target_csv;
    std::optional<int> source_label_column;
    std::optional<int> target_label_column;
    int d = 1;
    Track track = Track::classical;
    Classifier classifier = Classifier::nn;
    std::optional<std::string> kernel;
    QuantumKnobs quantum;
    double gamma = 1.0;
    std::vector<std::uint64_t> seeds{0};
    int workers = 1;
    std::string output_dir = "out";

    bool runs_classical() const { return track != Track::quantum; }
    bool runs_quantum() const { return track != Track::classical; }
    bool runs_nn() const { return classifier != Classifier::svm; }
    bool runs_svm() const { return classifier != Classifier::nn; }
};

namespace detail {

inline std::string trim_copy(std::string_view s) { return std::string(subalign::detail::trim(s)); }

template <class T> T parse_integer(const std::string &key, const std::string &value) {
    T out{};
    const auto *first = value.data();
    const auto *last = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last) {
        throw UsageError(key, "expected an integer, got '" + value + "'");
    }
    return out;
}

inline double parse_real(const std::string &key, const std::string &value) {
    const auto v = subalign::detail::parse_number(value);
    if (!v || !std::isfinite(*v)) {
        throw UsageError(key, "expected a finite number, got '" + value + "'");
    }
    return *v;
}

inline bool parse_bool(const std::string &key, const std::string &value) {
    if (value == "true" || value == "1" || value == "yes") {
        return true;
    }
    if (value == "false" || value == "0" || value == "no") {
        return false;
    }
    throw UsageError(key, "expected true or false, got '" + value + "'");
}

inline std::vector<std::string> split_list(const std::string &value) {
    std::vector<std::string> out;
    for (auto cell : subalign::detail::split_commas(value)) {
        const auto t = trim_copy(cell);
        if (!t.empty()) {
            out.push_back(t);
        }
    }
    return out;
}

/// "0,3,5" or "0-9" or a mix.
inline std::vector<std::uint64_t> parse_seeds(const std::string &key, const std::string &value) {
    std::vector<std::uint64_t> out;
    for (const auto &item : split_list(value)) {
        const auto dash = item.find('-');
        if (dash == std::string::npos) {
            out.push_back(parse_integer<std::uint64_t>(key, item));
            continue;
        }
        const auto lo = parse_integer<std::uint64_t>(key, trim_copy(item.substr(0, dash)));
        const auto hi = parse_integer<std::uint64_t>(key, trim_copy(item.substr(dash + 1)));
        if (hi < lo || hi - lo >= 100000) {
            throw UsageError(key, "bad seed range '" + item + "'");
        }
        for (auto s = lo; s <= hi; ++s) {
            out.push_back(s);
        }
    }
    return out;
}

} // namespace detail

/// Apply one key. Unknown keys are usage errors.
inline void set_config_value(ExperimentConfig &cfg, const std::string &key, const std::string &value) {
    using namespace detail;
    auto &s = cfg.synth;
    auto &q = cfg.quantum;
    if (key == "dataset") {
        if (value != "synth" && value != "csv") {
            throw UsageError(key, "expected synth or csv, got '" + value + "'");
        }
        cfg.dataset = value;
    } else if (key == "dataset.D") {
        s.D = parse_integer<int>(key, value);
    } else if (key == "dataset.n_s") {
        s.n_s = parse_integer<int>(key, value);
    } else if (key == "dataset.n_t") {
        s.n_t = parse_integer<int>(key, value);
    } else if (key == "dataset.classes") {
        s.class_count = parse_integer<int>(key, value);
    } else if (key == "dataset.separation") {
        s.class_separation = parse_real(key, value);
    } else if (key == "dataset.noise") {
        s.noise_sigma = parse_real(key, value);
    } else if (key == "dataset.rotation") {
        s.domain_shift.rotation_angle = parse_real(key, value);
    } else if (key == "dataset.scale") {
        s.domain_shift.scale = parse_real(key, value);
    } else if (key == "dataset.translation") {
        const auto cells = split_list(value);
        s.domain_shift.translation = Vector(static_cast<Index>(cells.size()));
        for (std::size_t i = 0; i < cells.size(); ++i) {
            s.domain_shift.translation(static_cast<Index>(i)) = parse_real(key, cells[i]);
        }
    } else if (key == "dataset.source") {
        cfg.source_csv = value;
    } else if (key == "dataset.target") {
        cfg.target_csv = value;
    } else if (key == "dataset.source_label_column") {
        cfg.source_label_column = parse_integer<int>(key, value);
    } else if (key == "dataset.target_label_column") {
        cfg.target_label_column = parse_integer<int>(key, value);
    } else if (key == "d") {
        cfg.d = parse_integer<int>(key, value);
    } else if (key == "track") {
        if (value == "classical") {
            cfg.track = Track::classical;
        } else if (value == "quantum") {
            cfg.track = Track::quantum;
        } else if (value == "both") {
            cfg.track = Track::both;
        } else {
            throw UsageError(key, "expected classical, quantum or both, got '" + value + "'");
        }
    } else if (key == "classifier") {
        if (value == "nn") {
            cfg.classifier = Classifier::nn;
        } else if (value == "svm") {
            cfg.classifier = Classifier::svm;
        } else if (value == "both") {
            cfg.classifier = Classifier::both;
        } else {
            throw UsageError(key, "expected nn, svm or both, got '" + value + "'");
        }
    } else if (key == "kernel") {
        cfg.kernel = value.empty() || value == "none" ? std::nullopt : std::optional<std::string>(value);
    } else if (key == "gamma") {
        cfg.gamma = parse_real(key, value);
    } else if (key == "seeds") {
        cfg.seeds = parse_seeds(key, value);
    } else if (key == "workers") {
        cfg.workers = parse_integer<int>(key, value);
    } else if (key == "output_dir") {
        cfg.output_dir = value;
    } else if (key == "quantum.precision_qubits") {
        q.precision_qubits = parse_integer<int>(key, value);
    } else if (key == "quantum.hhl_precision_qubits") {
        q.hhl_precision_qubits = parse_integer<int>(key, value);
    } else if (key == "quantum.ae_bits") {
        q.ae_bits = parse_integer<int>(key, value);
    } else if (key == "quantum.shots") {
        q.shots = parse_integer<int>(key, value);
    } else if (key == "quantum.repeats") {
        q.repeats = parse_integer<int>(key, value);
    } else if (key == "quantum.exact_theta") {
        q.exact_theta = parse_bool(key, value);
    } else if (key == "quantum.mode") {
        if (value != "exact" && value != "sampled") {
            throw UsageError(key, "expected exact or sampled, got '" + value + "'");
        }
        q.sampled = value == "sampled";
    } else if (key == "quantum.precision_sweep") {
        q.precision_sweep.clear();
        for (const auto &cell : split_list(value)) {
            q.precision_sweep.push_back(parse_integer<int>(key, cell));
        }
    } else {
        throw UsageError(key, "unknown configuration key");
    }
}

/// Lines are `key = value`; `#` starts a comment.
inline void parse_config(std::istream &in, ExperimentConfig &cfg) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const auto text = detail::trim_copy(line);
        if (text.empty()) {
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw ParseError("expected key = value", line_no);
        }
        set_config_value(cfg, detail::trim_copy(text.substr(0, eq)), detail::trim_copy(text.substr(eq + 1)));
    }
}

inline ExperimentConfig parse_config(const std::string &text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    parse_config(in, cfg);
    return cfg;
}

/// SUBALIGN_QUANTUM_SHOTS=... overrides quantum.shots; dots become underscores
/// and the key is upper-cased. `env` is a list of NAME=VALUE strings.
inline void apply_env_overrides(ExperimentConfig &cfg, const std::vector<std::string> &env) {
    static const std::vector<std::string> keys{
        "dataset", "dataset.D", "dataset.n_s", "dataset.n_t", "dataset.classes", "dataset.separation",
        "dataset.noise", "dataset.rotation", "dataset.scale", "dataset.translation", "dataset.source",
        "dataset.target", "dataset.source_label_column", "dataset.target_label_column", "d", "track",
        "classifier", "kernel", "gamma", "seeds", "workers", "output_dir", "quantum.precision_qubits",
        "quantum.hhl_precision_qubits", "quantum.ae_bits", "quantum.shots", "quantum.repeats", "quantum.exact_theta", "quantum.mode",
        "quantum.precision_sweep"};
    std::map<std::string, std::string> by_env;
    for (const auto &k : keys) {
        std::string name = "SUBALIGN_";
        for (char c : k) {
            name += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        }
        by_env[name] = k;
    }
    for (const auto &entry : env) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos || entry.rfind("SUBALIGN_", 0) != 0) {
            continue;
        }
        const auto it = by_env.find(entry.substr(0, eq));
        if (it == by_env.end()) {
            throw UsageError(entry.substr(0, eq), "unknown override variable");
        }
        set_config_value(cfg, it->second, entry.substr(eq + 1));
    }
}

/// Checks that do not need the data. Data-dependent ones (d vs D for CSV
/// input, register budgets) run when the dataset is loaded.
inline void validate(const ExperimentConfig &cfg) {
    if (cfg.seeds.empty()) {
        throw UsageError("seeds", "at least one seed is required");
    }
    if (cfg.d < 1) {
        throw UsageError("d", "must be >= 1");
    }
    if (cfg.dataset == "synth") {
        try {
            cfg.synth.validate();
        } catch (const ConfigError &e) {
            throw UsageError("dataset", e.what());
        }
        if (cfg.d > cfg.synth.D) {
            throw UsageError("d", "d = " + std::to_string(cfg.d) + " exceeds D = " + std::to_string(cfg.synth.D));
        }
        if (cfg.runs_svm() && cfg.synth.class_count != 2) {
            throw UsageError("classifier", "svm needs dataset.classes = 2");
        }
    } else if (cfg.source_csv.empty() || cfg.target_csv.empty()) {
        throw UsageError("dataset.source", "csv datasets need dataset.source and dataset.target");
    } else if (!cfg.source_label_column) {
        throw UsageError("dataset.source_label_column", "required for csv datasets");
    }
    if (!(cfg.gamma > 0.0)) {
        throw UsageError("gamma", "must be > 0 (use a large value for the unregularized limit)");
    }
    if (cfg.workers < 1) {
        throw UsageError("workers", "must be >= 1");
    }
    if (cfg.output_dir.empty()) {
        throw UsageError("output_dir", "must not be empty");
    }
    const auto &q = cfg.quantum;
    auto check_precision = [](const std::string &key, int n) {
        if (n < 1 || n > quantum::kMaxPrecisionQubits) {
            throw UsageError(key, "must be in 1.." + std::to_string(quantum::kMaxPrecisionQubits));
        }
    };
    check_precision("quantum.precision_qubits", q.precision_qubits);
    check_precision("quantum.hhl_precision_qubits", q.hhl_precision_qubits);
    for (int n : q.precision_sweep) {
        check_precision("quantum.precision_sweep", n);
    }
    if (q.ae_bits < 1 || q.ae_bits > quantum::kMaxAeBits) {
        throw UsageError("quantum.ae_bits", "must be in 1.." + std::to_string(quantum::kMaxAeBits));
    }
    if (q.shots < 1) {
        throw UsageError("quantum.shots", "must be >= 1");
    }
    if (q.repeats < 1) {
        throw UsageError("quantum.repeats", "must be >= 1");
    }
    if (cfg.kernel) {
        try {
            (void)parse_kernel_spec(*cfg.kernel, cfg.dataset == "synth" ? cfg.synth.D : 1);
        } catch (const ConfigError &e) {
            throw UsageError("kernel", e.what());
        }
    }
}

inline std::string to_string(Track t) {
    return t == Track::classical ? "classical" : t == Track::quantum ? "quantum" : "both";
}

inline std::string to_string(Classifier c) { return c == Classifier::nn ? "nn" : c == Classifier::svm ? "svm" : "both"; }

/// Echo of the effective configuration, as flat keys.
inline nlohmann::json config_echo(const ExperimentConfig &cfg) {
    nlohmann::json j;
    j["dataset"] = cfg.dataset;
    if (cfg.dataset == "synth") {
        j["dataset.D"] = cfg.synth.D;
        j["dataset.n_s"] = cfg.synth.n_s;
        j["dataset.n_t"] = cfg.synth.n_t;
        j["dataset.classes"] = cfg.synth.class_count;
        j["dataset.separation"] = cfg.synth.class_separation;
        j["dataset.noise"] = cfg.synth.noise_sigma;
        j["dataset.rotation"] = cfg.synth.domain_shift.rotation_angle;
        j["dataset.scale"] = cfg.synth.domain_shift.scale;
        std::vector<double> tr(cfg.synth.domain_shift.translation.data(),
                               cfg.synth.domain_shift.translation.data() + cfg.synth.domain_shift.translation.size());
        j["dataset.translation"] = tr;
    } else {
        j["dataset.source"] = cfg.source_csv;
        j["dataset.target"] = cfg.target_csv;
        j["dataset.source_label_column"] = *cfg.source_label_column;
        j["dataset.target_label_column"] =
            cfg.target_label_column ? nlohmann::json(*cfg.target_label_column) : nlohmann::json(nullptr);
    }
    j["d"] = cfg.d;
    j["track"] = to_string(cfg.track);
    j["classifier"] = to_string(cfg.classifier);
    j["kernel"] = cfg.kernel ? nlohmann::json(*cfg.kernel) : nlohmann::json(nullptr);
    j["gamma"] = cfg.gamma;
    j["seeds"] = cfg.seeds;
    j["workers"] = cfg.workers;
    j["output_dir"] = cfg.output_dir;
    j["quantum.precision_qubits"] = cfg.quantum.precision_qubits;
    j["quantum.hhl_precision_qubits"] = cfg.quantum.hhl_precision_qubits;
    j["quantum.ae_bits"] = cfg.quantum.ae_bits;
    j["quantum.shots"] = cfg.quantum.shots;
    j["quantum.repeats"] = cfg.quantum.repeats;
    j["quantum.exact_theta"] = cfg.quantum.exact_theta;
    j["quantum.mode"] = cfg.quantum.sampled ? "sampled" : "exact";
    j["quantum.precision_sweep"] = cfg.quantum.precision_sweep;
    return j;
}

} // namespace subalign::harness
