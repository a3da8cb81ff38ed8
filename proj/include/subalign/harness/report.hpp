#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "subalign/harness/run.hpp"

namespace subalign::harness {

inline constexpr const char *kReportFile = "report.v1.json";
inline constexpr const char *kAccuracyFile = "accuracy.v1.csv";
inline constexpr const char *kParityFile = "parity.v1.csv";
inline constexpr const char *kSweepFile = "sweep.v1.csv";
inline constexpr const char *kTraceFile = "trace.v1.jsonl";

inline nlohmann::json to_json(const RunReport &r) {
    nlohmann::json j;
    j["schema"] = r.schema;
    j["config"] = r.config;
    j["tracks"] = r.tracks;
    auto &acc = j["accuracy"] = nlohmann::json::array();
    for (const auto &a : r.accuracy) {
        acc.push_back({{"seed", a.seed}, {"track", a.track}, {"classifier", a.classifier}, {"accuracy", a.accuracy}});
    }
    auto &par = j["parity"] = nlohmann::json::array();
    for (const auto &p : r.parity) {
        par.push_back({{"seed", p.seed},
                       {"quantity", p.quantity},
                       {"classical", p.classical},
                       {"quantum", p.quantum},
                       {"abs_error", p.abs_error},
                       {"rel_error", p.rel_error},
                       {"metric", p.metric},
                       {"tolerance", p.tolerance},
                       {"pass", p.pass},
                       {"precision", p.precision}});
    }
    auto &sw = j["sweep"] = nlohmann::json::array();
    for (const auto &s : r.sweep) {
        sw.push_back({{"seed", s.seed}, {"knob", s.knob}, {"value", s.value}, {"quantity", s.quantity}, {"error", s.error}});
    }
    auto &tm = j["timings"] = nlohmann::json::array();
    for (const auto &t : r.timings) {
        tm.push_back({{"seed", t.seed}, {"stage", t.stage}, {"seconds", t.seconds}});
    }
    j["warnings"] = r.warnings;
    return j;
}

inline RunReport report_from_json(const nlohmann::json &j) {
    if (!j.is_object() || j.value("schema", std::string{}) != kReportSchema) {
        throw ConfigError(std::string("not a run report (expected schema ") + kReportSchema + ")");
    }
    RunReport r;
    try {
        r.config = j.at("config");
        r.tracks = j.at("tracks").get<std::vector<std::string>>();
        for (const auto &a : j.at("accuracy")) {
            r.accuracy.push_back({a.at("seed").get<std::uint64_t>(), a.at("track").get<std::string>(),
                                  a.at("classifier").get<std::string>(), a.at("accuracy").get<double>()});
        }
        for (const auto &p : j.at("parity")) {
            ParityRecord rec;
            rec.seed = p.at("seed").get<std::uint64_t>();
            rec.quantity = p.at("quantity").get<std::string>();
            rec.classical = p.at("classical").get<double>();
            rec.quantum = p.at("quantum").get<double>();
            rec.abs_error = p.at("abs_error").get<double>();
            rec.rel_error = p.at("rel_error").get<double>();
            rec.metric = p.at("metric").get<std::string>();
            rec.tolerance = p.at("tolerance").get<double>();
            rec.pass = p.at("pass").get<bool>();
            rec.precision = p.at("precision").get<std::string>();
            r.parity.push_back(std::move(rec));
        }
        for (const auto &s : j.at("sweep")) {
            r.sweep.push_back({s.at("seed").get<std::uint64_t>(), s.at("knob").get<std::string>(),
                               s.at("value").get<int>(), s.at("quantity").get<std::string>(),
                               s.at("error").get<double>()});
        }
        for (const auto &t : j.value("timings", nlohmann::json::array())) {
            r.timings.push_back({t.at("seed").get<std::uint64_t>(), t.at("stage").get<std::string>(),
                                 t.at("seconds").get<double>()});
        }
        r.warnings = j.value("warnings", std::vector<std::string>{});
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("malformed run report: ") + e.what());
    }
    return r;
}

inline RunReport load_report(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open report '" + path + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError("report '" + path + "' is not valid JSON: " + e.what());
    }
    return report_from_json(j);
}

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

inline void write_accuracy_csv(std::ostream &out, const RunReport &r) {
    out << "seed,track,classifier,accuracy\n";
    for (const auto &a : r.accuracy) {
        out << a.seed << ',' << a.track << ',' << a.classifier << ',' << detail::num(a.accuracy) << '\n';
    }
}

inline void write_parity_csv(std::ostream &out, const RunReport &r) {
    out << "seed,quantity,classical,quantum,abs_error,rel_error,metric,tolerance,pass,precision\n";
    for (const auto &p : r.parity) {
        out << p.seed << ',' << p.quantity << ',' << detail::num(p.classical) << ',' << detail::num(p.quantum) << ','
            << detail::num(p.abs_error) << ',' << detail::num(p.rel_error) << ',' << p.metric << ','
            << detail::num(p.tolerance) << ',' << (p.pass ? "true" : "false") << ',' << p.precision << '\n';
    }
}

inline void write_sweep_csv(std::ostream &out, const RunReport &r) {
    out << "seed,knob,value,quantity,error\n";
    for (const auto &s : r.sweep) {
        out << s.seed << ',' << s.knob << ',' << s.value << ',' << s.quantity << ',' << detail::num(s.error) << '\n';
    }
}

namespace detail {

template <class Fn> void write_file(const std::filesystem::path &path, Fn &&fn) {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot write '" + path.string() + "'");
    }
    fn(out);
}

} // namespace detail

/// Writes the report and its tables under `dir`.
inline void write_outputs(const RunReport &r, const std::string &dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw ConfigError("cannot create output_dir '" + dir + "': " + ec.message());
    }
    const fs::path base(dir);
    detail::write_file(base / kReportFile, [&](std::ostream &o) { o << to_json(r).dump(2) << '\n'; });
    detail::write_file(base / kAccuracyFile, [&](std::ostream &o) { write_accuracy_csv(o, r); });
    detail::write_file(base / kParityFile, [&](std::ostream &o) { write_parity_csv(o, r); });
    detail::write_file(base / kSweepFile, [&](std::ostream &o) { write_sweep_csv(o, r); });
    if (!r.trace.empty()) {
        detail::write_file(base / kTraceFile, [&](std::ostream &o) {
            for (const auto &t : r.trace) {
                o << t.dump() << '\n';
            }
        });
    }
}

} // namespace subalign::harness
