// subalign: batch runner for classical and quantum subspace-alignment experiments.
//
// Exit status: 0 success, 1 runtime or cap error, 2 usage/config error,
// 3 parity failure (only with --require-parity).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "subalign/subalign.hpp"

extern char **environ;

namespace {

using namespace subalign;
using namespace subalign::harness;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitParity = 3;

std::vector<std::string> environment() {
    std::vector<std::string> out;
    for (char **e = environ; e != nullptr && *e != nullptr; ++e) {
        out.emplace_back(*e);
    }
    return out;
}

/// Config file, then SUBALIGN_* variables, then --set overrides.
ExperimentConfig load_config(const std::string &path, const std::vector<std::string> &sets) {
    ExperimentConfig cfg;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) {
            throw ConfigError("cannot open config file '" + path + "'");
        }
        parse_config(in, cfg);
    }
    apply_env_overrides(cfg, environment());
    for (const auto &kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("--set expects key=value, got '" + kv + "'");
        }
        set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    validate(cfg);
    return cfg;
}

int cmd_synth(const ExperimentConfig &cfg, const std::string &out_dir, std::uint64_t seed) {
    if (cfg.dataset != "synth") {
        throw UsageError("dataset", "synth needs dataset = synth");
    }
    SynthSpec spec = cfg.synth;
    spec.seed = seed;
    const auto [source, target] = synth_shifted_gaussians(spec);
    std::filesystem::create_directories(out_dir);
    save_csv(source, out_dir + "/source.csv");
    // The truth file keeps target labels for later scoring with dataset.target_label_column.
    save_csv(Domain(target.samples(), Evaluator::truth(target), "target"), out_dir + "/target.csv");
    std::printf("wrote %s/source.csv (%ld samples) and %s/target.csv (%ld samples); label column %d\n",
                out_dir.c_str(), static_cast<long>(source.size()), out_dir.c_str(),
                static_cast<long>(target.size()), saved_label_column(source));
    return 0;
}

void print_accuracy(const RunReport &r) {
    std::map<std::string, std::pair<double, int>> sums;
    for (const auto &a : r.accuracy) {
        auto &s = sums[a.track + "/" + a.classifier];
        s.first += a.accuracy;
        s.second += 1;
    }
    for (const auto &[k, s] : sums) {
        std::printf("%-16s mean accuracy %.4f over %d seeds\n", k.c_str(), s.first / s.second, s.second);
    }
    std::size_t passed = 0;
    for (const auto &p : r.parity) {
        passed += p.pass ? 1 : 0;
    }
    if (!r.parity.empty()) {
        std::printf("parity records: %zu/%zu within tolerance\n", passed, r.parity.size());
    }
    for (const auto &w : r.warnings) {
        std::printf("warning: %s\n", w.c_str());
    }
}

int cmd_run(const ExperimentConfig &cfg, bool require_parity) {
    const RunReport report = run(cfg);
    write_outputs(report, cfg.output_dir);
    print_accuracy(report);
    std::printf("outputs in %s\n", cfg.output_dir.c_str());
    if (require_parity) {
        for (const auto &p : report.parity) {
            if (!p.pass) {
                return kExitParity;
            }
        }
    }
    return 0;
}

std::string sibling_dir(const std::string &report_path, const std::string &out) {
    if (!out.empty()) {
        return out;
    }
    const auto parent = std::filesystem::path(report_path).parent_path();
    return parent.empty() ? "." : parent.string();
}

int cmd_compare(const std::string &report_path, const std::string &out) {
    const CompareSummary s = compare_tracks(load_report(report_path));
    const std::string dir = sibling_dir(report_path, out);
    std::filesystem::create_directories(dir);
    std::ofstream csv(dir + "/" + kCompareFile);
    if (!csv) {
        throw ConfigError("cannot write " + dir + "/" + kCompareFile);
    }
    write_compare_csv(csv, s);
    print_compare(std::cout, s);
    return 0;
}

int cmd_report(const std::string &report_path, const std::string &out) {
    const RunReport r = load_report(report_path);
    const std::string dir = sibling_dir(report_path, out);
    std::filesystem::create_directories(dir);
    auto write = [&](const char *name, auto fn) {
        std::ofstream f(dir + "/" + name);
        if (!f) {
            throw ConfigError("cannot write " + dir + "/" + name);
        }
        fn(f, r);
    };
    write(kAccuracyFile, write_accuracy_csv);
    write(kParityFile, write_parity_csv);
    write(kSweepFile, write_sweep_csv);
    print_accuracy(r);
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Classical and quantum subspace-alignment experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> sets;
    std::string out_dir = "data";
    std::uint64_t seed = 0;
    auto *synth = app.add_subcommand("synth", "Write a synthetic source/target pair as CSV");
    synth->add_option("-c,--config", config_path, "Config file (key = value lines)");
    synth->add_option("--set", sets, "Override a config key, e.g. --set dataset.D=4");
    synth->add_option("-o,--out", out_dir, "Output directory");
    synth->add_option("--seed", seed, "Dataset seed");

    bool require_parity = false;
    auto *run_cmd = app.add_subcommand("run", "Run an experiment and write report, accuracy and parity files");
    run_cmd->add_option("-c,--config", config_path, "Config file (key = value lines)");
    run_cmd->add_option("--set", sets, "Override a config key, e.g. --set quantum.shots=4096");
    run_cmd->add_flag("--require-parity", require_parity, "Exit with status 3 if any parity record fails");

    std::string report_path;
    std::string report_out;
    auto *compare = app.add_subcommand("compare", "Summarize classical vs quantum agreement from a report");
    compare->add_option("report", report_path, "Path to report.v1.json")->required();
    compare->add_option("-o,--out", report_out, "Directory for compare.v1.csv (default: next to the report)");

    auto *report = app.add_subcommand("report", "Regenerate CSV tables from a report");
    report->add_option("report", report_path, "Path to report.v1.json")->required();
    report->add_option("-o,--out", report_out, "Output directory (default: next to the report)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    }

    try {
        if (*synth) {
            return cmd_synth(load_config(config_path, sets), out_dir, seed);
        }
        if (*run_cmd) {
            return cmd_run(load_config(config_path, sets), require_parity);
        }
        if (*compare) {
            return cmd_compare(report_path, report_out);
        }
        return cmd_report(report_path, report_out);
    } catch (const CapError &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    } catch (const ParseError &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const ConfigError &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
}
