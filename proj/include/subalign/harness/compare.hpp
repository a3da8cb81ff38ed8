#pragma once

#include <algorithm>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "subalign/harness/report.hpp"

namespace subalign::harness {

inline constexpr const char *kCompareFile = "compare.v1.csv";

struct ErrorSummary {
    std::string quantity;
    std::string metric;
    double max_error = 0.0;
    double tolerance = 0.0;
    std::size_t passed = 0;
    std::size_t total = 0;
};

struct TrackSummary {
    std::string classifier;
    double classical_accuracy = 0.0; ///< mean over seeds
    double quantum_accuracy = 0.0;
    double label_agreement = 0.0;    ///< mean quantum/classical label agreement
};

struct SensitivityRow {
    std::string knob;
    int value = 0;
    std::string quantity;
    double median_error = 0.0;
    bool monotone = true; ///< median no larger than at the previous knob value
};

struct CompareSummary {
    std::vector<ErrorSummary> errors;
    std::vector<TrackSummary> tracks;
    std::vector<SensitivityRow> sensitivity;
};

namespace detail {

inline double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace detail

/// Summarizes a report that ran both tracks.
inline CompareSummary compare_tracks(const RunReport &report) {
    auto has = [&](const std::string &t) {
        return std::find(report.tracks.begin(), report.tracks.end(), t) != report.tracks.end();
    };
    if (!has("classical") || !has("quantum")) {
        throw ConfigError("compare needs a report with both classical and quantum tracks; rerun with track=both");
    }
    if (report.parity.empty()) {
        throw ConfigError("report has no parity records to compare");
    }
    CompareSummary out;
    std::map<std::string, std::size_t> index;
    for (const auto &p : report.parity) {
        auto [it, fresh] = index.emplace(p.quantity, out.errors.size());
        if (fresh) {
            out.errors.push_back({p.quantity, p.metric, 0.0, p.tolerance, 0, 0});
        }
        auto &e = out.errors[it->second];
        e.max_error = std::max(e.max_error, p.metric == "rel" ? p.rel_error : p.abs_error);
        e.tolerance = std::max(e.tolerance, p.tolerance);
        e.passed += p.pass ? 1 : 0;
        ++e.total;
    }

    for (const std::string clf : {"nn", "svm"}) {
        std::vector<double> c;
        std::vector<double> q;
        for (const auto &a : report.accuracy) {
            if (a.classifier == clf && a.track == "classical") {
                c.push_back(a.accuracy);
            } else if (a.classifier == clf && a.track == "quantum") {
                q.push_back(a.accuracy);
            }
        }
        if (c.empty() || q.empty()) {
            continue;
        }
        std::vector<double> agree;
        for (const auto &p : report.parity) {
            if (p.quantity == "labels_" + clf) {
                agree.push_back(p.quantum);
            }
        }
        auto mean = [](const std::vector<double> &v) {
            double s = 0.0;
            for (double x : v) {
                s += x;
            }
            return v.empty() ? 0.0 : s / static_cast<double>(v.size());
        };
        out.tracks.push_back({clf, mean(c), mean(q), mean(agree)});
    }

    std::map<std::pair<std::string, std::string>, std::map<int, std::vector<double>>> groups;
    for (const auto &s : report.sweep) {
        groups[{s.knob, s.quantity}][s.value].push_back(s.error);
    }
    for (const auto &[key, by_value] : groups) {
        double prev = 0.0;
        bool first = true;
        for (const auto &[value, errs] : by_value) {
            const double med = detail::median_of(errs);
            out.sensitivity.push_back({key.first, value, key.second, med, first || med <= prev + 1e-12});
            prev = med;
            first = false;
        }
    }
    return out;
}

inline void write_compare_csv(std::ostream &out, const CompareSummary &s) {
    out << "kind,name,key,value,reference,pass\n";
    for (const auto &e : s.errors) {
        out << "error," << e.quantity << ",max_" << e.metric << "_error," << detail::num(e.max_error) << ','
            << detail::num(e.tolerance) << ',' << (e.passed == e.total ? "true" : "false") << '\n';
    }
    for (const auto &t : s.tracks) {
        out << "agreement," << t.classifier << ",label_agreement," << detail::num(t.label_agreement) << ",1,"
            << (t.label_agreement == 1.0 ? "true" : "false") << '\n';
        out << "accuracy," << t.classifier << ",quantum_minus_classical,"
            << detail::num(t.quantum_accuracy - t.classical_accuracy) << ',' << detail::num(t.classical_accuracy)
            << ",\n";
    }
    for (const auto &r : s.sensitivity) {
        out << "sensitivity," << r.quantity << ',' << r.knob << '=' << r.value << ',' << detail::num(r.median_error)
            << ",," << (r.monotone ? "true" : "false") << '\n';
    }
}

/// Plain-text rendering for the terminal.
inline void print_compare(std::ostream &out, const CompareSummary &s) {
    char line[256];
    out << "quantity              metric  max error     tolerance   passed\n";
    for (const auto &e : s.errors) {
        std::snprintf(line, sizeof line, "%-21s %-7s %-13.4g %-11.4g %zu/%zu\n", e.quantity.c_str(), e.metric.c_str(),
                      e.max_error, e.tolerance, e.passed, e.total);
        out << line;
    }
    for (const auto &t : s.tracks) {
        std::snprintf(line, sizeof line, "%s: classical %.4f, quantum %.4f, label agreement %.4f\n",
                      t.classifier.c_str(), t.classical_accuracy, t.quantum_accuracy, t.label_agreement);
        out << line;
    }
    for (const auto &r : s.sensitivity) {
        std::snprintf(line, sizeof line, "%s %s=%d median %.4g%s\n", r.quantity.c_str(), r.knob.c_str(), r.value,
                      r.median_error, r.monotone ? "" : " (increased)");
        out << line;
    }
}

} // namespace subalign::harness
