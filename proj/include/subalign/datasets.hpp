#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "subalign/error.hpp"
#include "subalign/linalg.hpp"

namespace subalign {

class Evaluator;

/// Capability required to read labels that adaptation code must not see.
/// Only Evaluator can mint one.
class EvaluationAccess {
    friend class Evaluator;
    EvaluationAccess() = default;
};

/// A dataset: D x n matrix whose columns are samples, optional labels.
///
/// Labels can be marked hidden (target-domain ground truth). Hidden labels are
/// only reachable through Evaluator, so adaptation code can't peek at them.
class Domain {
  public:
    Domain() = default;

    explicit Domain(Matrix samples, std::optional<std::vector<int>> labels = std::nullopt,
                    std::string name = {}, bool labels_hidden = false)
        : samples_(std::move(samples)), labels_(std::move(labels)), name_(std::move(name)),
          hidden_(labels_hidden) {
        if (samples_.rows() < 1) {
            throw ConfigError("Domain '" + name_ + "': need at least one feature (D >= 1)");
        }
        if (samples_.cols() < 2) {
            throw ConfigError("Domain '" + name_ + "': need at least two samples (n >= 2)");
        }
        if (!samples_.allFinite()) {
            throw ConfigError("Domain '" + name_ + "': samples contain NaN or Inf");
        }
        if (labels_ && static_cast<Index>(labels_->size()) != samples_.cols()) {
            throw ShapeError("Domain '" + name_ + "': " + std::to_string(labels_->size()) +
                             " labels for " + std::to_string(samples_.cols()) + " samples");
        }
        if (!labels_) {
            hidden_ = false;
        }
    }

    const Matrix &samples() const noexcept { return samples_; }
    Index dim() const noexcept { return samples_.rows(); }
    Index size() const noexcept { return samples_.cols(); }
    const std::string &name() const noexcept { return name_; }

    bool has_labels() const noexcept { return labels_.has_value() && !hidden_; }
    bool has_hidden_labels() const noexcept { return labels_.has_value() && hidden_; }

    /// Visible labels. Throws if the domain is unlabelled or its labels are hidden.
    const std::vector<int> &labels() const {
        if (!labels_) {
            throw ConfigError("Domain '" + name_ + "' has no labels");
        }
        if (hidden_) {
            throw ConfigError("Domain '" + name_ + "': labels are hidden from adaptation code");
        }
        return *labels_;
    }

    const std::vector<int> &hidden_labels(const EvaluationAccess &) const {
        if (!labels_) {
            throw ConfigError("Domain '" + name_ + "' has no labels");
        }
        return *labels_;
    }

    /// Same labels/name/visibility, new samples (must keep the sample count).
    Domain with_samples(Matrix samples) const {
        Domain out(std::move(samples), labels_, name_, hidden_);
        return out;
    }

    Domain with_hidden_labels() const { return Domain(samples_, labels_, name_, labels_.has_value()); }

  private:
    Matrix samples_;
    std::optional<std::vector<int>> labels_;
    std::string name_;
    bool hidden_ = false;
};

/// The only sanctioned reader of hidden ground truth.
class Evaluator {
  public:
    static const std::vector<int> &truth(const Domain &domain) {
        return domain.hidden_labels(EvaluationAccess{});
    }

    static double accuracy(const Domain &domain, const std::vector<int> &predicted) {
        const auto &truth_labels = truth(domain);
        if (truth_labels.size() != predicted.size()) {
            throw ShapeError("accuracy: prediction count does not match domain size");
        }
        std::size_t hits = 0;
        for (std::size_t i = 0; i < predicted.size(); ++i) {
            hits += truth_labels[i] == predicted[i] ? 1 : 0;
        }
        return static_cast<double>(hits) / static_cast<double>(predicted.size());
    }
};

// ---------------------------------------------------------------------------
// Synthetic shifted Gaussians

struct DomainShift {
    double rotation_angle = 0.0; ///< radians, rotates coordinates (0, 1)
    Vector translation;          ///< empty means zero
    double scale = 1.0;
};

struct SynthSpec {
    int D = 2;
    int n_s = 40;
    int n_t = 40;
    int class_count = 2;
    double class_separation = 4.0;
    DomainShift domain_shift;
    double noise_sigma = 1.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (D < 1) {
            throw ConfigError("SynthSpec.D must be >= 1");
        }
        if (n_s < 2 || n_t < 2) {
            throw ConfigError("SynthSpec: n_s and n_t must be >= 2");
        }
        if (class_count < 1) {
            throw ConfigError("SynthSpec.class_count must be >= 1");
        }
        if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
            throw ConfigError("SynthSpec.noise_sigma must be finite and >= 0");
        }
        const double a = domain_shift.rotation_angle;
        if (!(a >= 0.0 && a < 2.0 * kPi)) {
            throw ConfigError("SynthSpec.domain_shift.rotation_angle must lie in [0, 2pi)");
        }
        if (a != 0.0 && D < 2) {
            throw ConfigError("SynthSpec: rotation needs D >= 2");
        }
        if (domain_shift.translation.size() != 0 && domain_shift.translation.size() != D) {
            throw ConfigError("SynthSpec.domain_shift.translation must have length D");
        }
        if (!(domain_shift.scale > 0.0) || !std::isfinite(domain_shift.scale)) {
            throw ConfigError("SynthSpec.domain_shift.scale must be finite and > 0");
        }
    }
};

namespace detail {

inline int class_label(int c, int class_count) {
    if (class_count == 2) {
        return c == 0 ? -1 : +1;
    }
    return c;
}

inline Matrix draw_clusters(const SynthSpec &spec, int n, std::mt19937_64 &rng,
                            std::vector<int> &labels) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix x(spec.D, n);
    labels.resize(static_cast<std::size_t>(n));
    const double centre = 0.5 * static_cast<double>(spec.class_count - 1);
    for (int i = 0; i < n; ++i) {
        const int c = i % spec.class_count;
        labels[static_cast<std::size_t>(i)] = class_label(c, spec.class_count);
        for (int m = 0; m < spec.D; ++m) {
            x(m, i) = spec.noise_sigma * gauss(rng);
        }
        x(0, i) += spec.class_separation * (static_cast<double>(c) - centre);
    }
    return x;
}

inline Eigen::Matrix2d rotation2(double angle) {
    Eigen::Matrix2d r;
    r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return r;
}

} // namespace detail

/// Apply a DomainShift to column samples: x -> scale * R x + translation.
inline Matrix apply_shift(const DomainShift &shift, Matrix x) {
    if (shift.rotation_angle != 0.0) {
        x.topRows(2) = detail::rotation2(shift.rotation_angle) * x.topRows(2);
    }
    x *= shift.scale;
    if (shift.translation.size() != 0) {
        x.colwise() += shift.translation;
    }
    return x;
}

inline Matrix invert_shift(const DomainShift &shift, Matrix x) {
    if (shift.translation.size() != 0) {
        x.colwise() -= shift.translation;
    }
    x /= shift.scale;
    if (shift.rotation_angle != 0.0) {
        x.topRows(2) = detail::rotation2(-shift.rotation_angle) * x.topRows(2);
    }
    return x;
}

/// Labeled Gaussian class clusters for the source; the same process passed
/// through `domain_shift` for the target, whose labels are stored hidden.
/// Class c has mean separation * (c - (C-1)/2) along feature 0.
inline std::pair<Domain, Domain> synth_shifted_gaussians(const SynthSpec &spec) {
    spec.validate();
    std::seed_seq source_seed{static_cast<std::uint32_t>(spec.seed),
                              static_cast<std::uint32_t>(spec.seed >> 32), 0x5a11u};
    std::seed_seq target_seed{static_cast<std::uint32_t>(spec.seed),
                              static_cast<std::uint32_t>(spec.seed >> 32), 0x7a46u};
    std::mt19937_64 source_rng(source_seed);
    std::mt19937_64 target_rng(target_seed);

    std::vector<int> ys;
    std::vector<int> yt;
    Matrix xs = detail::draw_clusters(spec, spec.n_s, source_rng, ys);
    Matrix xt = apply_shift(spec.domain_shift, detail::draw_clusters(spec, spec.n_t, target_rng, yt));
    return {Domain(std::move(xs), std::move(ys), "source"),
            Domain(std::move(xt), std::move(yt), "target", /*labels_hidden=*/true)};
}

// ---------------------------------------------------------------------------
// Centering

struct Centered {
    Domain domain;
    Vector mean;
};

inline Matrix center_matrix(const Matrix &x, Vector *mean_out = nullptr) {
    const Vector mean = x.rowwise().mean();
    if (mean_out != nullptr) {
        *mean_out = mean;
    }
    return x.colwise() - mean;
}

/// Subtract the per-feature mean. The mean is returned so queries can be
/// shifted the same way.
inline Centered center_columns(const Domain &x) {
    Vector mean;
    Matrix centered = center_matrix(x.samples(), &mean);
    return {x.with_samples(std::move(centered)), std::move(mean)};
}

// ---------------------------------------------------------------------------
// CSV

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::optional<double> parse_number(std::string_view cell) {
    cell = trim(cell);
    if (!cell.empty() && cell.front() == '+') {
        cell.remove_prefix(1);
    }
    if (cell.empty()) {
        return std::nullopt;
    }
    double value = 0.0;
    const auto *first = cell.data();
    const auto *last = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        return std::nullopt;
    }
    return value;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return cells;
}

} // namespace detail

/// Parse CSV text where each row is one sample. A non-numeric first row is
/// treated as a header. `label_column` (0-based) is pulled out as integer labels.
inline Domain read_csv(std::istream &in, std::optional<int> label_column = std::nullopt,
                       std::string name = {}) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) {
            continue;
        }
        const auto cells = detail::split_commas(line);
        std::vector<double> values;
        values.reserve(cells.size());
        std::optional<std::size_t> bad_cell;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto v = detail::parse_number(cells[c]);
            if (!v) {
                bad_cell = bad_cell.value_or(c);
                values.push_back(0.0);
            } else {
                values.push_back(*v);
            }
        }
        if (first_content) {
            first_content = false;
            width = cells.size();
            if (bad_cell) {
                continue; // header row
            }
        }
        if (cells.size() != width) {
            throw ParseError("ragged CSV: expected " + std::to_string(width) + " cells, found " +
                                 std::to_string(cells.size()),
                             line_no);
        }
        if (bad_cell) {
            throw ParseError("non-numeric cell '" + std::string(detail::trim(cells[*bad_cell])) +
                                 "' in column " + std::to_string(*bad_cell),
                             line_no);
        }
        rows.push_back(std::move(values));
    }
    if (rows.empty()) {
        throw ParseError("CSV contains no data rows", line_no);
    }
    if (label_column && (*label_column < 0 || static_cast<std::size_t>(*label_column) >= width)) {
        throw ConfigError("label_column " + std::to_string(*label_column) + " outside 0.." +
                          std::to_string(width - 1));
    }
    const Index features = static_cast<Index>(width) - (label_column ? 1 : 0);
    Matrix x(features, static_cast<Index>(rows.size()));
    std::optional<std::vector<int>> labels;
    if (label_column) {
        labels.emplace(rows.size());
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
        Index m = 0;
        for (std::size_t c = 0; c < width; ++c) {
            if (label_column && static_cast<int>(c) == *label_column) {
                const double v = rows[r][c];
                if (v != std::round(v)) {
                    throw ParseError("label is not an integer", r + 1);
                }
                (*labels)[r] = static_cast<int>(v);
            } else {
                x(m++, static_cast<Index>(r)) = rows[r][c];
            }
        }
    }
    return Domain(std::move(x), std::move(labels), std::move(name));
}

inline Domain load_csv(const std::string &path, std::optional<int> label_column = std::nullopt) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open CSV file '" + path + "'");
    }
    return read_csv(in, label_column, path);
}

/// Write one sample per row with a header; visible labels go in a trailing
/// `label` column. Values use 17 significant digits, so reading back is exact.
inline void write_csv(std::ostream &out, const Domain &domain) {
    const bool with_labels = domain.has_labels();
    for (Index m = 0; m < domain.dim(); ++m) {
        out << (m ? "," : "") << 'x' << m;
    }
    if (with_labels) {
        out << ",label";
    }
    out << '\n';
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (Index i = 0; i < domain.size(); ++i) {
        for (Index m = 0; m < domain.dim(); ++m) {
            out << (m ? "," : "") << domain.samples()(m, i);
        }
        if (with_labels) {
            out << ',' << domain.labels()[static_cast<std::size_t>(i)];
        }
        out << '\n';
    }
}

inline void save_csv(const Domain &domain, const std::string &path) {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot write CSV file '" + path + "'");
    }
    write_csv(out, domain);
}

/// Label column index used by save_csv for a labelled domain.
inline int saved_label_column(const Domain &domain) { return static_cast<int>(domain.dim()); }

} // namespace subalign
