#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "subalign/classical/alignment.hpp"
#include "subalign/classical/kernels.hpp"
#include "subalign/classical/svm.hpp"
#include "subalign/datasets.hpp"
#include "subalign/harness/config.hpp"
#include "subalign/qsa/projection.hpp"
#include "subalign/qsa/qnn.hpp"
#include "subalign/qsa/qpca.hpp"
#include "subalign/qsa/qsvm.hpp"

namespace subalign::harness {

inline constexpr const char *kReportSchema = "subalign.report/1";

struct AccuracyRow {
    std::uint64_t seed = 0;
    std::string track;      ///< classical, quantum or kernel
    std::string classifier; ///< nn or svm
    double accuracy = 0.0;
};

/// One classical-vs-quantum comparison.
struct ParityRecord {
    std::uint64_t seed = 0;
    std::string quantity;
    double classical = 0.0;
    double quantum = 0.0;
    double abs_error = 0.0;
    double rel_error = 0.0;
    std::string metric;     ///< which error the tolerance applies to: abs or rel
    double tolerance = 0.0;
    bool pass = false;
    std::string precision;  ///< knob settings used, e.g. "n=8 exact_theta"
};

struct SweepRow {
    std::uint64_t seed = 0;
    std::string knob;
    int value = 0;
    std::string quantity;
    double error = 0.0;
};

struct StageTime {
    std::uint64_t seed = 0;
    std::string stage;
    double seconds = 0.0;
};

struct RunReport {
    std::string schema = kReportSchema;
    nlohmann::json config;
    std::vector<std::string> tracks;
    std::vector<AccuracyRow> accuracy;
    std::vector<ParityRecord> parity;
    std::vector<SweepRow> sweep;
    std::vector<StageTime> timings;
    std::vector<std::string> warnings;
    std::vector<nlohmann::json> trace; ///< per-stage quantum diagnostics, seed-tagged
};

namespace detail {

inline ParityRecord parity_scalar(std::uint64_t seed, std::string quantity, double classical, double quantum,
                                  double tolerance, std::string precision) {
    ParityRecord r;
    r.seed = seed;
    r.quantity = std::move(quantity);
    r.classical = classical;
    r.quantum = quantum;
    r.abs_error = std::abs(quantum - classical);
    r.rel_error = classical != 0.0 ? r.abs_error / std::abs(classical) : r.abs_error;
    r.metric = "abs";
    r.tolerance = tolerance;
    r.pass = r.abs_error <= tolerance;
    r.precision = std::move(precision);
    return r;
}

/// Matrices are summarized by Frobenius norms; the error is the largest entry
/// deviation, relative to the largest classical entry.
inline ParityRecord parity_matrix(std::uint64_t seed, std::string quantity, const Matrix &classical,
                                  const Matrix &quantum, double tolerance, std::string precision) {
    ParityRecord r;
    r.seed = seed;
    r.quantity = std::move(quantity);
    r.classical = classical.norm();
    r.quantum = quantum.norm();
    r.abs_error = (quantum - classical).cwiseAbs().maxCoeff();
    const double scale = classical.cwiseAbs().maxCoeff();
    r.rel_error = scale > 0.0 ? r.abs_error / scale : r.abs_error;
    r.metric = "rel";
    r.tolerance = tolerance;
    r.pass = r.rel_error <= tolerance;
    r.precision = std::move(precision);
    return r;
}

inline double agreement(const std::vector<int> &a, const std::vector<int> &b) {
    std::size_t same = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        same += a[i] == b[i] ? 1 : 0;
    }
    return a.empty() ? 1.0 : static_cast<double>(same) / static_cast<double>(a.size());
}

class Stopwatch {
  public:
    Stopwatch(std::vector<StageTime> &out, std::uint64_t seed) : out_(out), seed_(seed) {}
    void lap(const std::string &stage) {
        const auto now = std::chrono::steady_clock::now();
        out_.push_back({seed_, stage, std::chrono::duration<double>(now - last_).count()});
        last_ = now;
    }

  private:
    std::vector<StageTime> &out_;
    std::uint64_t seed_;
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

inline std::pair<Domain, Domain> load_domains(const ExperimentConfig &cfg, std::uint64_t seed) {
    if (cfg.dataset == "synth") {
        SynthSpec spec = cfg.synth;
        spec.seed = seed;
        return synth_shifted_gaussians(spec);
    }
    Domain source = load_csv(cfg.source_csv, cfg.source_label_column);
    Domain target = load_csv(cfg.target_csv, cfg.target_label_column).with_hidden_labels();
    if (!target.has_hidden_labels()) {
        throw UsageError("dataset.target_label_column", "needed to score target accuracy");
    }
    if (source.dim() != target.dim()) {
        throw UsageError("dataset.target", "feature count differs from dataset.source");
    }
    if (cfg.d > source.dim()) {
        throw UsageError("d", "d = " + std::to_string(cfg.d) + " exceeds D = " + std::to_string(source.dim()));
    }
    if (cfg.runs_svm()) {
        for (int y : source.labels()) {
            if (y != 1 && y != -1) {
                throw UsageError("classifier", "svm needs source labels in {-1, +1}");
            }
        }
    }
    return {std::move(source), std::move(target)};
}

inline std::string precision_tag(const QuantumKnobs &q) {
    return "n=" + std::to_string(q.precision_qubits) + (q.exact_theta ? " exact_theta" : " phase_estimated") +
           (q.sampled ? " shots=" + std::to_string(q.shots) : " exact_expectation");
}

inline void run_sweep(RunReport &out, const SaPipeline &sa, Index d, const std::vector<int> &precisions,
                      const quantum::ShotPlan &base, std::uint64_t seed) {
    for (int n : precisions) {
        double dist = std::sqrt(2.0 * static_cast<double>(d));
        try {
            dist = projector_distance(qsa::qpca(sa.xs, d, qsa::QpcaOptions{n, 64, base.derived(4)}).basis.P, sa.ps.P);
        } catch (const PrecisionError &) {
            // An unresolved selection scores as the largest possible distance.
        }
        out.sweep.push_back({seed, "precision_qubits", n, "qpca_projector_distance", dist});
        const auto m = qsa::matrix_product_state(sa.ps.P, sa.pt.P, qsa::MatrixProductOptions{n, false});
        out.sweep.push_back({seed, "precision_qubits", n, "m_star_max_error",
                             (m.matrix() - sa.artifacts.M_star).cwiseAbs().maxCoeff()});
    }
}

/// Everything one seed contributes to the report.
inline RunReport run_seed(const ExperimentConfig &cfg, std::uint64_t seed) {
    RunReport out;
    Stopwatch clock(out.timings, seed);
    const auto [source, target] = load_domains(cfg, seed);
    const Index d = cfg.d;
    const SaPipeline sa = subspace_alignment(source, target, d);
    const auto &labels = source.labels();
    std::vector<int> classical_nn;
    std::vector<int> classical_svm;
    SvmModel svm;
    if (cfg.runs_nn()) {
        classical_nn = nn_classify(sa.artifacts.X_hat_a, labels, sa.artifacts.X_hat_t);
    }
    if (cfg.runs_svm()) {
        svm = svm_train(sa.xs, labels, sa.artifacts.A, cfg.gamma);
        classical_svm = svm_classify_all(svm, sa.xt);
    }
    if (cfg.runs_classical()) {
        if (cfg.runs_nn()) {
            out.accuracy.push_back({seed, "classical", "nn", Evaluator::accuracy(target, classical_nn)});
        }
        if (cfg.runs_svm()) {
            out.accuracy.push_back({seed, "classical", "svm", Evaluator::accuracy(target, classical_svm)});
        }
        if (cfg.kernel) {
            const auto spec = parse_kernel_spec(*cfg.kernel, source.dim());
            out.accuracy.push_back(
                {seed, "kernel", "nn", Evaluator::accuracy(target, kernel_sa_nn_predict(source, target, d, spec))});
        }
    }
    clock.lap("classical");
    if (!cfg.runs_quantum()) {
        return out;
    }

    const auto &q = cfg.quantum;
    const quantum::ShotPlan base =
        q.sampled ? quantum::ShotPlan::sampled(q.shots, seed) : quantum::ShotPlan::exact();
    const std::string tag = precision_tag(q);

    qsa::QpcaResult qs;
    qsa::QpcaResult qt;
    try {
        qs = qsa::qpca(sa.xs, d, qsa::QpcaOptions{q.precision_qubits, 64, base.derived(0)});
        qt = qsa::qpca(sa.xt, d, qsa::QpcaOptions{q.precision_qubits, 64, base.derived(1)});
    } catch (const PrecisionError &e) {
        // Unresolved subspaces are a parity failure for this seed, not a hard error.
        out.warnings.push_back("seed " + std::to_string(seed) + ": quantum track skipped: " + e.what());
        const double worst = std::sqrt(2.0 * static_cast<double>(d));
        out.parity.push_back(parity_scalar(seed, "subspace_source", 0.0, worst, 0.05, tag));
        out.parity.push_back(parity_scalar(seed, "subspace_target", 0.0, worst, 0.05, tag));
        clock.lap("qpca");
        run_sweep(out, sa, d, q.precision_sweep, base, seed);
        return out;
    }
    for (const auto *r : {&qs, &qt}) {
        for (const auto &w : r->warnings) {
            out.warnings.push_back("seed " + std::to_string(seed) + ": " + w);
        }
    }
    out.parity.push_back(parity_scalar(seed, "subspace_source", 0.0, projector_distance(qs.basis.P, sa.ps.P), 0.05, tag));
    out.parity.push_back(parity_scalar(seed, "subspace_target", 0.0, projector_distance(qt.basis.P, sa.pt.P), 0.05, tag));
    clock.lap("qpca");

    const double matrix_tol = q.exact_theta ? 1e-6 : 0.05;
    qsa::QuantumAlignmentOptions qopt;
    qopt.product = qsa::MatrixProductOptions{q.precision_qubits, q.exact_theta};
    qopt.build_a = cfg.runs_svm();
    const auto qa = qsa::quantum_alignment(qs.basis.P, qt.basis.P, sa.xs, sa.xt, qopt);
    for (const auto &t : qa.trace) {
        auto j = qsa::to_json(t);
        j["seed"] = seed;
        out.trace.push_back(std::move(j));
    }
    out.parity.push_back(parity_matrix(seed, "M_star", sa.artifacts.M_star, qa.M(), matrix_tol, tag));
    out.parity.push_back(parity_matrix(seed, "X_hat_a", sa.artifacts.X_hat_a, qa.X_hat_a(), matrix_tol, tag));
    out.parity.push_back(parity_matrix(seed, "X_hat_t", sa.artifacts.X_hat_t, qa.X_hat_t(), matrix_tol, tag));
    clock.lap("alignment");

    if (cfg.runs_nn()) {
        qsa::QnnOptions nn_opt;
        nn_opt.plan = base.derived(2);
        nn_opt.ae_bits = q.ae_bits;
        nn_opt.repeats = q.repeats;
        const auto qnn = qsa::q_nn_classify(qa.X_hat_a(), labels, qa.X_hat_t(), nn_opt);
        if (!qnn.warnings.empty()) {
            out.warnings.push_back("seed " + std::to_string(seed) + ": " + std::to_string(qnn.warnings.size()) +
                                   " nearest-neighbour ties within distance resolution");
        }
        out.accuracy.push_back({seed, "quantum", "nn", Evaluator::accuracy(target, qnn.labels)});
        out.parity.push_back(parity_scalar(seed, "labels_nn", 1.0, agreement(qnn.labels, classical_nn), 0.05,
                                           "ae_bits=" + std::to_string(q.ae_bits) +
                                               " repeats=" + std::to_string(q.repeats)));
        clock.lap("qnn");
    }

    if (cfg.runs_svm()) {
        const Matrix a_q = qa.a->matrix();
        out.parity.push_back(parity_matrix(seed, "A", sa.artifacts.A, a_q, matrix_tol, tag));
        qsa::QsvmOptions sv_opt;
        sv_opt.inversion.precision_qubits = q.hhl_precision_qubits;
        const auto model = qsa::q_svm_train(sa.xs, labels, a_q, cfg.gamma, sv_opt);
        Vector oracle(sa.xs.cols() + 1);
        oracle << svm.b, svm.alpha;
        const Vector readout = model.readout();
        const double cos = readout.dot(oracle) / (readout.norm() * oracle.norm());
        out.parity.push_back(parity_scalar(seed, "svm_readout_cosine", 1.0, cos, 1e-3,
                                           "hhl n=" + std::to_string(q.hhl_precision_qubits)));
        std::vector<int> qlabels;
        std::size_t low = 0;
        const quantum::ShotPlan plan = base.derived(3);
        for (Index j = 0; j < sa.xt.cols(); ++j) {
            const auto dec = qsa::q_svm_classify(model, sa.xs, a_q, sa.xt.col(j), plan.derived(j));
            qlabels.push_back(dec.label);
            low += dec.low_confidence ? 1 : 0;
        }
        if (low > 0) {
            out.warnings.push_back("seed " + std::to_string(seed) + ": " + std::to_string(low) +
                                   " low-confidence svm decisions");
        }
        out.accuracy.push_back({seed, "quantum", "svm", Evaluator::accuracy(target, qlabels)});
        out.parity.push_back(parity_scalar(seed, "labels_svm", 1.0, agreement(qlabels, classical_svm), 0.05, tag));
        clock.lap("qsvm");
    }

    run_sweep(out, sa, d, q.precision_sweep, base, seed);
    if (!q.precision_sweep.empty()) {
        clock.lap("sweep");
    }
    return out;
}

} // namespace detail

/// Runs every seed (up to cfg.workers at a time) and merges results in seed order.
inline RunReport run(const ExperimentConfig &cfg) {
    validate(cfg);
    const std::size_t n = cfg.seeds.size();
    std::vector<RunReport> parts(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                parts[i] = detail::run_seed(cfg, cfg.seeds[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), n);
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto &t : pool) {
        t.join();
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!errors[i]) {
            continue;
        }
        try {
            std::rethrow_exception(errors[i]);
        } catch (const CapError &e) {
            throw CapError("seed " + std::to_string(cfg.seeds[i]) + ": " + e.what() +
                           "; try a smaller dataset.D, dataset.n_s or d");
        }
    }

    RunReport report;
    report.config = config_echo(cfg);
    if (cfg.runs_classical()) {
        report.tracks.push_back("classical");
    }
    if (cfg.runs_quantum()) {
        report.tracks.push_back("quantum");
    }
    for (auto &p : parts) {
        auto move_into = [](auto &dst, auto &src) { dst.insert(dst.end(), src.begin(), src.end()); };
        move_into(report.accuracy, p.accuracy);
        move_into(report.parity, p.parity);
        move_into(report.sweep, p.sweep);
        move_into(report.timings, p.timings);
        move_into(report.warnings, p.warnings);
        move_into(report.trace, p.trace);
    }
    return report;
}

} // namespace subalign::harness
