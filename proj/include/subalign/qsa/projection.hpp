#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "subalign/classical/alignment.hpp"
#include "subalign/classical/pca.hpp"
#include "subalign/datasets.hpp"
#include "subalign/qsa/matrix_product.hpp"
#include "subalign/quantum/dump.hpp"

namespace subalign::qsa {

/// One diagnostic line per pipeline stage.
struct StageTrace {
    std::string stage;
    quantum::RegisterLayout layout;
    double success_probability = 0.0;
    double global_scale = 0.0;
    double garbage_weight = 0.0;
    int precision_qubits = 0;
    double max_abs_deviation = 0.0; ///< vs the classical oracle for this stage
};

inline nlohmann::json to_json(const StageTrace &t) {
    return {{"stage", t.stage},
            {"layout", quantum::layout_to_json(t.layout)},
            {"success_probability", t.success_probability},
            {"global_scale", t.global_scale},
            {"garbage_weight", t.garbage_weight},
            {"precision_qubits", t.precision_qubits},
            {"max_abs_deviation", t.max_abs_deviation}};
}

inline void write_trace_jsonl(std::ostream &out, const std::vector<StageTrace> &records) {
    for (const auto &r : records) {
        out << to_json(r).dump() << '\n';
    }
}

inline StageTrace trace_stage(const std::string &stage, const InnerProductState &s, const Matrix &oracle) {
    return {stage,
            s.circuit_layout,
            s.success_probability,
            s.state.global_scale(),
            s.garbage_weight,
            s.precision_qubits,
            (s.matrix() - oracle).cwiseAbs().maxCoeff()};
}

/// State encoding P^T X (columns of X are samples).
inline InnerProductState q_project(const Matrix &p, const Matrix &x, const MatrixProductOptions &options = {}) {
    return matrix_product_state(p, x, options);
}

inline InnerProductState q_project(const SubspaceBasis &p, const Domain &x, const MatrixProductOptions &options = {}) {
    return matrix_product_state(p.P, x.samples(), options);
}

struct QuantumAlignment {
    InnerProductState m_star;   ///< Ps^T Pt
    InnerProductState x_hat_s;  ///< Ps^T Xs
    InnerProductState x_hat_a;  ///< M^T Ps^T Xs
    InnerProductState x_hat_t;  ///< Pt^T Xt
    std::optional<InnerProductState> a; ///< Ps Ps^T Pt Pt^T
    std::vector<StageTrace> trace;

    Matrix M() const { return m_star.matrix(); }
    Matrix X_hat_a() const { return x_hat_a.matrix(); }
    Matrix X_hat_t() const { return x_hat_t.matrix(); }
};

struct QuantumAlignmentOptions {
    MatrixProductOptions product;
    bool build_a = true;
};

/// Quantum subspace-alignment chain on centered data.
///
/// X_hat_a = M^T (Ps^T Xs) is a second inner-product circuit fed with the
/// read-out M and source projection, so X_hat_a^T X_hat_t = Xs^T A Xt. Each
/// stage is traced against the classical product of the same operands.
inline QuantumAlignment quantum_alignment(const Matrix &ps, const Matrix &pt, const Matrix &xs, const Matrix &xt,
                                          const QuantumAlignmentOptions &options = {}) {
    QuantumAlignment out;
    out.m_star = matrix_product_state(ps, pt, options.product);
    out.trace.push_back(trace_stage("m_star", out.m_star, ps.transpose() * pt));

    out.x_hat_s = q_project(ps, xs, options.product);
    out.trace.push_back(trace_stage("x_hat_s", out.x_hat_s, ps.transpose() * xs));

    const Matrix m = out.m_star.matrix();
    const Matrix xhs = out.x_hat_s.matrix();
    out.x_hat_a = matrix_product_state(m, xhs, options.product);
    out.trace.push_back(trace_stage("x_hat_a", out.x_hat_a, (ps.transpose() * pt).transpose() * ps.transpose() * xs));

    out.x_hat_t = q_project(pt, xt, options.product);
    out.trace.push_back(trace_stage("x_hat_t", out.x_hat_t, pt.transpose() * xt));

    if (options.build_a) {
        const Matrix rs = ps * ps.transpose();
        const Matrix rt = pt * pt.transpose();
        out.a = matrix_product_state(rs, rt, options.product);
        out.trace.push_back(trace_stage("a", *out.a, ps * (ps.transpose() * pt) * pt.transpose()));
    }
    return out;
}

} // namespace subalign::qsa
