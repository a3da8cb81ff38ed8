#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "subalign/linalg.hpp"
#include "subalign/quantum/conditional_rotation.hpp"
#include "subalign/quantum/ops.hpp"
#include "subalign/quantum/phase_estimation.hpp"
#include "subalign/quantum/state.hpp"

namespace subalign::qsa {

inline constexpr double kMinOverlapSuccess = 1e-6;

struct MatrixProductOptions {
    int precision_qubits = 8;
    bool exact_theta = true; ///< replace the phase register by an exact spectral rotation
};

/// Output of the inner-product circuit: a state over (I1, I2) whose amplitude
/// at |i>|j>, times global_scale, is (P^T Q)_{ij}.
struct InnerProductState {
    quantum::QuantumState state;
    Index rows = 0;
    Index cols = 0;
    double scale = 0.0; ///< ||P||_F * ||Q||_F
    double success_probability = 0.0;
    double garbage_weight = 0.0; ///< weight left outside |0> on B, C1, C2 after uncomputation
    int precision_qubits = 0;
    bool exact_theta = true;
    double amplitude_error_bound = 0.0;
    quantum::RegisterLayout circuit_layout;

    Matrix matrix() const {
        const int qb = state.layout().width("I2");
        Matrix m(rows, cols);
        for (Index i = 0; i < rows; ++i) {
            for (Index j = 0; j < cols; ++j) {
                m(i, j) = state.global_scale() * state.amplitude(static_cast<std::uint64_t>((i << qb) + j)).real();
            }
        }
        return m;
    }
};

/// Angle theta in [0, pi/2] with <u|v> = -cos(2 theta) for unit vectors u, v.
inline double overlap_angle(const Vector &u_hat, const Vector &v_hat) {
    const double c = std::clamp(u_hat.dot(v_hat), -1.0, 1.0);
    return 0.5 * std::acos(-c);
}

/// (|0>(u + v) + |1>(u - v)) / 2 over (B, C1), B the high bit.
inline CVector overlap_probe_state(const Vector &u_hat, const Vector &v_hat) {
    const Index dc = u_hat.size();
    CVector phi(2 * dc);
    phi.head(dc) = (0.5 * (u_hat + v_hat)).cast<Complex>();
    phi.tail(dc) = (0.5 * (u_hat - v_hat)).cast<Complex>();
    return phi;
}

/// G = (2|phi><phi| - I)(-Z (x) I). On the plane holding |phi> it rotates by
/// 2 theta, so its eigenvalues there are e^{+-2i theta}.
inline CMatrix overlap_grover_operator(const Vector &u_hat, const Vector &v_hat) {
    const CVector phi = overlap_probe_state(u_hat, v_hat);
    const Index dim = phi.size();
    CMatrix refl = 2.0 * phi * phi.adjoint() - CMatrix::Identity(dim, dim);
    refl.leftCols(dim / 2) *= -1.0;
    return refl;
}

namespace detail {

/// Real Householder reflection taking e_0 to the unit vector u.
inline CMatrix householder_to(const Vector &u) {
    const Index n = u.size();
    Vector w = -u;
    w(0) += 1.0;
    const double nw = w.norm();
    if (nw < 1e-14) {
        return CMatrix::Identity(n, n);
    }
    w /= nw;
    return (Matrix::Identity(n, n) - 2.0 * w * w.transpose()).cast<Complex>();
}

/// Unit columns (zero columns become e_0) padded to `rows_pad`, plus their norms.
inline Matrix unit_columns(const Matrix &x, Index rows_pad, Vector &norms) {
    Matrix out = Matrix::Zero(rows_pad, x.cols());
    norms.resize(x.cols());
    for (Index j = 0; j < x.cols(); ++j) {
        norms(j) = x.col(j).norm();
        if (norms(j) > 0.0) {
            out.col(j).head(x.rows()) = x.col(j) / norms(j);
        } else {
            out(0, j) = 1.0;
        }
    }
    return out;
}

/// Sum_w |w><w| (x) rotation_for(-Re lambda_w) over the eigenbasis of unitary G,
/// acting on (B, C1, R) with R the low bit.
inline CMatrix spectral_overlap_rotation(const CMatrix &g) {
    Eigen::ComplexSchur<CMatrix> schur(g);
    const CMatrix &u = schur.matrixU();
    const CMatrix &t = schur.matrixT();
    const Index n = g.rows();
    CMatrix out = CMatrix::Zero(2 * n, 2 * n);
    for (Index w = 0; w < n; ++w) {
        const double f = std::clamp(-t(w, w).real(), -1.0, 1.0);
        const CMatrix proj = u.col(w) * u.col(w).adjoint();
        const CMatrix r = quantum::rotation_for(f);
        for (Index a = 0; a < 2; ++a) {
            for (Index b = 0; b < 2; ++b) {
                for (Index i = 0; i < n; ++i) {
                    for (Index j = 0; j < n; ++j) {
                        out(2 * i + a, 2 * j + b) += proj(i, j) * r(a, b);
                    }
                }
            }
        }
    }
    return out;
}

} // namespace detail

/// Prepares the state encoding P^T Q (P is D x a, Q is D x b).
///
/// Index registers I1, I2 carry the column norms, B and C1 hold the probe
/// superposition of the unit columns, phase estimation of the overlap operator
/// writes theta_ij into C2, and a rotation of R by -cos(2 theta_ij) leaves
/// <u_i|v_j> on R = 0. The phase register and probe are then uncomputed.
inline InnerProductState matrix_product_state(const Matrix &p, const Matrix &q,
                                              const MatrixProductOptions &options = {}) {
    using namespace quantum;
    if (p.rows() != q.rows()) {
        throw ShapeError("matrix_product_state: P is " + shape_string(p) + ", Q is " + shape_string(q) +
                         "; row counts must match");
    }
    if (p.size() == 0 || q.size() == 0) {
        throw ShapeError("matrix_product_state: empty operand");
    }
    if (!all_finite(p) || !all_finite(q)) {
        throw ConfigError("matrix_product_state: non-finite entries");
    }
    const double np = p.norm();
    const double nq = q.norm();
    if (!(np > 0.0) || !(nq > 0.0)) {
        throw EncodingError("matrix_product_state: zero operand cannot be amplitude-encoded");
    }
    const int n = options.precision_qubits;
    if (!options.exact_theta) {
        check_precision(n);
    }

    const int qa = ceil_log2(static_cast<std::uint64_t>(p.cols()));
    const int qb = ceil_log2(static_cast<std::uint64_t>(q.cols()));
    const int qc = ceil_log2(static_cast<std::uint64_t>(p.rows()));
    const Index dc = Index{1} << qc;
    Vector pn;
    Vector qn;
    const Matrix uh = detail::unit_columns(p, dc, pn);
    const Matrix vh = detail::unit_columns(q, dc, qn);

    std::vector<Register> regs{{"I1", qa}, {"I2", qb}, {"B", 1}, {"C1", qc}};
    if (!options.exact_theta) {
        regs.push_back({"C2", n});
    }
    regs.push_back({"R", 1});
    const RegisterLayout layout(regs);

    // Column-norm weighting of the index registers.
    const QuantumState wi = amplitude_encode(pn, true, "I1");
    const QuantumState wj = amplitude_encode(qn, true, "I2");
    CVector amps = CVector::Zero(static_cast<Index>(layout.dimension()));
    const int low = layout.total_qubits() - qa - qb;
    for (Index i = 0; i < wi.amplitudes().size(); ++i) {
        for (Index j = 0; j < wj.amplitudes().size(); ++j) {
            amps(((i << qb) + j) << low) = wi.amplitudes()(i) * wj.amplitudes()(j);
        }
    }
    QuantumState s(layout, amps);

    const Index a_pad = Index{1} << qa;
    const Index b_pad = Index{1} << qb;
    std::vector<CMatrix> prep_u;
    std::vector<CMatrix> prep_v;
    for (Index i = 0; i < a_pad; ++i) {
        prep_u.push_back(i < p.cols() ? detail::householder_to(uh.col(i)) : CMatrix::Identity(dc, dc));
    }
    for (Index j = 0; j < b_pad; ++j) {
        prep_v.push_back(j < q.cols() ? detail::householder_to(vh.col(j)) : CMatrix::Identity(dc, dc));
    }
    const BitSelection prep_ctrl = select_registers(layout, {"I1", "I2", "B"});
    const BitSelection c1 = select_registers(layout, {"C1"});
    const BitSelection b = select_registers(layout, {"B"});
    const CMatrix h = gates::hadamard();
    auto prepare = [&](QuantumState &st) {
        apply_matrix(st, b, h);
        apply_uniformly_controlled(st, prep_ctrl, c1, [&](std::uint64_t c) -> const CMatrix * {
            const std::uint64_t bit = c & 1U;
            const std::uint64_t ij = c >> 1;
            return bit == 0 ? &prep_u[static_cast<std::size_t>(ij >> qb)]
                            : &prep_v[static_cast<std::size_t>(ij & (static_cast<std::uint64_t>(b_pad) - 1))];
        });
        apply_matrix(st, b, h);
    };
    prepare(s);

    // Overlap operator per index pair; padded pairs carry no amplitude.
    std::vector<CMatrix> g_ops;
    g_ops.reserve(static_cast<std::size_t>(a_pad * b_pad));
    for (Index i = 0; i < a_pad; ++i) {
        for (Index j = 0; j < b_pad; ++j) {
            if (i < p.cols() && j < q.cols()) {
                g_ops.push_back(overlap_grover_operator(uh.col(i), vh.col(j)));
            } else {
                g_ops.push_back(CMatrix::Identity(2 * dc, 2 * dc));
            }
        }
    }
    const BitSelection index_ctrl = select_registers(layout, {"I1", "I2"});
    if (options.exact_theta) {
        std::vector<CMatrix> spectral;
        spectral.reserve(g_ops.size());
        for (const auto &g : g_ops) {
            spectral.push_back(detail::spectral_overlap_rotation(g));
        }
        apply_uniformly_controlled(s, index_ctrl, select_registers(layout, {"B", "C1", "R"}),
                                   [&](std::uint64_t c) { return &spectral[static_cast<std::size_t>(c)]; });
    } else {
        const BitSelection target = select_registers(layout, {"B", "C1"});
        const PowerTable table(g_ops, n);
        const double big_n = std::ldexp(1.0, n);
        apply_phase_estimation(s, index_ctrl, target, "C2", table);
        apply_conditional_rotation(s, select_registers(layout, {"C2"}), layout.offset("R"),
                                   [big_n](std::uint64_t k) { return -std::cos(2.0 * kPi * k / big_n); });
        apply_inverse_phase_estimation(s, index_ctrl, target, "C2", table);
    }

    // Uncompute the probe: H, inverse preparation (reflections are self-inverse), H.
    prepare(s);

    const double p_r0 = marginal_probabilities(s, "R")(0);
    if (p_r0 < kMinOverlapSuccess) {
        throw PostselectionError("matrix_product_state: degenerate overlap, success probability " +
                                 std::to_string(p_r0) + " below " + std::to_string(kMinOverlapSuccess));
    }
    Projected cur = postselect(s, "R", 0);
    double kept = 1.0;
    std::vector<std::string> ancillas{"B", "C1"};
    if (!options.exact_theta) {
        ancillas.push_back("C2");
    }
    for (const auto &reg : ancillas) {
        cur = postselect(cur.state, reg, 0);
        kept *= cur.probability;
    }

    InnerProductState out;
    out.rows = p.cols();
    out.cols = q.cols();
    out.scale = np * nq;
    out.success_probability = p_r0;
    out.garbage_weight = std::max(0.0, 1.0 - kept);
    out.precision_qubits = options.exact_theta ? 0 : n;
    out.exact_theta = options.exact_theta;
    out.circuit_layout = layout;
    out.state = cur.state.with_scale(std::sqrt(p_r0 * kept) * np * nq);
    if (!options.exact_theta) {
        out.amplitude_error_bound = std::ldexp(1.0, 1 - n) * pn.maxCoeff() * qn.maxCoeff();
    }
    return out;
}

} // namespace subalign::qsa
