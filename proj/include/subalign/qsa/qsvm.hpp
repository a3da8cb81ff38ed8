#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "subalign/classical/svm.hpp"
#include "subalign/linalg.hpp"
#include "subalign/quantum/conditional_rotation.hpp"
#include "subalign/quantum/ops.hpp"
#include "subalign/quantum/phase_estimation.hpp"
#include "subalign/quantum/sampling.hpp"
#include "subalign/quantum/state.hpp"

namespace subalign::qsa {

inline constexpr Index kMaxInversionDim = 16;

struct HhlOptions {
    int precision_qubits = 10;
    bool exact_spectral = false; ///< apply f(lambda) = C / lambda on the exact eigenbasis
    double kappa_max = 1e4;
};

struct HhlResult {
    Vector solution;           ///< x with F x = b, read out with scale bookkeeping
    quantum::QuantumState state; ///< normalized solution state over register "s"
    double success_probability = 0.0;
    double garbage_weight = 0.0;
    double t0 = 0.0;
    double eigenvalue_cutoff = 0.0;
    double rotation_constant = 0.0;
    double condition_number = 0.0;
};

namespace detail {

/// [[0, F], [F^T, 0]] with F zero-padded to a power of two; the high bit "e"
/// selects the block.
inline CMatrix hermitian_embedding(const Matrix &f, Index padded) {
    CMatrix h = CMatrix::Zero(2 * padded, 2 * padded);
    h.block(0, padded, f.rows(), f.cols()) = f.cast<Complex>();
    h.block(padded, 0, f.cols(), f.rows()) = f.transpose().cast<Complex>();
    return h;
}

} // namespace detail

/// Solves F x = b by phase estimation of e^{i H t0} on the Hermitian embedding
/// H of F, a rotation by C / lambda, and uncomputation. Phase outcomes are read
/// as signed, so negative eigenvalues of H invert with their sign.
inline HhlResult hhl_solve(const Matrix &f, const Vector &b, const HhlOptions &options = {}) {
    using namespace quantum;
    const Index n = f.rows();
    if (f.cols() != n || b.size() != n) {
        throw ShapeError("hhl_solve: F is " + shape_string(f) + ", b has " + std::to_string(b.size()) + " entries");
    }
    if (n > kMaxInversionDim) {
        throw CapError("hhl_solve: dimension " + std::to_string(n) + " exceeds the inversion budget of " +
                       std::to_string(kMaxInversionDim));
    }
    if (!all_finite(f) || !b.allFinite()) {
        throw ConfigError("hhl_solve: non-finite input");
    }
    const double bn = b.norm();
    if (!(bn > 0.0)) {
        throw EncodingError("hhl_solve: zero right-hand side");
    }
    const int prec = options.precision_qubits;
    if (!options.exact_spectral) {
        check_precision(prec);
    }
    Eigen::JacobiSVD<Matrix> svd(f);
    const Vector &sv = svd.singularValues();
    const double kappa = sv(n - 1) > 0.0 ? sv(0) / sv(n - 1) : std::numeric_limits<double>::infinity();
    if (!(kappa <= options.kappa_max)) {
        throw IllConditionedError("hhl_solve: condition number " + std::to_string(kappa) + " exceeds " +
                                  std::to_string(options.kappa_max));
    }

    const int qs = ceil_log2(static_cast<std::uint64_t>(n));
    const Index padded = Index{1} << qs;
    const CMatrix h = detail::hermitian_embedding(f, padded);
    const double cutoff = sv(0) / options.kappa_max;

    std::vector<Register> regs{{"e", 1}, {"s", qs}};
    if (!options.exact_spectral) {
        regs.push_back({"c", prec});
    }
    regs.push_back({"R", 1});
    const RegisterLayout layout(regs);
    CVector amps = CVector::Zero(static_cast<Index>(layout.dimension()));
    const int low = layout.total_qubits() - 1 - qs;
    for (Index i = 0; i < n; ++i) {
        amps(i << low) = b(i) / bn;
    }
    QuantumState s(layout, amps);
    const BitSelection target = select_registers(layout, {"e", "s"});

    HhlResult out;
    out.condition_number = kappa;
    out.eigenvalue_cutoff = cutoff;
    if (options.exact_spectral) {
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
        const Vector &lam = eig.eigenvalues();
        double c = std::numeric_limits<double>::infinity();
        for (Index w = 0; w < lam.size(); ++w) {
            if (std::abs(lam(w)) >= cutoff) {
                c = std::min(c, std::abs(lam(w)));
            }
        }
        out.rotation_constant = c;
        const Index dim = h.rows();
        CMatrix op = CMatrix::Zero(2 * dim, 2 * dim);
        for (Index w = 0; w < dim; ++w) {
            const double fw = std::abs(lam(w)) >= cutoff ? c / lam(w) : 0.0;
            const CMatrix proj = eig.eigenvectors().col(w) * eig.eigenvectors().col(w).adjoint();
            const CMatrix r = rotation_for(fw);
            for (Index i = 0; i < dim; ++i) {
                for (Index j = 0; j < dim; ++j) {
                    op.block<2, 2>(2 * i, 2 * j) += proj(i, j) * r;
                }
            }
        }
        apply_matrix(s, select_registers(layout, {"e", "s", "R"}), op);
    } else {
        const double big_n = std::ldexp(1.0, prec);
        const double t0 = kPi * (1.0 - 2.0 / big_n) / f.norm();
        out.t0 = t0;
        auto lambda_of = [=](std::uint64_t k) { return 2.0 * kPi * signed_phase_of(k, prec) / t0; };
        double c = std::numeric_limits<double>::infinity();
        for (std::uint64_t k = 1; k < (std::uint64_t{1} << prec); ++k) {
            const double l = std::abs(lambda_of(k));
            if (l >= cutoff) {
                c = std::min(c, l);
            }
        }
        out.rotation_constant = c;
        const PowerTable table = PowerTable::from_hermitian({h}, t0, prec);
        apply_phase_estimation(s, BitSelection{}, target, "c", table);
        apply_conditional_rotation(s, select_registers(layout, {"c"}), layout.offset("R"), [&](std::uint64_t k) {
            const double l = lambda_of(k);
            return std::abs(l) >= cutoff ? c / l : 0.0;
        });
        apply_inverse_phase_estimation(s, BitSelection{}, target, "c", table);
    }

    const double p = marginal_probabilities(s, "R")(0);
    if (!(p > kMinPostselection)) {
        throw PostselectionError("hhl_solve: inversion postselection probability is zero");
    }
    Projected cur = postselect(s, "R", 0);
    double kept = 1.0;
    if (!options.exact_spectral) {
        cur = postselect(cur.state, "c", 0);
        kept *= cur.probability;
    }
    cur = postselect(cur.state, "e", 1);
    kept *= cur.probability;
    out.success_probability = p;
    out.garbage_weight = std::max(0.0, 1.0 - kept);

    // Unnormalized amplitudes approximate C H^{-1} b / |b|.
    const double amp_scale = std::sqrt(p * kept);
    out.solution = (cur.state.amplitudes().head(n).real() * amp_scale * bn / out.rotation_constant);
    out.state = cur.state.with_scale(amp_scale * bn / out.rotation_constant);
    return out;
}

struct QsvmNorms {
    double N_t = 0.0;
    double N_x = 0.0;
};

struct QsvmOptions {
    HhlOptions inversion;
};

/// Trained quantum LS-SVM: the |b, alpha> state with the bookkeeping needed to
/// rebuild the training state at classification time.
struct QsvmState {
    quantum::QuantumState b_alpha_state; ///< over "s"; global_scale * amplitudes = (b, alpha)
    double gamma = 1.0;
    double trace_F = 0.0;
    double N_x = 0.0; ///< b^2 + sum_i alpha_i^2 |A^T x_si|^2
    HhlResult inversion;
    Index n_s = 0;

    /// (b, alpha) read off the amplitudes.
    Vector readout() const { return b_alpha_state.scaled_real().head(n_s + 1); }
    double b() const { return readout()(0); }
    Vector alpha() const { return readout().tail(n_s); }

    QsvmNorms norms(const Vector &xt) const {
        return {static_cast<double>(n_s) * xt.squaredNorm() + 1.0, N_x};
    }
};

inline QsvmState q_svm_train(const Matrix &xs, const std::vector<int> &labels, const Matrix &a, double gamma,
                             const QsvmOptions &options = {}) {
    if (xs.cols() + 1 > kMaxInversionDim) {
        throw CapError("q_svm_train: n_s + 1 = " + std::to_string(xs.cols() + 1) +
                       " exceeds the inversion register budget of " + std::to_string(kMaxInversionDim) +
                       "; use fewer training samples");
    }
    if (static_cast<Index>(labels.size()) != xs.cols()) {
        throw ShapeError("q_svm_train: label count does not match sample count");
    }
    if (a.rows() != xs.rows() || a.cols() != xs.rows()) {
        throw ShapeError("q_svm_train: A must be D x D");
    }
    Vector rhs = Vector::Zero(xs.cols() + 1);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 1 && labels[i] != -1) {
            throw ConfigError("q_svm_train: labels must be -1 or +1");
        }
        rhs(static_cast<Index>(i) + 1) = labels[i];
    }
    const Matrix f = svm_system(svm_kernel(xs, a), gamma);
    const double tr = f.trace();
    if (!(tr > 0.0)) {
        throw ValidationError("q_svm_train: tr F must be positive for the normalization F / tr F");
    }
    QsvmState out;
    out.inversion = hhl_solve(f / tr, rhs, options.inversion);
    out.gamma = gamma;
    out.trace_F = tr;
    out.n_s = xs.cols();
    // F x = rhs  <=>  (F / tr F)(tr F x) = rhs.
    out.b_alpha_state = out.inversion.state.with_scale(out.inversion.state.global_scale() / tr);
    const Vector ba = out.readout();
    double nx = ba(0) * ba(0);
    const Matrix atx = a.transpose() * xs;
    for (Index i = 0; i < xs.cols(); ++i) {
        nx += ba(i + 1) * ba(i + 1) * atx.col(i).squaredNorm();
    }
    out.N_x = nx;
    return out;
}

struct QsvmDecision {
    int label = 1;
    double decision = 0.0;       ///< estimate of b + sum_i alpha_i x_si^T A x_t
    double inner_product = 0.0;  ///< estimate of <psi_t|psi_x>
    double sigma = 0.0;          ///< binomial standard error of `decision` (0 in exact mode)
    bool low_confidence = false;
    QsvmNorms norms;
};

/// Hadamard test between the query state (|0>|0> + sum_i |i>x_t) / sqrt(N_t)
/// and the training state (b|0>|0> + sum_i alpha_i |i>A^T x_si) / sqrt(N_x);
/// P(ancilla = 0) = (1 + Re<psi_x|psi_t>) / 2 keeps the sign of the decision.
inline QsvmDecision q_svm_classify(const QsvmState &model, const Matrix &xs, const Matrix &a, const Vector &xt,
                                   const quantum::ShotPlan &plan = quantum::ShotPlan::exact()) {
    using namespace quantum;
    plan.validate();
    if (xs.cols() != model.n_s) {
        throw ShapeError("q_svm_classify: training set does not match the model");
    }
    if (xt.size() != xs.rows() || a.rows() != xs.rows() || a.cols() != xs.rows()) {
        throw ShapeError("q_svm_classify: query or A has the wrong dimension");
    }
    const Vector ba = model.readout();
    const QsvmNorms norms = model.norms(xt);
    const int qi = ceil_log2(static_cast<std::uint64_t>(model.n_s + 1));
    const int qm = ceil_log2(static_cast<std::uint64_t>(xs.rows()));
    const Index dm = Index{1} << qm;
    const Index dim = Index{1} << (qi + qm);
    CVector psi_x = CVector::Zero(dim);
    CVector psi_t = CVector::Zero(dim);
    psi_x(0) = 1.0;
    psi_t(0) = ba(0);
    const Matrix atx = a.transpose() * xs;
    for (Index i = 0; i < model.n_s; ++i) {
        psi_x.segment((i + 1) * dm, xt.size()) = xt.cast<Complex>();
        psi_t.segment((i + 1) * dm, xt.size()) = (ba(i + 1) * atx.col(i)).cast<Complex>();
    }
    psi_x /= std::sqrt(norms.N_t);
    if (!(norms.N_x > 0.0)) {
        throw ValidationError("q_svm_classify: training state has zero norm");
    }
    psi_t /= std::sqrt(norms.N_x);

    const RegisterLayout layout{{"h", 1}, {"i", qi}, {"m", qm}};
    QuantumState s = QuantumState::basis(layout);
    const BitSelection hb = select_registers(layout, {"h"});
    const CMatrix had = gates::hadamard();
    const CMatrix ux = state_preparation(psi_x);
    const CMatrix ut = state_preparation(psi_t);
    apply_matrix(s, hb, had);
    apply_uniformly_controlled(s, hb, select_registers(layout, {"i", "m"}),
                               [&](std::uint64_t c) { return c == 0 ? &ux : &ut; });
    apply_matrix(s, hb, had);
    const double p0 = marginal_probabilities(s, "h")(0);

    QsvmDecision out;
    out.norms = norms;
    const double scale = std::sqrt(norms.N_t * norms.N_x);
    double p_hat = p0;
    if (!plan.is_exact()) {
        auto rng = plan.rng();
        p_hat = sample_frequency(p0, plan.shots, rng);
        const double se = 2.0 * std::sqrt(p_hat * (1.0 - p_hat) / plan.shots);
        out.sigma = se * scale;
        out.low_confidence = std::abs(2.0 * p_hat - 1.0) < 3.0 * se;
    } else {
        out.low_confidence = std::abs(2.0 * p_hat - 1.0) < 1e-12;
    }
    out.inner_product = 2.0 * p_hat - 1.0;
    out.decision = out.inner_product * scale;
    out.label = sign_label(out.decision);
    return out;
}

} // namespace subalign::qsa
