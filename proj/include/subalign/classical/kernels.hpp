#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "subalign/classical/alignment.hpp"
#include "subalign/datasets.hpp"
#include "subalign/linalg.hpp"
#include "subalign/quantum/ops.hpp"
#include "subalign/quantum/state.hpp"

namespace subalign {

enum class KernelKind { linear, polynomial, cosine, hard };

/// Kernel selection. For the hard kernel, features are mapped affinely onto
/// [0, pi] using [range_lo, range_hi] before entering the circuit.
struct KernelSpec {
    KernelKind kind = KernelKind::linear;
    int degree = 1;
    std::string feature_map_id;
    int qubit_count = 0;
    Vector range_lo;
    Vector range_hi;

    static KernelSpec linear() { return {}; }

    static KernelSpec polynomial(int n) {
        if (n < 1) {
            throw ConfigError("polynomial kernel degree must be >= 1 (got " + std::to_string(n) + ")");
        }
        KernelSpec k;
        k.kind = KernelKind::polynomial;
        k.degree = n;
        return k;
    }

    static KernelSpec cosine() {
        KernelSpec k;
        k.kind = KernelKind::cosine;
        return k;
    }

    static KernelSpec hard(Index dims, std::string feature_map_id = "ry_cz_ring") {
        if (feature_map_id != "ry_cz_ring") {
            throw ConfigError("unknown hard-kernel feature map '" + feature_map_id + "'");
        }
        KernelSpec k;
        k.kind = KernelKind::hard;
        k.feature_map_id = std::move(feature_map_id);
        k.qubit_count = std::max(1, ceil_log2(static_cast<std::uint64_t>(dims)));
        return k;
    }

    std::string name() const {
        switch (kind) {
        case KernelKind::linear:
            return "linear";
        case KernelKind::polynomial:
            return "poly:" + std::to_string(degree);
        case KernelKind::cosine:
            return "cosine";
        case KernelKind::hard:
            return "hard";
        }
        return "?";
    }
};

/// Parses "linear", "poly:N", "cosine" or "hard" (the latter needs D).
inline KernelSpec parse_kernel_spec(const std::string &text, Index dims) {
    if (text == "linear") {
        return KernelSpec::linear();
    }
    if (text == "cosine") {
        return KernelSpec::cosine();
    }
    if (text == "hard") {
        return KernelSpec::hard(dims);
    }
    if (text.rfind("poly:", 0) == 0) {
        const std::string deg = text.substr(5);
        std::size_t used = 0;
        int n = 0;
        try {
            n = std::stoi(deg, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used == 0 || used != deg.size()) {
            throw ConfigError("kernel '" + text + "': degree is not an integer");
        }
        return KernelSpec::polynomial(n);
    }
    throw ConfigError("unknown kernel id '" + text + "' (expected linear, poly:N, cosine or hard)");
}

/// Fits the hard-kernel feature range on the union of the given sample sets.
inline KernelSpec with_fitted_range(KernelSpec spec, const Matrix &a, const Matrix &b) {
    if (a.rows() != b.rows()) {
        throw ShapeError("with_fitted_range: feature counts differ");
    }
    spec.range_lo = a.rowwise().minCoeff().cwiseMin(b.rowwise().minCoeff());
    spec.range_hi = a.rowwise().maxCoeff().cwiseMax(b.rowwise().maxCoeff());
    return spec;
}

namespace detail {

inline Vector hard_angles(const KernelSpec &spec, const Vector &x) {
    Vector out(x.size());
    for (Index m = 0; m < x.size(); ++m) {
        const double lo = spec.range_lo(m);
        const double width = spec.range_hi(m) - lo;
        out(m) = width > 0.0 ? kPi * std::clamp((x(m) - lo) / width, 0.0, 1.0) : 0.0;
    }
    return out;
}

} // namespace detail

/// U_phi(x)|0> for the "ry_cz_ring" map: each layer rotates qubit j by RY of
/// the next feature (angle 0 once features run out) and then applies CZ on the
/// ring (j, j+1 mod q); a single CZ for q = 2, none for q = 1. Layers repeat
/// until all D features are loaded.
inline CVector hard_feature_state(const KernelSpec &spec, const Vector &x) {
    const int q = spec.qubit_count;
    const Vector angles = detail::hard_angles(spec, x);
    quantum::QuantumState s = quantum::QuantumState::basis(quantum::RegisterLayout{{"q", q}});
    const Index layers = (x.size() + q - 1) / q;
    for (Index layer = 0; layer < layers; ++layer) {
        for (int j = 0; j < q; ++j) {
            const Index m = layer * q + j;
            const double theta = m < x.size() ? angles(m) : 0.0;
            quantum::apply_matrix(s, quantum::BitSelection({j}), quantum::gates::ry(theta));
        }
        if (q == 2) {
            quantum::apply_cz(s, 0, 1);
        } else if (q > 2) {
            for (int j = 0; j < q; ++j) {
                quantum::apply_cz(s, j, (j + 1) % q);
            }
        }
    }
    return s.amplitudes();
}

/// Entry (i, j) = K(x_i, y_j) for columns of X (D x n_x) and Y (D x n_y).
inline Matrix kernel_matrix(const Matrix &x, const Matrix &y, const KernelSpec &spec) {
    if (x.rows() != y.rows()) {
        throw ShapeError("kernel_matrix: feature counts differ (" + std::to_string(x.rows()) + " vs " +
                         std::to_string(y.rows()) + ")");
    }
    switch (spec.kind) {
    case KernelKind::linear:
        return x.transpose() * y;
    case KernelKind::polynomial: {
        if (spec.degree < 1) {
            throw ConfigError("polynomial kernel degree must be >= 1");
        }
        const Matrix dot = x.transpose() * y;
        return dot.unaryExpr([n = spec.degree](double v) { return std::pow(v, n); });
    }
    case KernelKind::cosine: {
        Matrix k(x.cols(), y.cols());
        for (Index i = 0; i < x.cols(); ++i) {
            for (Index j = 0; j < y.cols(); ++j) {
                double prod = 1.0;
                for (Index m = 0; m < x.rows(); ++m) {
                    prod *= std::cos(x(m, i) - y(m, j));
                }
                k(i, j) = prod;
            }
        }
        return k;
    }
    case KernelKind::hard: {
        if (spec.feature_map_id != "ry_cz_ring") {
            throw ConfigError("unknown hard-kernel feature map '" + spec.feature_map_id + "'");
        }
        const int expected = std::max(1, ceil_log2(static_cast<std::uint64_t>(x.rows())));
        if (spec.qubit_count != expected) {
            throw ConfigError("hard kernel: qubit_count must be ceil(log2 D) = " + std::to_string(expected));
        }
        const KernelSpec fitted =
            spec.range_lo.size() == x.rows() && spec.range_hi.size() == x.rows() ? spec : with_fitted_range(spec, x, y);
        const Index dim = Index{1} << spec.qubit_count;
        CMatrix fx(dim, x.cols());
        CMatrix fy(dim, y.cols());
        for (Index i = 0; i < x.cols(); ++i) {
            fx.col(i) = hard_feature_state(fitted, x.col(i));
        }
        for (Index j = 0; j < y.cols(); ++j) {
            fy.col(j) = hard_feature_state(fitted, y.col(j));
        }
        return (fx.adjoint() * fy).real();
    }
    }
    throw ConfigError("unknown kernel kind");
}

inline Matrix kernel_matrix(const Domain &x, const Domain &y, const KernelSpec &spec) {
    return kernel_matrix(x.samples(), y.samples(), spec);
}

/// H_a K H_b with H = I - 11^T/n on each side.
inline Matrix center_kernel(const Matrix &k) {
    const Vector rows = k.rowwise().mean();
    const Vector cols = k.colwise().mean().transpose();
    const double all = k.mean();
    Matrix out = k;
    out.colwise() -= rows;
    out.rowwise() -= cols.transpose();
    out.array() += all;
    return out;
}

struct KernelPcaWeights {
    Matrix W;          ///< n x d, columns v_k / sqrt(lambda_k)
    Vector eigenvalues; ///< top-d eigenvalues of the centered Gram matrix
    std::vector<std::string> warnings;
};

/// Kernel PCA on a Gram matrix: double-center, eigendecompose, scale the top-d
/// eigenvectors so the feature-space components have unit norm.
inline KernelPcaWeights kernel_pca_weights(const Matrix &k, Index d) {
    if (k.rows() != k.cols()) {
        throw ShapeError("kernel_pca_weights: K must be square");
    }
    const Index n = k.rows();
    if (d < 1 || d > n) {
        throw ConfigError("kernel_pca_weights: d = " + std::to_string(d) + " outside 1.." + std::to_string(n));
    }
    const double scale = std::max(1.0, k.cwiseAbs().maxCoeff());
    if ((k - k.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
        throw ValidationError("kernel_pca_weights: K is not symmetric within 1e-8");
    }
    const Matrix kc = center_kernel(0.5 * (k + k.transpose()));
    const SymmetricEigen eig = symmetric_eigen_descending(kc);
    if (eig.values(n - 1) < -1e-8 * scale) {
        throw ValidationError("kernel_pca_weights: K is not positive semidefinite (eigenvalue " +
                              std::to_string(eig.values(n - 1)) + ")");
    }
    if (!(eig.values(d - 1) > 1e-12 * scale)) {
        throw RankDeficiencyError("kernel_pca_weights: centered Gram matrix has eigenvalue " +
                                  std::to_string(eig.values(d - 1)) + " at component " + std::to_string(d) +
                                  "; reduce d");
    }
    KernelPcaWeights out;
    Matrix v = eig.vectors.leftCols(d);
    fix_column_signs(v);
    out.eigenvalues = eig.values.head(d);
    out.W = v * out.eigenvalues.cwiseSqrt().cwiseInverse().asDiagonal();
    if (d < n && eig.values(d - 1) - eig.values(d) < 1e-12 * scale) {
        out.warnings.push_back("degenerate kernel spectrum: eigenvalue gap below 1e-12 at component " +
                               std::to_string(d));
    }
    return out;
}

/// M^phi = Ws^T K_st Wt.
inline Matrix kernel_alignment(const Matrix &ws, const Matrix &kst, const Matrix &wt) {
    if (ws.rows() != kst.rows() || wt.rows() != kst.cols() || ws.cols() != wt.cols()) {
        throw ShapeError("kernel_alignment: expected Ws n_s x d, K_st n_s x n_t, Wt n_t x d");
    }
    return ws.transpose() * kst * wt;
}

/// ||P_s^phi M - P_t^phi||_F^2 evaluated through centered Gram matrices.
inline double kernel_objective(const Matrix &ws, const Matrix &kss, const Matrix &kst, const Matrix &ktt,
                               const Matrix &wt, const Matrix &m) {
    const double a = (m.transpose() * ws.transpose() * kss * ws * m).trace();
    const double b = (m.transpose() * ws.transpose() * kst * wt).trace();
    const double c = (wt.transpose() * ktt * wt).trace();
    return a - 2.0 * b + c;
}

/// Everything kernel SA produces. Gram matrices are centered per domain;
/// K_st is centered on both sides by its own domain means.
struct KernelSaResult {
    KernelSpec spec;
    Matrix K_ss;
    Matrix K_tt;
    Matrix K_st;
    KernelPcaWeights ws;
    KernelPcaWeights wt;
    Matrix M;             ///< d x d
    Matrix X_hat_a_phi;   ///< d x n_s, M^T Ws^T K_ss
    Matrix X_hat_t_phi;   ///< d x n_t, Wt^T K_tt

    /// Kernel similarity between training columns: K_ss Ws M Wt^T K_tt (n_s x n_t).
    Matrix similarity() const { return K_ss * ws.W * M * wt.W.transpose() * K_tt; }

    double objective() const { return kernel_objective(ws.W, K_ss, K_st, K_tt, wt.W, M); }
};

inline KernelSaResult kernel_sa(const Domain &source, const Domain &target, Index d, KernelSpec spec) {
    if (source.dim() != target.dim()) {
        throw ShapeError("kernel_sa: source and target feature counts differ");
    }
    const Matrix xs = center_matrix(source.samples());
    const Matrix xt = center_matrix(target.samples());
    if (spec.kind == KernelKind::hard && spec.range_lo.size() != xs.rows()) {
        spec = with_fitted_range(spec, xs, xt);
    }
    KernelSaResult out;
    out.spec = spec;
    out.K_ss = center_kernel(kernel_matrix(xs, xs, spec));
    out.K_tt = center_kernel(kernel_matrix(xt, xt, spec));
    out.K_st = center_kernel(kernel_matrix(xs, xt, spec));
    out.ws = kernel_pca_weights(out.K_ss, d);
    out.wt = kernel_pca_weights(out.K_tt, d);
    out.M = kernel_alignment(out.ws.W, out.K_st, out.wt.W);
    out.X_hat_a_phi = out.M.transpose() * out.ws.W.transpose() * out.K_ss;
    out.X_hat_t_phi = out.wt.W.transpose() * out.K_tt;
    return out;
}

/// Kernel SA followed by 1-NN between the aligned projections.
inline std::vector<int> kernel_sa_nn_predict(const Domain &source, const Domain &target, Index d,
                                             const KernelSpec &spec) {
    const KernelSaResult r = kernel_sa(source, target, d, spec);
    return nn_classify(r.X_hat_a_phi, source.labels(), r.X_hat_t_phi);
}

} // namespace subalign
