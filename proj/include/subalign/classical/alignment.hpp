#pragma once

#include <limits>
#include <vector>

#include "subalign/classical/pca.hpp"
#include "subalign/datasets.hpp"
#include "subalign/linalg.hpp"

namespace subalign {

struct AlignmentArtifacts {
    Matrix M_star;  ///< d x d,  Ps^T Pt
    Matrix P_a;     ///< D x d,  Ps M*
    Matrix A;       ///< D x D,  Ps M* Pt^T
    Matrix X_hat_a; ///< d x n_s, P_a^T Xs
    Matrix X_hat_t; ///< d x n_t, Pt^T Xt
};

/// M* = Ps^T Pt, the minimiser of ||Ps M - Pt||_F.
inline Matrix alignment_matrix(const Matrix &ps, const Matrix &pt) {
    if (ps.rows() != pt.rows()) {
        throw ShapeError("alignment_matrix: ambient dimensions differ (" + shape_string(ps) + " vs " +
                         shape_string(pt) + ")");
    }
    if (ps.cols() != pt.cols()) {
        throw ShapeError("alignment_matrix: subspace dimensions differ (" + std::to_string(ps.cols()) +
                         " vs " + std::to_string(pt.cols()) + ")");
    }
    return ps.transpose() * pt;
}

inline Matrix alignment_matrix(const SubspaceBasis &ps, const SubspaceBasis &pt) {
    return alignment_matrix(ps.P, pt.P);
}

/// ||Ps M - Pt||_F^2, the quantity M* minimises.
inline double alignment_objective(const Matrix &ps, const Matrix &pt, const Matrix &m) {
    return (ps * m - pt).squaredNorm();
}

inline AlignmentArtifacts build_alignment(const Matrix &ps, const Matrix &pt, const Matrix &xs,
                                          const Matrix &xt) {
    if (xs.rows() != ps.rows() || xt.rows() != pt.rows()) {
        throw ShapeError("build_alignment: data dimension does not match basis dimension");
    }
    AlignmentArtifacts out;
    out.M_star = alignment_matrix(ps, pt);
    out.P_a = ps * out.M_star;
    out.A = out.P_a * pt.transpose();
    out.X_hat_a = out.P_a.transpose() * xs;
    out.X_hat_t = pt.transpose() * xt;
    return out;
}

inline AlignmentArtifacts build_alignment(const SubspaceBasis &ps, const SubspaceBasis &pt,
                                          const Domain &xs, const Domain &xt) {
    return build_alignment(ps.P, pt.P, xs.samples(), xt.samples());
}

/// sim(xs, xt) = xs^T A xt.
inline double similarity(const Vector &xs, const Vector &xt, const Matrix &a) {
    if (a.rows() != xs.size() || a.cols() != xt.size()) {
        throw ShapeError("similarity: A is " + shape_string(a) + ", vectors are " +
                         std::to_string(xs.size()) + " and " + std::to_string(xt.size()));
    }
    return xs.dot(a * xt);
}

/// Index of the Euclidean-nearest column of `train`; ties go to the lower index.
inline Index nearest_index(const Matrix &train, const Vector &query) {
    Index best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < train.cols(); ++i) {
        const double d2 = (train.col(i) - query).squaredNorm();
        if (d2 < best_d2) {
            best_d2 = d2;
            best = i;
        }
    }
    return best;
}

/// 1-nearest-neighbour labels for each query column.
inline std::vector<int> nn_classify(const Matrix &train, const std::vector<int> &train_labels,
                                    const Matrix &queries) {
    if (train.cols() == 0) {
        throw ConfigError("nn_classify: empty training set");
    }
    if (static_cast<Index>(train_labels.size()) != train.cols()) {
        throw ShapeError("nn_classify: label count does not match training set");
    }
    if (train.rows() != queries.rows()) {
        throw ShapeError("nn_classify: training and query dimensions differ");
    }
    std::vector<int> out(static_cast<std::size_t>(queries.cols()));
    for (Index j = 0; j < queries.cols(); ++j) {
        out[static_cast<std::size_t>(j)] =
            train_labels[static_cast<std::size_t>(nearest_index(train, queries.col(j)))];
    }
    return out;
}

/// Everything the classical SA track produces for one (source, target) pair.
struct SaPipeline {
    Vector source_mean;
    Vector target_mean;
    Matrix xs; ///< centered source samples
    Matrix xt; ///< centered target samples
    SubspaceBasis ps;
    SubspaceBasis pt;
    AlignmentArtifacts artifacts;
};

/// Center both domains independently, take d-dimensional PCA bases, align.
inline SaPipeline subspace_alignment(const Domain &source, const Domain &target, Index d) {
    if (source.dim() != target.dim()) {
        throw ShapeError("subspace_alignment: source and target feature counts differ");
    }
    SaPipeline out;
    out.xs = center_matrix(source.samples(), &out.source_mean);
    out.xt = center_matrix(target.samples(), &out.target_mean);
    out.ps = pca_subspace(out.xs, d);
    out.pt = pca_subspace(out.xt, d);
    out.artifacts = build_alignment(out.ps.P, out.pt.P, out.xs, out.xt);
    return out;
}

/// SA followed by 1-NN in the aligned subspace.
inline std::vector<int> sa_nn_predict(const Domain &source, const Domain &target, Index d) {
    const SaPipeline sa = subspace_alignment(source, target, d);
    return nn_classify(sa.artifacts.X_hat_a, source.labels(), sa.artifacts.X_hat_t);
}

/// No-adaptation baseline: 1-NN on the raw features.
inline std::vector<int> baseline_nn_predict(const Domain &source, const Domain &target) {
    return nn_classify(source.samples(), source.labels(), target.samples());
}

} // namespace subalign
