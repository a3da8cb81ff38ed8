#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "subalign/datasets.hpp"
#include "subalign/linalg.hpp"

namespace subalign {

/// Training kernel K[i][k] = x_i^T A x_k. Not symmetric unless A is.
inline Matrix svm_kernel(const Matrix &xs, const Matrix &a) {
    if (a.rows() != xs.rows() || a.cols() != xs.rows()) {
        throw ShapeError("svm_kernel: A must be DxD with D = " + std::to_string(xs.rows()));
    }
    return xs.transpose() * a * xs;
}

inline double inverse_gamma(double gamma) {
    if (!(gamma > 0.0)) {
        throw ConfigError("gamma must be > 0 (got " + std::to_string(gamma) + ")");
    }
    return std::isinf(gamma) ? 0.0 : 1.0 / gamma;
}

/// J: the bordering ones of F, zero elsewhere.
inline Matrix svm_J(Index n) {
    Matrix j = Matrix::Zero(n + 1, n + 1);
    j.row(0).tail(n).setOnes();
    j.col(0).tail(n).setOnes();
    return j;
}

/// K_gamma: K + gamma^-1 I in the lower-right block, zero border.
inline Matrix svm_K_gamma(const Matrix &k, double gamma) {
    const Index n = k.rows();
    Matrix out = Matrix::Zero(n + 1, n + 1);
    out.bottomRightCorner(n, n) = k + inverse_gamma(gamma) * Matrix::Identity(n, n);
    return out;
}

/// F = [[0, 1^T], [1, K + gamma^-1 I]] = J + K_gamma.
inline Matrix svm_system(const Matrix &k, double gamma) {
    return svm_J(k.rows()) + svm_K_gamma(k, gamma);
}

inline double condition_number(const Matrix &m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    const Vector &s = svd.singularValues();
    const double smin = s(s.size() - 1);
    if (smin == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return s(0) / smin;
}

struct SvmModel {
    double b = 0.0;
    Vector alpha;
    double gamma = 1.0;
    Matrix support; ///< D x n_s training samples
    Matrix A;       ///< D x D alignment matrix used by the kernel

    Matrix kernel() const { return svm_kernel(support, A); }
    Matrix F() const { return svm_system(kernel(), gamma); }
    Matrix J() const { return svm_J(support.cols()); }
    Matrix K_gamma() const { return svm_K_gamma(kernel(), gamma); }

    /// sum_i alpha_i x_i^T A x_t + b
    double decision(const Vector &xt) const {
        if (xt.size() != A.cols()) {
            throw ShapeError("SvmModel::decision: query has wrong dimension");
        }
        return alpha.dot(support.transpose() * (A * xt)) + b;
    }
};

/// Least-squares SVM in the aligned similarity: solves F (b, alpha)^T = (0, y)^T
/// with a general dense solver (F is not symmetric in general).
inline SvmModel svm_train(const Matrix &xs, const std::vector<int> &labels, const Matrix &a,
                          double gamma) {
    (void)inverse_gamma(gamma);
    if (static_cast<Index>(labels.size()) != xs.cols()) {
        throw ShapeError("svm_train: label count does not match sample count");
    }
    Vector rhs = Vector::Zero(xs.cols() + 1);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 1 && labels[i] != -1) {
            throw ConfigError("svm_train: labels must be -1 or +1 (found " + std::to_string(labels[i]) +
                              ")");
        }
        rhs(static_cast<Index>(i) + 1) = labels[i];
    }
    const Matrix f = svm_system(svm_kernel(xs, a), gamma);
    const double kappa = condition_number(f);
    if (!(kappa <= 1e12)) {
        throw IllConditionedError("svm_train: F is ill-conditioned (condition number " +
                                  std::to_string(kappa) +
                                  "); strengthen the gamma^-1 I regularizer (use a smaller gamma)");
    }
    const Vector sol = f.fullPivLu().solve(rhs);
    SvmModel model;
    model.b = sol(0);
    model.alpha = sol.tail(xs.cols());
    model.gamma = gamma;
    model.support = xs;
    model.A = a;
    return model;
}

inline SvmModel svm_train(const Domain &xs, const Matrix &a, double gamma) {
    return svm_train(xs.samples(), xs.labels(), a, gamma);
}

/// sign(decision), with sign(0) = +1.
inline int sign_label(double value) { return value >= 0.0 ? +1 : -1; }

inline int svm_classify(const SvmModel &model, const Vector &xt) { return sign_label(model.decision(xt)); }

inline std::vector<int> svm_classify_all(const SvmModel &model, const Matrix &xt) {
    std::vector<int> out(static_cast<std::size_t>(xt.cols()));
    for (Index j = 0; j < xt.cols(); ++j) {
        out[static_cast<std::size_t>(j)] = svm_classify(model, xt.col(j));
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json matrix_to_json(const Matrix &m) {
    nlohmann::json data = nlohmann::json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index c = 0; c < m.cols(); ++c) {
            data.push_back(m(r, c));
        }
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline Matrix matrix_from_json(const nlohmann::json &j) {
    const Index rows = j.at("rows").get<Index>();
    const Index cols = j.at("cols").get<Index>();
    const auto &data = j.at("data");
    if (static_cast<Index>(data.size()) != rows * cols) {
        throw ShapeError("matrix JSON: data length does not match rows*cols");
    }
    Matrix m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c) {
            m(r, c) = data[static_cast<std::size_t>(r * cols + c)].get<double>();
        }
    }
    return m;
}

inline nlohmann::json to_json(const SvmModel &model) {
    nlohmann::json gamma = std::isinf(model.gamma) ? nlohmann::json("inf") : nlohmann::json(model.gamma);
    return {{"schema", "subalign.svm/1"},
            {"b", model.b},
            {"alpha", std::vector<double>(model.alpha.data(), model.alpha.data() + model.alpha.size())},
            {"gamma", gamma},
            {"shapes", {{"n_s", model.support.cols()}, {"D", model.support.rows()}}},
            {"A", matrix_to_json(model.A)},
            {"support", matrix_to_json(model.support)}};
}

inline SvmModel svm_model_from_json(const nlohmann::json &j) {
    if (j.value("schema", "") != "subalign.svm/1") {
        throw ConfigError("SVM model JSON: unsupported schema");
    }
    SvmModel model;
    model.b = j.at("b").get<double>();
    const auto alpha = j.at("alpha").get<std::vector<double>>();
    model.alpha = Eigen::Map<const Vector>(alpha.data(), static_cast<Index>(alpha.size()));
    const auto &g = j.at("gamma");
    model.gamma = g.is_string() ? std::numeric_limits<double>::infinity() : g.get<double>();
    model.A = matrix_from_json(j.at("A"));
    model.support = matrix_from_json(j.at("support"));
    if (model.support.cols() != model.alpha.size() || model.A.rows() != model.support.rows()) {
        throw ShapeError("SVM model JSON: inconsistent shapes");
    }
    return model;
}

} // namespace subalign
