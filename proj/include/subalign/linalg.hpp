#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>

#include "subalign/error.hpp"

namespace subalign {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr double kPi = 3.14159265358979323846;

/// Smallest q with 2^q >= n (q = 0 for n <= 1).
inline int ceil_log2(std::uint64_t n) {
    int q = 0;
    while ((std::uint64_t{1} << q) < n) {
        ++q;
    }
    return q;
}

inline bool all_finite(const Matrix &m) { return m.allFinite(); }

/// Flip columns so that each one's largest-magnitude entry is positive.
/// Among entries of (numerically) equal magnitude the lowest row index wins.
inline void fix_column_signs(Matrix &m) {
    for (Index c = 0; c < m.cols(); ++c) {
        const double peak = m.col(c).cwiseAbs().maxCoeff();
        if (peak == 0.0) {
            continue;
        }
        const double cut = peak * (1.0 - 1e-12);
        for (Index r = 0; r < m.rows(); ++r) {
            if (std::abs(m(r, c)) >= cut) {
                if (m(r, c) < 0.0) {
                    m.col(c) *= -1.0;
                }
                break;
            }
        }
    }
}

/// Frobenius distance between the orthogonal projectors onto span(P), span(Q).
inline double projector_distance(const Matrix &p, const Matrix &q) {
    if (p.rows() != q.rows()) {
        throw ShapeError("projector_distance: row counts differ");
    }
    return (p * p.transpose() - q * q.transpose()).norm();
}

struct SymmetricEigen {
    Vector values;  // descending
    Matrix vectors; // columns match values
};

/// Dense symmetric eigendecomposition, eigenvalues sorted descending.
inline SymmetricEigen symmetric_eigen_descending(const Matrix &m) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
    if (solver.info() != Eigen::Success) {
        throw Error("symmetric eigensolver failed");
    }
    const Index n = m.rows();
    SymmetricEigen out{Vector(n), Matrix(n, n)};
    for (Index k = 0; k < n; ++k) {
        out.values(k) = solver.eigenvalues()(n - 1 - k);
        out.vectors.col(k) = solver.eigenvectors().col(n - 1 - k);
    }
    return out;
}

/// Cosine similarity of two equally sized real arrays, viewed as flat vectors.
inline double cosine_similarity(const Matrix &a, const Matrix &b) {
    if (a.size() != b.size()) {
        throw ShapeError("cosine_similarity: sizes differ");
    }
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    return a.cwiseProduct(b).sum() / (na * nb);
}

inline std::string shape_string(const Matrix &m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

} // namespace subalign
