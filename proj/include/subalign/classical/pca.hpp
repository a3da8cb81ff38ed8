#pragma once

#include <string>
#include <vector>

#include "subalign/datasets.hpp"
#include "subalign/linalg.hpp"

namespace subalign {

/// D x d matrix with orthonormal columns plus the matching eigenvalues of
/// the (unnormalized) covariance X X^T, descending.
struct SubspaceBasis {
    Matrix P;
    Vector eigenvalues;
    std::vector<std::string> warnings;

    Index ambient_dim() const noexcept { return P.rows(); }
    Index dim() const noexcept { return P.cols(); }
    bool degenerate() const noexcept { return !warnings.empty(); }
};

/// Full descending spectrum of X X^T. Used to pick d.
inline Vector eigen_spectrum(const Matrix &x) {
    return symmetric_eigen_descending(x * x.transpose()).values;
}

/// Top-d principal axes of centered column samples X (D x n).
///
/// Columns are unit eigenvectors of X X^T in eigenvalue-descending order; each
/// column's largest-magnitude entry is made positive so that downstream M* is
/// deterministic. A gap lambda_d - lambda_{d+1} under 1e-12 (relative to
/// lambda_1) is flagged in `warnings` rather than rejected.
inline SubspaceBasis pca_subspace(const Matrix &x, Index d) {
    const Index dims = x.rows();
    const Index n = x.cols();
    if (d < 1 || d > std::min(dims, n)) {
        throw ConfigError("pca_subspace: d = " + std::to_string(d) + " outside 1.." +
                          std::to_string(std::min(dims, n)));
    }
    const SymmetricEigen eig = symmetric_eigen_descending(x * x.transpose());

    SubspaceBasis out;
    out.P = eig.vectors.leftCols(d);
    fix_column_signs(out.P);
    out.eigenvalues = eig.values.head(d);
    const double scale = std::max(1.0, std::abs(eig.values(0)));
    for (Index k = 0; k < d; ++k) {
        if (out.eigenvalues(k) < 0.0 && out.eigenvalues(k) > -1e-12 * scale) {
            out.eigenvalues(k) = 0.0;
        }
    }
    if (d < dims) {
        const double gap = eig.values(d - 1) - eig.values(d);
        if (gap < 1e-12 * scale) {
            out.warnings.push_back("degenerate subspace: eigenvalue gap " + std::to_string(gap) +
                                   " between components " + std::to_string(d) + " and " +
                                   std::to_string(d + 1));
        }
    }
    return out;
}

inline SubspaceBasis pca_subspace(const Domain &x, Index d) { return pca_subspace(x.samples(), d); }

} // namespace subalign
