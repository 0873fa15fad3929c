#pragma once

// Truncated left singular bases and classical PCA residuals.
//
// The SVD is taken through whichever Gram matrix is smaller: AᵀA when
// cols <= rows (then U = AV/sigma), AAᵀ otherwise. Along the selection hot
// path A is a J x k submatrix with small k, so the cost is O(k^3 + J k^2).

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "geohopca/support.hpp"
#include "geohopca/symmetric_eigen.hpp"
#include "geohopca/tensor.hpp"

namespace geohopca {

/// Orthonormal J x R basis with its singular values (nonincreasing).
struct PcaBasis {
    Matrix u;
    std::vector<double> singular_values;

    std::size_t rank() const noexcept { return u.cols(); }
    /// tr(UᵀAAᵀU) of the matrix the basis was computed from.
    double captured_energy() const {
        double s = 0.0;
        for (double v : singular_values) s += v * v;
        return s;
    }
};

namespace detail {

// Entry of largest magnitude made nonnegative; ties go to the lowest index.
inline void canonical_signs(Matrix& u) {
    for (std::size_t j = 0; j < u.cols(); ++j) {
        auto c = u.col(j);
        std::size_t best = 0;
        for (std::size_t i = 1; i < c.size(); ++i)
            if (std::abs(c[i]) > std::abs(c[best])) best = i;
        if (c[best] < 0)
            for (double& x : c) x = -x;
    }
}

// Removes components along columns [0, j) of q from w, twice for stability.
inline void orthogonalize_against(const Matrix& q, std::size_t j, std::span<double> w) {
    for (int pass = 0; pass < 2; ++pass)
        for (std::size_t k = 0; k < j; ++k) {
            auto qk = q.col(k);
            const double c = dot(qk, w);
            for (std::size_t i = 0; i < w.size(); ++i) w[i] -= c * qk[i];
        }
}

inline double norm2(std::span<const double> w) { return std::sqrt(dot(w, w)); }

// Makes column j of q unit-norm and orthogonal to earlier columns. If the
// candidate has collapsed (rank-deficient input), substitutes the first
// coordinate vector that extends the basis.
inline void finish_column(Matrix& q, std::size_t j) {
    auto w = q.col(j);
    const double before = norm2(w);
    orthogonalize_against(q, j, w);
    double nrm = norm2(w);
    if (before > 0 && nrm > 1e-8 * before && nrm > 1e-300) {
        for (double& x : w) x /= nrm;
        return;
    }
    for (std::size_t e = 0; e < q.rows(); ++e) {
        std::fill(w.begin(), w.end(), 0.0);
        w[e] = 1.0;
        orthogonalize_against(q, j, w);
        nrm = norm2(w);
        if (nrm > 0.5) {
            for (double& x : w) x /= nrm;
            return;
        }
    }
    fail(ErrorKind::Numeric, "could not complete orthonormal basis");
}

}  // namespace detail

/// Leading r left singular vectors of a.
inline PcaBasis truncated_left_svd(const Matrix& a, std::size_t r) {
    detail::require(r >= 1 && r <= std::min(a.rows(), a.cols()),
                    "truncated_left_svd: rank " + std::to_string(r) + " out of range for " +
                        std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " matrix");
    PcaBasis out;
    out.singular_values.resize(r);
    out.u = Matrix(a.rows(), r);

    if (a.cols() <= a.rows()) {
        const SymmetricEigen eig = symmetric_eigen(gram_cols(a));
        const std::size_t p = a.cols();
        for (std::size_t k = 0; k < r; ++k) {
            const std::size_t src = p - 1 - k;
            const double sigma = std::sqrt(std::max(eig.values[src], 0.0));
            out.singular_values[k] = sigma;
            auto uk = out.u.col(k);
            std::fill(uk.begin(), uk.end(), 0.0);
            if (sigma > 0.0) {
                auto vk = eig.vectors.col(src);
                for (std::size_t j = 0; j < p; ++j) {
                    const double c = vk[j] / sigma;
                    if (c == 0.0) continue;
                    auto aj = a.col(j);
                    for (std::size_t i = 0; i < a.rows(); ++i) uk[i] += c * aj[i];
                }
            }
            detail::finish_column(out.u, k);
        }
    } else {
        const SymmetricEigen eig = symmetric_eigen(gram_rows(a));
        const std::size_t n = a.rows();
        for (std::size_t k = 0; k < r; ++k) {
            const std::size_t src = n - 1 - k;
            out.singular_values[k] = std::sqrt(std::max(eig.values[src], 0.0));
            auto s = eig.vectors.col(src);
            std::copy(s.begin(), s.end(), out.u.col(k).begin());
        }
    }
    detail::canonical_signs(out.u);
    return out;
}

/// PCA basis of the submatrix formed by the supported columns.
inline PcaBasis pca_basis_for_columns(const Matrix& a, const Support& support, std::size_t r) {
    detail::require(!support.empty(), "pca_basis_for_columns: empty support");
    detail::require(support.universe() == a.cols(), "pca_basis_for_columns: support universe mismatch");
    detail::require(r >= 1 && r <= std::min(a.rows(), support.size()),
                    "pca_basis_for_columns: rank too large for the selected submatrix");
    return truncated_left_svd(a.select_cols(support.indices()), r);
}

/// a - UUᵀa for an orthonormal U.
inline Matrix project_out(const Matrix& a, const Matrix& u) {
    detail::require(u.rows() == a.rows(), "projection: row mismatch");
    const Matrix coeff = matmul_tn(u, a);
    Matrix res = a;
    for (std::size_t j = 0; j < a.cols(); ++j) {
        auto rj = res.col(j);
        for (std::size_t k = 0; k < u.cols(); ++k) {
            const double c = coeff(k, j);
            auto uk = u.col(k);
            for (std::size_t i = 0; i < a.rows(); ++i) rj[i] -= c * uk[i];
        }
    }
    return res;
}

/// ‖A − UUᵀA‖²_F
inline double projection_error_sq(const Matrix& a, const PcaBasis& basis) {
    detail::require(basis.u.rows() == a.rows(), "projection_error_sq: row mismatch");
    return frobenius_norm_sq(project_out(a, basis.u));
}

struct PcaResidual {
    Matrix residual;                     // A − V*V*ᵀA
    std::vector<double> column_norms_sq; // ‖residual(:, j)‖²
    PcaBasis basis;                      // V*
};

inline PcaResidual pca_residual(const Matrix& a, std::size_t r) {
    PcaResidual out;
    out.basis = truncated_left_svd(a, r);
    out.residual = project_out(a, out.basis.u);
    out.column_norms_sq.resize(a.cols());
    for (std::size_t j = 0; j < a.cols(); ++j) {
        auto c = out.residual.col(j);
        out.column_norms_sq[j] = dot(c, c);
    }
    return out;
}

}  // namespace geohopca
