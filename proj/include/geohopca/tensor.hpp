#pragma once

// Dense N-way tensors and matrices with mode-1-fastest (column-major) storage,
// plus the multilinear primitives: unfold, fold, mode product, Tucker
// reconstruction and rank-1 outer products.
//
// Modes are 0-based in the C++ API. The column map of unfold(x, n) is the
// Kolda-Bader one: remaining modes in ascending order, lowest mode fastest.

#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "geohopca/error.hpp"

namespace geohopca {

class Shape {
public:
    Shape() = default;
    explicit Shape(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
        detail::require(!dims_.empty(), "shape must have at least one mode");
        std::size_t total = 1;
        for (std::size_t d : dims_) {
            detail::require(d >= 1, "shape dimensions must be positive");
            detail::require(total <= std::numeric_limits<std::size_t>::max() / d,
                            "shape element count overflows");
            total *= d;
        }
    }
    Shape(std::initializer_list<std::size_t> dims) : Shape(std::vector<std::size_t>(dims)) {}

    std::size_t order() const noexcept { return dims_.size(); }
    std::size_t operator[](std::size_t n) const { return dims_[n]; }
    const std::vector<std::size_t>& dims() const noexcept { return dims_; }

    std::size_t numel() const noexcept {
        return std::accumulate(dims_.begin(), dims_.end(), std::size_t{1},
                               std::multiplies<>());
    }
    /// Product of all dimensions except mode n (column count of unfold(., n)).
    std::size_t co_size(std::size_t n) const { return numel() / dims_.at(n); }

    bool operator==(const Shape&) const = default;

    std::string str() const {
        std::string s = "(";
        for (std::size_t i = 0; i < dims_.size(); ++i) {
            if (i) s += "x";
            s += std::to_string(dims_[i]);
        }
        return s + ")";
    }

private:
    std::vector<std::size_t> dims_;
};

namespace detail {
inline void require_finite(std::span<const double> v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) fail(ErrorKind::InvalidArgument, std::string(what) + ": non-finite entry");
}
}  // namespace detail

/// Column-major dense matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        detail::require(data_.size() == rows_ * cols_, "matrix data length mismatch");
        detail::require_finite(data_, "matrix");
    }

    /// Row-major nested initializer, convenient in tests: {{1,2},{3,4}}.
    static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
        const std::size_t r = rows.size();
        const std::size_t c = r ? rows.front().size() : 0;
        Matrix m(r, c);
        for (std::size_t i = 0; i < r; ++i) {
            detail::require(rows[i].size() == c, "ragged row initializer");
            for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
        }
        detail::require_finite(m.data_, "matrix");
        return m;
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i + rows_ * j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i + rows_ * j]; }

    std::span<double> col(std::size_t j) { return {data_.data() + rows_ * j, rows_}; }
    std::span<const double> col(std::size_t j) const { return {data_.data() + rows_ * j, rows_}; }

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t j = 0; j < cols_; ++j)
            for (std::size_t i = 0; i < rows_; ++i) t(j, i) = (*this)(i, j);
        return t;
    }

    /// Columns listed in `idx`, in that order.
    Matrix select_cols(std::span<const std::size_t> idx) const {
        Matrix m(rows_, idx.size());
        for (std::size_t k = 0; k < idx.size(); ++k) {
            detail::require(idx[k] < cols_, "column index out of range");
            auto src = col(idx[k]);
            std::copy(src.begin(), src.end(), m.col(k).begin());
        }
        return m;
    }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double frobenius_norm_sq(const Matrix& m) {
    double s = 0.0;
    for (double v : m.data()) s += v * v;
    return s;
}

/// a * b
inline Matrix matmul(const Matrix& a, const Matrix& b) {
    detail::require(a.cols() == b.rows(), "matmul inner dimension mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j) {
        auto cj = c.col(j);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double bkj = b(k, j);
            if (bkj == 0.0) continue;
            auto ak = a.col(k);
            for (std::size_t i = 0; i < a.rows(); ++i) cj[i] += ak[i] * bkj;
        }
    }
    return c;
}

/// aᵀ * b, computed column-dot-column without forming the transpose.
inline Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    detail::require(a.rows() == b.rows(), "matmul_tn row mismatch");
    Matrix c(a.cols(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j)
        for (std::size_t i = 0; i < a.cols(); ++i) c(i, j) = dot(a.col(i), b.col(j));
    return c;
}

/// aᵀa (symmetric, cols x cols).
inline Matrix gram_cols(const Matrix& a) {
    Matrix g(a.cols(), a.cols());
    for (std::size_t j = 0; j < a.cols(); ++j)
        for (std::size_t i = 0; i <= j; ++i) {
            const double v = dot(a.col(i), a.col(j));
            g(i, j) = v;
            g(j, i) = v;
        }
    return g;
}

/// aaᵀ (symmetric, rows x rows).
inline Matrix gram_rows(const Matrix& a) {
    const std::size_t n = a.rows();
    Matrix g(n, n);
    for (std::size_t k = 0; k < a.cols(); ++k) {
        auto ak = a.col(k);
        for (std::size_t j = 0; j < n; ++j) {
            const double akj = ak[j];
            if (akj == 0.0) continue;
            auto gj = g.col(j);
            for (std::size_t i = j; i < n; ++i) gj[i] += ak[i] * akj;
        }
    }
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = j + 1; i < n; ++i) g(j, i) = g(i, j);
    return g;
}

class DenseTensor {
public:
    DenseTensor() = default;
    explicit DenseTensor(Shape shape) : shape_(std::move(shape)), data_(shape_.numel(), 0.0) {}
    DenseTensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
        detail::require(data_.size() == shape_.numel(), "tensor data length does not match shape " + shape_.str());
        detail::require_finite(data_, "tensor");
    }

    const Shape& shape() const noexcept { return shape_; }
    std::size_t order() const noexcept { return shape_.order(); }
    std::size_t numel() const noexcept { return data_.size(); }

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    /// Linear offset of a 0-based multi-index.
    std::size_t offset(std::span<const std::size_t> idx) const {
        std::size_t off = 0, stride = 1;
        for (std::size_t k = 0; k < shape_.order(); ++k) {
            off += idx[k] * stride;
            stride *= shape_[k];
        }
        return off;
    }
    double& at(std::initializer_list<std::size_t> idx) { return data_[offset({idx.begin(), idx.size()})]; }
    double at(std::initializer_list<std::size_t> idx) const { return data_[offset({idx.begin(), idx.size()})]; }

    bool operator==(const DenseTensor&) const = default;

private:
    Shape shape_;
    std::vector<double> data_;
};

namespace detail {
// Sizes of the index blocks before and after mode n.
inline std::pair<std::size_t, std::size_t> split_at(const Shape& s, std::size_t n) {
    std::size_t left = 1, right = 1;
    for (std::size_t k = 0; k < n; ++k) left *= s[k];
    for (std::size_t k = n + 1; k < s.order(); ++k) right *= s[k];
    return {left, right};
}
}  // namespace detail

inline double frobenius_norm_sq(const DenseTensor& x) {
    double s = 0.0;
    for (double v : x.data()) s += v * v;
    return s;
}

/// Mode-n matricization X_(n): J_n x prod_{i != n} J_i.
inline Matrix unfold(const DenseTensor& x, std::size_t n) {
    detail::require(n < x.order(), "unfold: mode out of range");
    const auto [left, right] = detail::split_at(x.shape(), n);
    const std::size_t jn = x.shape()[n];
    Matrix m(jn, left * right);
    auto src = x.data();
    auto dst = m.data();
    // linear = l + left*(i + jn*r), column = l + left*r
    for (std::size_t r = 0; r < right; ++r)
        for (std::size_t i = 0; i < jn; ++i) {
            const double* s = src.data() + left * (i + jn * r);
            for (std::size_t l = 0; l < left; ++l) dst[i + jn * (l + left * r)] = s[l];
        }
    return m;
}

inline DenseTensor fold(const Matrix& m, std::size_t n, const Shape& shape) {
    detail::require(n < shape.order(), "fold: mode out of range");
    detail::require(m.rows() == shape[n] && m.cols() == shape.co_size(n),
                    "fold: matrix dimensions do not match shape " + shape.str());
    const auto [left, right] = detail::split_at(shape, n);
    const std::size_t jn = shape[n];
    DenseTensor x(shape);
    auto dst = x.data();
    auto src = m.data();
    for (std::size_t r = 0; r < right; ++r)
        for (std::size_t i = 0; i < jn; ++i) {
            double* d = dst.data() + left * (i + jn * r);
            for (std::size_t l = 0; l < left; ++l) d[l] = src[i + jn * (l + left * r)];
        }
    return x;
}

/// Y = X x_n U, i.e. Y_(n) = U X_(n). Mode n's extent becomes u.rows().
inline DenseTensor mode_product(const DenseTensor& x, std::size_t n, const Matrix& u) {
    detail::require(n < x.order(), "mode_product: mode out of range");
    const std::size_t jn = x.shape()[n];
    detail::require(u.cols() == jn, "mode_product: inner dimension mismatch");
    const auto [left, right] = detail::split_at(x.shape(), n);
    std::vector<std::size_t> dims = x.shape().dims();
    dims[n] = u.rows();
    DenseTensor y{Shape(dims)};
    const std::size_t rn = u.rows();
    auto src = x.data();
    auto dst = y.data();
    for (std::size_t r = 0; r < right; ++r)
        for (std::size_t i = 0; i < jn; ++i) {
            const double* s = src.data() + left * (i + jn * r);
            for (std::size_t a = 0; a < rn; ++a) {
                const double uai = u(a, i);
                if (uai == 0.0) continue;
                double* d = dst.data() + left * (a + rn * r);
                for (std::size_t l = 0; l < left; ++l) d[l] += uai * s[l];
            }
        }
    return y;
}

/// G x_1 U_1 x_2 U_2 ... x_N U_N, applied in ascending mode order.
inline DenseTensor tucker_reconstruct(const DenseTensor& g, std::span<const Matrix> factors) {
    detail::require(factors.size() == g.order(), "tucker_reconstruct: need one factor per mode");
    DenseTensor y = g;
    for (std::size_t n = 0; n < factors.size(); ++n) {
        detail::require(factors[n].cols() == g.shape()[n],
                        "tucker_reconstruct: factor " + std::to_string(n + 1) + " column count mismatch");
        y = mode_product(y, n, factors[n]);
    }
    return y;
}

/// weight * v_1 o v_2 o ... o v_N.
inline DenseTensor outer_rank1(double weight, std::span<const std::vector<double>> vectors) {
    detail::require(!vectors.empty(), "outer_rank1: empty vector list");
    std::vector<std::size_t> dims;
    for (const auto& v : vectors) {
        detail::require(!v.empty(), "outer_rank1: empty vector");
        dims.push_back(v.size());
    }
    DenseTensor x{Shape(dims)};
    auto out = x.data();
    // Build up the product one mode at a time; block of size `len` is replicated.
    out[0] = weight;
    std::size_t len = 1;
    for (const auto& v : vectors) {
        for (std::size_t i = v.size(); i-- > 0;)
            for (std::size_t l = 0; l < len; ++l) out[l + len * i] = out[l] * v[i];
        len *= v.size();
    }
    return x;
}

inline DenseTensor operator+(DenseTensor a, const DenseTensor& b) {
    detail::require(a.shape() == b.shape(), "tensor add: shape mismatch");
    auto ad = a.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < ad.size(); ++i) ad[i] += bd[i];
    return a;
}

inline DenseTensor operator-(DenseTensor a, const DenseTensor& b) {
    detail::require(a.shape() == b.shape(), "tensor subtract: shape mismatch");
    auto ad = a.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < ad.size(); ++i) ad[i] -= bd[i];
    return a;
}

}  // namespace geohopca
