#pragma once

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "geohopca/tensor.hpp"

namespace testutil {

inline geohopca::Matrix random_matrix(std::mt19937_64& g, std::size_t r, std::size_t c) {
    std::normal_distribution<double> n;
    std::vector<double> v(r * c);
    for (auto& x : v) x = n(g);
    return geohopca::Matrix(r, c, std::move(v));
}

inline geohopca::DenseTensor random_tensor(std::mt19937_64& g, std::vector<std::size_t> dims) {
    std::normal_distribution<double> n;
    geohopca::Shape s(dims);
    std::vector<double> v(s.numel());
    for (auto& x : v) x = n(g);
    return geohopca::DenseTensor(s, std::move(v));
}

inline Eigen::MatrixXd to_eigen(const geohopca::Matrix& m) {
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j)
        for (std::size_t i = 0; i < m.rows(); ++i) e(i, j) = m(i, j);
    return e;
}

inline geohopca::Matrix from_eigen(const Eigen::MatrixXd& e) {
    geohopca::Matrix m(e.rows(), e.cols());
    for (Eigen::Index j = 0; j < e.cols(); ++j)
        for (Eigen::Index i = 0; i < e.rows(); ++i) m(i, j) = e(i, j);
    return m;
}

// Random matrix with orthonormal columns (QR of a Gaussian matrix).
inline geohopca::Matrix random_orthonormal(std::mt19937_64& g, std::size_t r, std::size_t c) {
    Eigen::MatrixXd a = to_eigen(random_matrix(g, r, c));
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(r, c);
    return from_eigen(q);
}

inline double max_orthonormality_error(const geohopca::Matrix& u) {
    Eigen::MatrixXd e = to_eigen(u);
    return (e.transpose() * e - Eigen::MatrixXd::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
}

// Squared singular values of a, descending (oracle: Eigen JacobiSVD).
inline std::vector<double> sigma_sq(const geohopca::Matrix& a) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(a));
    std::vector<double> out;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) out.push_back(svd.singularValues()(i) * svd.singularValues()(i));
    return out;
}

}  // namespace testutil
