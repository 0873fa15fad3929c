#pragma once

// Sparse higher-order PCA by per-mode geometric column selection.
//
// Every mode is solved on the unfolding of the original tensor, so modes are
// independent of each other and of their processing order. The factor U_n is
// the rank-R_n PCA basis of the selected columns of X_(n); the core is
// X x_1 U_1ᵀ ... x_N U_Nᵀ.

#include <chrono>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "geohopca/select.hpp"
#include "geohopca/tensor.hpp"

namespace geohopca {

struct ShopcaConfig {
    std::vector<std::size_t> ranks;
    std::vector<std::size_t> sparsity;
    std::vector<std::optional<double>> eta;  // per mode; empty or nullopt entries mean AUTO
    std::size_t max_cuts = 500;
    std::uint64_t node_budget = 50'000'000;
    bool parallel_modes = false;

    std::optional<double> eta_for(std::size_t n) const { return n < eta.size() ? eta[n] : std::nullopt; }

    void validate(const Shape& shape) const {
        const std::size_t N = shape.order();
        detail::require(ranks.size() == N, "config: need " + std::to_string(N) + " ranks, got " + std::to_string(ranks.size()));
        detail::require(sparsity.size() == N,
                        "config: need " + std::to_string(N) + " sparsity levels, got " + std::to_string(sparsity.size()));
        detail::require(eta.empty() || eta.size() == N, "config: eta must be AUTO or one value per mode");
        detail::require(max_cuts >= 1, "config: max_cuts must be at least 1");
        for (std::size_t n = 0; n < N; ++n) {
            const std::string m = "mode " + std::to_string(n + 1) + ": ";
            detail::require(ranks[n] >= 1, m + "rank must be positive");
            detail::require(sparsity[n] >= 1, m + "sparsity must be positive");
            detail::require(ranks[n] <= shape[n] && ranks[n] <= sparsity[n], m + "rank must satisfy R <= min(J, k)");
            detail::require(sparsity[n] <= shape.co_size(n), m + "sparsity exceeds the unfolding's column count");
            if (auto e = eta_for(n)) detail::require(*e >= 0.0 && std::isfinite(*e), m + "eta must be >= 0");
        }
    }
};

struct ModeSolve {
    Matrix factor;
    Support support;
    double eta_achieved = 0.0;
    double eta_target = 0.0;
    double explained_variance = 0.0;
    std::size_t cuts_used = 0;
    SelectorStatus status = SelectorStatus::Converged;
    double seconds = 0.0;
};

struct DecompositionResult {
    std::vector<Matrix> factors;
    DenseTensor core;
    std::vector<ModeSolve> modes;  // factor copies are not kept here
    std::optional<double> bound;

    std::vector<Support> supports() const {
        std::vector<Support> s;
        for (const auto& m : modes) s.push_back(m.support);
        return s;
    }
    bool all_converged() const {
        for (const auto& m : modes)
            if (m.status != SelectorStatus::Converged) return false;
        return true;
    }
};

/// X x_1 U_1ᵀ x_2 ... x_N U_Nᵀ
inline DenseTensor project_core(const DenseTensor& x, std::span<const Matrix> factors) {
    detail::require(factors.size() == x.order(), "core: need one factor per mode");
    DenseTensor g = x;
    for (std::size_t n = 0; n < factors.size(); ++n) {
        detail::require(factors[n].rows() == x.shape()[n], "core: factor row count mismatch at mode " + std::to_string(n + 1));
        g = mode_product(g, n, factors[n].transpose());
    }
    return g;
}

inline ModeSolve solve_mode(const DenseTensor& x, std::size_t n, const ShopcaConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    ModeSolve out;
    const std::size_t jn = x.shape()[n];
    if (jn == 1) {
        // One-row unfolding: the only orthonormal 1x1 basis, nothing to select.
        out.factor = Matrix::identity(1);
        out.support = Support({}, x.shape().co_size(n));
    } else {
        SelectorConfig sc;
        sc.k = config.sparsity[n];
        sc.r = config.ranks[n];
        sc.eta = config.eta_for(n);
        sc.max_cuts = config.max_cuts;
        sc.node_budget = config.node_budget;
        SelectorResult sel = select_columns(unfold(x, n), sc);
        out.factor = std::move(sel.basis.u);
        out.support = std::move(sel.support);
        out.eta_achieved = sel.eta_achieved;
        out.eta_target = sel.eta_target;
        out.explained_variance = sel.explained_variance;
        out.cuts_used = sel.cuts_used;
        out.status = sel.status;
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

/// Per-mode a-priori bounds: for each n, the energy of the k_n largest
/// columns of the rank-R_n PCA residual of X_(n).
inline std::vector<double> mode_error_bounds(const DenseTensor& x, std::span<const std::size_t> ranks,
                                             std::span<const std::size_t> sparsity) {
    std::vector<double> out;
    for (std::size_t n = 0; n < x.order(); ++n)
        out.push_back(default_eta(unfold(x, n), sparsity[n], ranks[n]).eta);
    return out;
}

inline double tensor_error_bound(const DenseTensor& x, const ShopcaConfig& config) {
    config.validate(x.shape());
    double b = 0.0;
    for (double v : mode_error_bounds(x, config.ranks, config.sparsity)) b += v;
    return b;
}

inline DecompositionResult sparse_geo_hopca(const DenseTensor& x, const ShopcaConfig& config) {
    config.validate(x.shape());
    const std::size_t N = x.order();
    DecompositionResult res;
    res.modes.resize(N);

    auto run = [&](std::size_t n) {
        try {
            return solve_mode(x, n, config);
        } catch (const Error& e) {
            throw Error(e.kind(), "mode " + std::to_string(n + 1) + ": " + e.what());
        }
    };
    if (config.parallel_modes && N > 1) {
        std::vector<std::future<ModeSolve>> jobs;
        for (std::size_t n = 0; n < N; ++n) jobs.push_back(std::async(std::launch::async, run, n));
        for (std::size_t n = 0; n < N; ++n) res.modes[n] = jobs[n].get();
    } else {
        for (std::size_t n = 0; n < N; ++n) res.modes[n] = run(n);
    }
    for (auto& m : res.modes) res.factors.push_back(m.factor);
    for (auto& m : res.modes) m.factor = Matrix();
    res.core = project_core(x, res.factors);
    res.bound = tensor_error_bound(x, config);
    return res;
}

/// ‖X − X x_1 U_1U_1ᵀ ... x_N U_NU_Nᵀ‖²_F
inline double objective_f(const DenseTensor& x, std::span<const Matrix> factors) {
    detail::require(factors.size() == x.order(), "objective_f: need one factor per mode");
    DenseTensor y = x;
    for (std::size_t n = 0; n < factors.size(); ++n) {
        const Matrix& u = factors[n];
        detail::require(u.rows() == x.shape()[n], "objective_f: factor row count mismatch at mode " + std::to_string(n + 1));
        y = mode_product(y, n, matmul(u, u.transpose()));
    }
    return frobenius_norm_sq(x - y);
}

/// Σ_n ‖X_(n) − U_nU_nᵀX_(n)‖²_F, which dominates objective_f.
inline double sum_of_mode_errors(const DenseTensor& x, std::span<const Matrix> factors) {
    detail::require(factors.size() == x.order(), "sum_of_mode_errors: need one factor per mode");
    double s = 0.0;
    for (std::size_t n = 0; n < factors.size(); ++n)
        s += frobenius_norm_sq(project_out(unfold(x, n), factors[n]));
    return s;
}

/// Truncated HOSVD: U_n = leading R_n left singular vectors of X_(n).
inline DecompositionResult hosvd(const DenseTensor& x, std::span<const std::size_t> ranks) {
    detail::require(ranks.size() == x.order(), "hosvd: need one rank per mode");
    DecompositionResult res;
    for (std::size_t n = 0; n < x.order(); ++n) {
        const auto t0 = std::chrono::steady_clock::now();
        const Matrix xn = unfold(x, n);
        detail::require(ranks[n] >= 1 && ranks[n] <= std::min(xn.rows(), xn.cols()),
                        "hosvd: rank out of range at mode " + std::to_string(n + 1));
        PcaBasis b = truncated_left_svd(xn, ranks[n]);
        ModeSolve m;
        m.eta_achieved = projection_error_sq(xn, b);
        m.explained_variance = b.captured_energy();
        m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        res.factors.push_back(std::move(b.u));
        res.modes.push_back(std::move(m));
    }
    res.core = project_core(x, res.factors);
    return res;
}

/// The k rows of u with the largest Euclidean norm (ties: lowest index).
inline Support threshold_support(const Matrix& u, std::size_t k) {
    detail::require(k >= 1 && k <= u.rows(), "threshold_support: k out of range");
    std::vector<double> norms(u.rows(), 0.0);
    for (std::size_t j = 0; j < u.cols(); ++j)
        for (std::size_t i = 0; i < u.rows(); ++i) norms[i] += u(i, j) * u(i, j);
    return Support(detail::top_k_desc(norms, k), u.rows());
}

}  // namespace geohopca
