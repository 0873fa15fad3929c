#pragma once

// Synthetic support recovery on rank-1 third-order tensors
//
//   X = d * u o v o w + E,   E iid N(0, 1)
//
// Sparse modes draw iid N(0,1) entries and zero a uniformly random subset of
// round(fraction * J) of them. Dense modes take the leading singular pair of
// an iid N(0,1) matrix: consecutive dense modes (a, b) share one J_a x J_b
// matrix (left vector -> a, right vector -> b); a lone dense mode uses the
// left vector of a J x J matrix.
//
// Random stream order for a given seed: modes 1..N in order (sparse entries,
// then the shuffle; or the dense pair matrix, column-major), then the noise
// tensor in storage order.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "geohopca/rng.hpp"
#include "geohopca/select.hpp"
#include "geohopca/shopca.hpp"

namespace geohopca::experiments {

struct ScenarioSpec {
    std::vector<std::size_t> dims;
    std::vector<bool> sparse_modes;  // one flag per mode
    double sparsity_fraction = 0.5;
    double signal_weight = 100.0;
    std::uint64_t seed = 0;

    void validate() const {
        detail::require(!dims.empty(), "scenario: no modes");
        detail::require(sparse_modes.size() == dims.size(), "scenario: one sparsity flag per mode");
        for (auto d : dims) detail::require(d >= 1, "scenario: dimensions must be positive");
        detail::require(sparsity_fraction > 0.0 && sparsity_fraction < 1.0, "scenario: fraction must be in (0,1)");
        detail::require(std::isfinite(signal_weight), "scenario: signal weight must be finite");
    }
};

/// The four reference scenarios: 1 = 100^3 sparse u; 2 = 1000x20x20 sparse u;
/// 3 = 100^3 all sparse; 4 = 1000x20x20 all sparse.
inline ScenarioSpec scenario(int id, std::uint64_t seed = 0) {
    ScenarioSpec s;
    s.seed = seed;
    switch (id) {
        case 1: s.dims = {100, 100, 100}; s.sparse_modes = {true, false, false}; break;
        case 2: s.dims = {1000, 20, 20}; s.sparse_modes = {true, false, false}; break;
        case 3: s.dims = {100, 100, 100}; s.sparse_modes = {true, true, true}; break;
        case 4: s.dims = {1000, 20, 20}; s.sparse_modes = {true, true, true}; break;
        default: detail::fail(ErrorKind::InvalidArgument, "scenario must be 1..4, got " + std::to_string(id));
    }
    return s;
}

struct GroundTruth {
    std::vector<std::vector<double>> factors;
    std::vector<std::vector<std::size_t>> supports;  // 0-based nonzero indices per mode
};

struct SyntheticInstance {
    DenseTensor x;
    GroundTruth truth;
};

namespace internal {

inline std::vector<double> normals(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    return v;
}

inline Matrix gaussian_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
    return Matrix(rows, cols, normals(rng, rows * cols));
}

}  // namespace internal

inline SyntheticInstance gen_synthetic(const ScenarioSpec& spec) {
    spec.validate();
    const std::size_t N = spec.dims.size();
    Rng rng(spec.seed);
    GroundTruth truth;
    truth.factors.resize(N);
    truth.supports.resize(N);
    std::vector<bool> done(N, false);

    for (std::size_t n = 0; n < N; ++n) {
        if (done[n]) continue;
        const std::size_t J = spec.dims[n];
        if (spec.sparse_modes[n]) {
            std::vector<double> v = internal::normals(rng, J);
            const auto zeros = static_cast<std::size_t>(std::llround(spec.sparsity_fraction * static_cast<double>(J)));
            std::vector<std::size_t> perm(J);
            std::iota(perm.begin(), perm.end(), 0);
            for (std::size_t i = 0; i < zeros; ++i) std::swap(perm[i], perm[i + rng.below(J - i)]);
            for (std::size_t i = 0; i < zeros; ++i) v[perm[i]] = 0.0;
            truth.factors[n] = std::move(v);
        } else {
            std::size_t mate = n + 1;
            while (mate < N && spec.sparse_modes[mate]) ++mate;
            if (mate < N) {
                const Matrix m = internal::gaussian_matrix(rng, J, spec.dims[mate]);
                const PcaBasis b = truncated_left_svd(m, 1);
                auto u = b.u.col(0);
                truth.factors[n].assign(u.begin(), u.end());
                std::vector<double> v(spec.dims[mate], 0.0);
                for (std::size_t j = 0; j < v.size(); ++j) v[j] = dot(m.col(j), u) / b.singular_values[0];
                truth.factors[mate] = std::move(v);
                done[mate] = true;
            } else {
                const Matrix m = internal::gaussian_matrix(rng, J, J);
                auto u = truncated_left_svd(m, 1).u.col(0);
                truth.factors[n].assign(u.begin(), u.end());
            }
        }
        done[n] = true;
    }
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t i = 0; i < truth.factors[n].size(); ++i)
            if (truth.factors[n][i] != 0.0) truth.supports[n].push_back(i);

    DenseTensor x = outer_rank1(spec.signal_weight, truth.factors);
    for (double& e : x.data()) e += rng.normal();
    return {std::move(x), std::move(truth)};
}

/// Mode-n support by geometric selection on the transposed unfolding, whose
/// columns are the mode-n slices; selected columns are mode-n indices.
inline Support recover_support(const DenseTensor& x, std::size_t mode, std::size_t k, std::size_t r,
                               SelectorConfig cfg = {}) {
    detail::require(mode < x.order(), "recover_support: mode out of range");
    detail::require(k >= 1 && k <= x.shape()[mode], "recover_support: k out of range");
    cfg.k = k;
    cfg.r = r;
    return select_columns(unfold(x, mode).transpose(), cfg).support;
}

/// Baseline: largest-magnitude rows of the truncated HOSVD factor of mode n.
inline Support hosvd_threshold_support(const Matrix& hosvd_factor, std::size_t k) {
    return threshold_support(hosvd_factor, k);
}

struct RecoveryMetrics {
    double tp_rate = 0.0;
    double fp_rate = 0.0;
};

/// tp = |est ∩ truth| / |truth|  (1 when truth is empty)
/// fp = |est \ truth| / (total − |truth|)  (0 when truth covers everything)
inline RecoveryMetrics tp_fp(const Support& estimated, const std::vector<std::size_t>& truth, std::size_t total) {
    std::vector<std::size_t> t(truth);
    std::sort(t.begin(), t.end());
    for (auto i : t) detail::require(i < total, "tp_fp: truth index out of range");
    for (auto i : estimated.indices()) detail::require(i < total, "tp_fp: estimate index out of range");
    std::size_t hit = 0;
    for (auto i : estimated.indices())
        if (std::binary_search(t.begin(), t.end(), i)) ++hit;
    const std::size_t miss = estimated.size() - hit;
    RecoveryMetrics m;
    m.tp_rate = t.empty() ? 1.0 : static_cast<double>(hit) / static_cast<double>(t.size());
    m.fp_rate = total == t.size() ? 0.0 : static_cast<double>(miss) / static_cast<double>(total - t.size());
    return m;
}

struct RocCurve {
    std::vector<std::pair<double, double>> points;  // (fp, tp), ascending
    double auc = 0.0;
};

/// Adds the (0,0) and (1,1) corners, sorts, dedups and integrates.
inline RocCurve roc_from_points(std::vector<std::pair<double, double>> pts) {
    pts.emplace_back(0.0, 0.0);
    pts.emplace_back(1.0, 1.0);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    RocCurve c;
    c.points = std::move(pts);
    for (std::size_t i = 1; i < c.points.size(); ++i) {
        const auto [x0, y0] = c.points[i - 1];
        const auto [x1, y1] = c.points[i];
        c.auc += 0.5 * (x1 - x0) * (y0 + y1);
    }
    return c;
}

enum class RocMethod { GeoHopca, HosvdThreshold };

inline const char* to_string(RocMethod m) { return m == RocMethod::GeoHopca ? "sparseGeoHOPCA" : "HOPCA"; }

/// Default sweep: 10 evenly spaced cardinalities up to J.
inline std::vector<std::size_t> default_k_grid(std::size_t J) {
    std::vector<std::size_t> g;
    for (std::size_t i = 1; i <= 10; ++i) {
        const std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(i * J) / 10.0)));
        if (g.empty() || g.back() != k) g.push_back(k);
    }
    return g;
}

/// Per-k metrics for one method on one instance.
inline std::vector<RecoveryMetrics> sweep(const DenseTensor& x, std::size_t mode, const std::vector<std::size_t>& truth,
                                          RocMethod method, const std::vector<std::size_t>& grid, std::size_t r = 1,
                                          const SelectorConfig& cfg = {}) {
    detail::require(!grid.empty(), "roc: empty grid");
    detail::require(std::is_sorted(grid.begin(), grid.end()), "roc: grid must be sorted");
    const std::size_t J = x.shape()[mode];
    std::vector<RecoveryMetrics> out;
    if (method == RocMethod::GeoHopca) {
        for (auto k : grid) out.push_back(tp_fp(recover_support(x, mode, k, r, cfg), truth, J));
    } else {
        const Matrix u = truncated_left_svd(unfold(x, mode), r).u;
        for (auto k : grid) out.push_back(tp_fp(hosvd_threshold_support(u, k), truth, J));
    }
    return out;
}

inline RocCurve roc_curve(const DenseTensor& x, std::size_t mode, const std::vector<std::size_t>& truth, RocMethod method,
                          const std::vector<std::size_t>& grid, std::size_t r = 1, const SelectorConfig& cfg = {}) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& m : sweep(x, mode, truth, method, grid, r, cfg)) pts.emplace_back(m.fp_rate, m.tp_rate);
    return roc_from_points(std::move(pts));
}

}  // namespace geohopca::experiments
