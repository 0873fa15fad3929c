#pragma once

// Geometric column selection: pick at most k columns of A with the largest
// total energy whose rank-r PCA reconstruction error stays within a
// tolerance eta. Supports violating the tolerance are excluded by no-good
// cuts and the selection is re-solved.

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "geohopca/blo.hpp"
#include "geohopca/pca.hpp"

namespace geohopca {

/// Squared column norms.
inline std::vector<double> column_weights(const Matrix& a) {
    std::vector<double> w(a.cols());
    for (std::size_t j = 0; j < a.cols(); ++j) {
        auto c = a.col(j);
        w[j] = dot(c, c);
    }
    return w;
}

struct EtaEval {
    double eta;      // ‖A_s − U[s]U[s]ᵀA_s‖²_F
    PcaBasis basis;  // U[s]
};

inline EtaEval eta_of_support(const Matrix& a, const Support& s, std::size_t r) {
    const Matrix sub = a.select_cols(s.indices());
    detail::require(!s.empty(), "eta_of_support: empty support");
    detail::require(r >= 1 && r <= std::min(a.rows(), s.size()), "eta_of_support: rank too large for support");
    EtaEval out{0.0, truncated_left_svd(sub, r)};
    out.eta = projection_error_sq(sub, out.basis);
    return out;
}

struct DefaultEta {
    double eta;     // sum of the k largest residual column energies
    Support sigma;  // the columns achieving it
};

namespace detail {
inline std::vector<std::size_t> top_k_desc(std::span<const double> v, std::size_t k) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
    idx.resize(std::min(k, idx.size()));
    return idx;
}
}  // namespace detail

/// A-priori tolerance from the rank-r classical PCA residual ε = A − V*V*ᵀA:
/// the total energy of its k highest-energy columns. Any optimal selection of
/// at most k columns has reconstruction error no larger than this.
inline DefaultEta default_eta(const Matrix& a, std::size_t k, std::size_t r) {
    detail::require(r >= 1 && r <= std::min(a.rows(), a.cols()), "default_eta: rank out of range");
    detail::require(k >= 1 && k <= a.cols(), "default_eta: k out of range");
    const PcaResidual res = pca_residual(a, r);
    auto top = detail::top_k_desc(res.column_norms_sq, k);
    std::sort(top.begin(), top.end());
    double eta = 0.0;
    for (auto j : top) eta += res.column_norms_sq[j];
    return {eta, Support(std::move(top), a.cols())};
}

/// ‖S ε‖²_F: residual energy restricted to the given support. Sits between
/// eta(s) and default_eta for the optimal s.
inline double residual_energy_on_support(const Matrix& a, const Support& s, std::size_t r) {
    const PcaResidual res = pca_residual(a, r);
    double e = 0.0;
    for (auto j : s.indices()) e += res.column_norms_sq[j];
    return e;
}

enum class SelectorStatus { Converged, CutBudgetExhausted, Infeasible };

inline const char* to_string(SelectorStatus s) {
    switch (s) {
        case SelectorStatus::Converged: return "Converged";
        case SelectorStatus::CutBudgetExhausted: return "CutBudgetExhausted";
        case SelectorStatus::Infeasible: return "Infeasible";
    }
    return "?";
}

struct SelectorConfig {
    std::size_t k = 1;
    std::size_t r = 1;
    std::optional<double> eta;  // nullopt = AUTO
    std::size_t max_cuts = 500;
    std::uint64_t node_budget = 50'000'000;

    void validate() const {
        detail::require(k >= 1, "selector: k must be positive");
        detail::require(r >= 1, "selector: rank must be positive");
        detail::require(r <= k, "selector: rank must not exceed k");
        detail::require(max_cuts >= 1, "selector: max_cuts must be at least 1");
        detail::require(node_budget >= 1, "selector: node_budget must be positive");
        detail::require(!eta || (*eta >= 0.0 && std::isfinite(*eta)), "selector: eta must be finite and >= 0");
    }
};

struct SelectorResult {
    Support support;
    PcaBasis basis;
    double eta_achieved = 0.0;
    double explained_variance = 0.0;
    double eta_target = 0.0;
    std::size_t cuts_used = 0;
    SelectorStatus status = SelectorStatus::Converged;
};

/// Relative allowance on the eta comparison for round-off in eta(s).
inline constexpr double kEtaRoundoff = 1e-12;

inline SelectorResult select_columns(const Matrix& a, const SelectorConfig& cfg) {
    cfg.validate();
    const std::size_t p = a.cols();
    detail::require(p >= 1, "select_columns: matrix has no columns");
    detail::require(cfg.r <= a.rows(), "select_columns: rank exceeds row count");
    detail::require(cfg.r <= p, "select_columns: rank exceeds column count");
    const std::size_t k = std::min(cfg.k, p);

    const std::vector<double> w = column_weights(a);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    const double eta = cfg.eta ? *cfg.eta : default_eta(a, k, cfg.r).eta;
    const double allowance = kEtaRoundoff * total;

    SelectorResult best;
    bool have_best = false;
    CutPool pool;
    std::size_t cuts_used = 0;
    const BloOptions opts{cfg.r, cfg.node_budget};

    auto finish = [&](SelectorResult r, SelectorStatus status) {
        r.status = status;
        r.cuts_used = cuts_used;
        r.eta_target = eta;
        return r;
    };

    for (;;) {
        auto s = solve_blo(w, k, pool, opts);
        if (!s) return finish(std::move(best), SelectorStatus::Infeasible);

        EtaEval ev = eta_of_support(a, *s, cfg.r);
        double weight = 0.0;
        for (auto j : s->indices()) weight += w[j];
        SelectorResult cur;
        cur.support = *s;
        cur.eta_achieved = ev.eta;
        cur.explained_variance = weight - ev.eta;
        cur.basis = std::move(ev.basis);

        if (cur.eta_achieved <= eta + allowance) return finish(std::move(cur), SelectorStatus::Converged);
        // Round-off-level differences do not displace an earlier support.
        if (!have_best || cur.eta_achieved < best.eta_achieved - allowance) {
            best = cur;
            have_best = true;
        }
        if (cuts_used == cfg.max_cuts) return finish(std::move(best), SelectorStatus::CutBudgetExhausted);
        pool.add(cur.support);
        ++cuts_used;
    }
}

struct BruteForceResult {
    Support support;
    double eta = 0.0;
    double explained = 0.0;
};

inline constexpr std::size_t kBruteForceMaxColumns = 24;

/// Exhaustive search over every support of size r..min(k, p) for the largest
/// explained variance ‖A_s‖²_F − eta(s). Explained variance is evaluated as the
/// sum of the r largest eigenvalues of the |s| x |s| Gram matrix. Near-ties
/// (1e-12 relative) keep the lexicographically smaller support.
inline BruteForceResult brute_force_select(const Matrix& a, std::size_t k, std::size_t r) {
    const std::size_t p = a.cols();
    if (p > kBruteForceMaxColumns)
        detail::fail(ErrorKind::InvalidArgument, "brute_force_select: " + std::to_string(p) +
                                                     " columns exceeds the enumeration guard of " +
                                                     std::to_string(kBruteForceMaxColumns));
    detail::require(r >= 1 && r <= k, "brute_force_select: need 1 <= r <= k");
    detail::require(r <= a.rows() && r <= p, "brute_force_select: rank too large");
    const std::size_t kk = std::min(k, p);
    const Matrix g = gram_cols(a);

    BruteForceResult best;
    bool have = false;
    std::vector<std::size_t> cur;

    auto evaluate = [&] {
        const std::size_t m = cur.size();
        Matrix sub(m, m);
        double energy = 0.0;
        for (std::size_t b = 0; b < m; ++b) {
            energy += g(cur[b], cur[b]);
            for (std::size_t c = 0; c < m; ++c) sub(c, b) = g(cur[c], cur[b]);
        }
        const SymmetricEigen eig = symmetric_eigen(sub);
        double explained = 0.0;
        for (std::size_t i = 0; i < r; ++i) explained += std::max(eig.values[m - 1 - i], 0.0);
        if (!have || explained > best.explained + 1e-12 * std::max(1.0, std::abs(best.explained))) {
            have = true;
            best.support = Support(cur, p);
            best.explained = explained;
            best.eta = std::max(energy - explained, 0.0);
        }
    };

    // Lexicographic enumeration: {0}, {0,1}, {0,1,2}, ..., {0,2}, ...
    auto rec = [&](auto&& self, std::size_t start) -> void {
        for (std::size_t j = start; j < p; ++j) {
            cur.push_back(j);
            if (cur.size() >= r) evaluate();
            if (cur.size() < kk) self(self, j + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    return best;
}

}  // namespace geohopca
