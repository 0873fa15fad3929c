#pragma once

// Exact solver for the binary selection problem
//
//   maximize  sum_j s_j w_j   s.t.  min_size <= |s| <= k,
//             no cut sigma is contained in s (sum_{i in sigma} s_i <= |sigma| - 1)
//
// by depth-first branch and bound over the columns sorted by weight.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "geohopca/support.hpp"

namespace geohopca {

/// A forbidden combination of columns (0-based, ascending, nonempty).
struct Cut {
    std::vector<std::size_t> sigma;

    bool violated_by(const Support& s) const { return s.includes(sigma); }
};

/// No-good cuts accumulated by the cutting-plane loop. A cut that contains an
/// earlier cut is redundant and never stored; adding a cut evicts stored
/// supersets of it.
class CutPool {
public:
    /// Returns false if the cut was dominated by an existing one.
    bool add(std::vector<std::size_t> sigma) {
        detail::require(!sigma.empty(), "a cut must name at least one column");
        std::sort(sigma.begin(), sigma.end());
        sigma.erase(std::unique(sigma.begin(), sigma.end()), sigma.end());
        for (const Cut& c : cuts_)
            if (std::includes(sigma.begin(), sigma.end(), c.sigma.begin(), c.sigma.end())) return false;
        std::erase_if(cuts_, [&](const Cut& c) {
            return std::includes(c.sigma.begin(), c.sigma.end(), sigma.begin(), sigma.end());
        });
        cuts_.push_back(Cut{std::move(sigma)});
        return true;
    }
    bool add(const Support& s) { return add(s.indices()); }

    const std::vector<Cut>& cuts() const noexcept { return cuts_; }
    std::size_t size() const noexcept { return cuts_.size(); }
    bool empty() const noexcept { return cuts_.empty(); }

    bool admits(const Support& s) const {
        return std::none_of(cuts_.begin(), cuts_.end(), [&](const Cut& c) { return c.violated_by(s); });
    }

private:
    std::vector<Cut> cuts_;
};

struct BloOptions {
    std::size_t min_size = 0;
    std::uint64_t node_budget = 50'000'000;
};

struct BloStats {
    std::uint64_t nodes = 0;
};

namespace detail {

inline double canonical_sum(std::span<const double> w, std::vector<std::size_t> idx) {
    std::sort(idx.begin(), idx.end());
    double s = 0.0;
    for (auto j : idx) s += w[j];
    return s;
}

inline double tie_slack(double v) { return 64 * std::numeric_limits<double>::epsilon() * v; }

// Shared state of one solve_blo call: weight order, cut incidence, node count.
class BloSearch {
public:
    BloSearch(std::span<const double> w, std::size_t k, const CutPool& cuts, const BloOptions& opts)
        : w_(w), p_(w.size()), k_(k), min_size_(opts.min_size), budget_(opts.node_budget), cuts_of_(p_) {
        order_.resize(p_);
        std::iota(order_.begin(), order_.end(), 0);
        std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
        top_.assign(p_ + 1, 0.0);
        for (std::size_t i = 0; i < p_; ++i) top_[i + 1] = top_[i] + w[order_[i]];
        for (const Cut& c : cuts.cuts()) {
            for (auto j : c.sigma) {
                require(j < p_, "solve_blo: cut index out of range");
                cuts_of_[j].push_back(cut_size_.size());
            }
            cut_size_.push_back(c.sigma.size());
        }
    }

    struct Found {
        double sum;
        std::vector<std::size_t> set;  // unsorted
    };

    /// Search over supersets of `forced` whose other members come from columns
    /// with index > `after` (all columns when after == npos). Without a target
    /// returns the best admitted set; with one, the first set reaching it.
    std::optional<Found> run(const std::vector<std::size_t>& forced, std::size_t after, std::optional<double> target) {
        constexpr std::size_t npos = static_cast<std::size_t>(-1);
        std::vector<std::size_t> hits(cut_size_.size(), 0);
        std::vector<std::size_t> chosen;
        double sum = 0.0;
        std::size_t zeros = 0;
        for (auto j : forced) {
            for (auto c : cuts_of_[j])
                if (++hits[c] == cut_size_[c]) return std::nullopt;
            chosen.push_back(j);
            sum += w_[j];
            if (w_[j] == 0.0) ++zeros;
        }
        std::vector<char> blocked(p_, 0);
        for (auto j : forced) blocked[j] = 1;
        std::vector<std::size_t> items;
        for (auto j : order_)
            if (!blocked[j] && (after == npos || j > after)) items.push_back(j);
        const std::size_t m = items.size();
        std::vector<double> prefix(m + 1, 0.0);
        for (std::size_t i = 0; i < m; ++i) prefix[i + 1] = prefix[i] + w_[items[i]];

        auto would_violate = [&](std::size_t j) {
            for (auto c : cuts_of_[j])
                if (hits[c] + 1 == cut_size_[c]) return true;
            return false;
        };
        // Zero-weight columns may only pad the set up to min_size.
        auto acceptable = [&] {
            const std::size_t n = chosen.size();
            return n >= min_size_ && n <= k_ && zeros <= (min_size_ > n - zeros ? min_size_ - (n - zeros) : 0);
        };

        std::optional<Found> best;
        enum Stage : std::uint8_t { Enter, AfterInclude, AfterExclude };
        struct Frame {
            std::size_t d;
            Stage stage;
            bool fresh;     // set changed on the way into this node
            bool included;  // items[d] was pushed by this frame
            double saved_sum;
        };
        std::vector<Frame> stack;
        stack.push_back({0, Enter, true, false, 0.0});

        while (!stack.empty()) {
            Frame& f = stack.back();
            const std::size_t d = f.d;
            if (f.stage == Enter) {
                if (++nodes_ > budget_) fail(ErrorKind::SearchAborted, "selection tree search exceeded its node budget");
                const std::size_t count = chosen.size();
                if (f.fresh && acceptable()) {
                    if (target) {
                        if (sum >= *target - tie_slack(*target)) {
                            const double cs = canonical_sum(w_, chosen);
                            if (cs >= *target) return Found{cs, chosen};
                        }
                    } else if (!best || sum > best->sum - tie_slack(std::max(sum, best->sum))) {
                        const double cs = canonical_sum(w_, chosen);
                        if (!best || cs > best->sum) best = Found{cs, chosen};
                    }
                }
                bool stop = count >= k_ || d == m || count + (m - d) < min_size_;
                if (!stop) {
                    const double ub = sum + (prefix[std::min(d + (k_ - count), m)] - prefix[d]);
                    if (target) stop = ub + tie_slack(ub) < *target;
                    else if (best) stop = ub <= best->sum + tie_slack(ub);
                }
                if (stop) {
                    stack.pop_back();
                    continue;
                }
                const std::size_t j = items[d];
                f.stage = AfterInclude;
                if ((w_[j] > 0.0 || count < min_size_) && !would_violate(j)) {
                    f.included = true;
                    f.saved_sum = sum;
                    chosen.push_back(j);
                    sum += w_[j];
                    if (w_[j] == 0.0) ++zeros;
                    for (auto c : cuts_of_[j]) ++hits[c];
                    stack.push_back({d + 1, Enter, true, false, 0.0});
                }
            } else if (f.stage == AfterInclude) {
                if (f.included) {
                    const std::size_t j = items[d];
                    chosen.pop_back();
                    sum = f.saved_sum;
                    if (w_[j] == 0.0) --zeros;
                    for (auto c : cuts_of_[j]) --hits[c];
                    f.included = false;
                }
                f.stage = AfterExclude;
                stack.push_back({d + 1, Enter, false, false, 0.0});
            } else {
                stack.pop_back();
            }
        }
        return best;
    }

    bool qualifies(const std::vector<std::size_t>& set, double target) const {
        const std::size_t n = set.size();
        std::size_t zeros = 0;
        for (auto j : set) zeros += w_[j] == 0.0;
        if (n < min_size_ || n > k_ || zeros > (min_size_ > n - zeros ? min_size_ - (n - zeros) : 0)) return false;
        std::vector<std::size_t> hits(cut_size_.size(), 0);
        for (auto j : set)
            for (auto c : cuts_of_[j])
                if (++hits[c] == cut_size_[c]) return false;
        return canonical_sum(w_, set) >= target;
    }

    /// Upper bound on any set of `extra` further columns: the heaviest ones overall.
    double heaviest(std::size_t extra) const { return top_[std::min(extra, p_)]; }
    std::uint64_t nodes() const noexcept { return nodes_; }

private:
    std::span<const double> w_;
    std::size_t p_, k_, min_size_;
    std::uint64_t budget_;
    std::vector<std::size_t> order_;
    std::vector<double> top_;
    std::vector<std::vector<std::size_t>> cuts_of_;
    std::vector<std::size_t> cut_size_;
    std::uint64_t nodes_ = 0;
};

}  // namespace detail

/// Highest-weight support admitted by the cuts, or nullopt if no support with
/// at least `min_size` columns is admitted. Among supports of equal weight
/// (within a few ulps) the lexicographically smallest index set wins.
/// Zero-weight columns are only taken to reach `min_size`.
inline std::optional<Support> solve_blo(std::span<const double> w, std::size_t k, const CutPool& cuts,
                                        const BloOptions& opts = {}, BloStats* stats = nullptr) {
    detail::require(k >= 1, "solve_blo: cardinality cap must be at least 1");
    const std::size_t p = w.size();
    for (double x : w) detail::require(x >= 0.0 && std::isfinite(x), "solve_blo: weights must be finite and nonnegative");
    if (opts.min_size > std::min(k, p)) return std::nullopt;

    detail::BloSearch search(w, k, cuts, opts);
    constexpr std::size_t npos = static_cast<std::size_t>(-1);
    auto first = search.run({}, npos, std::nullopt);
    if (!first) {
        if (stats) stats->nodes = search.nodes();
        return std::nullopt;
    }

    // Tie-break: build the lexicographically smallest optimal set one index at
    // a time. Staying on the first optimum's prefix needs no search; smaller
    // indices are tried only if a cheap bound leaves them a chance.
    const double target = first->sum - detail::tie_slack(first->sum);
    std::vector<std::size_t> opt = first->set;
    std::sort(opt.begin(), opt.end());
    std::vector<std::size_t> prefix;
    bool on_track = true;
    double prefix_sum = 0.0;
    while (true) {
        if (on_track && prefix.size() == opt.size()) break;
        if (search.qualifies(prefix, target)) break;
        const std::size_t from = prefix.empty() ? 0 : prefix.back() + 1;
        const std::size_t limit = on_track ? opt[prefix.size()] : p;
        std::size_t pick = npos;
        for (std::size_t i = from; i < limit; ++i) {
            if (prefix_sum + w[i] + search.heaviest(k - prefix.size() - 1) < target - detail::tie_slack(target)) continue;
            std::vector<std::size_t> trial = prefix;
            trial.push_back(i);
            if (search.run(trial, i, target)) {
                pick = i;
                break;
            }
        }
        if (pick == npos) {
            detail::require(on_track, "solve_blo: tie-break lost the optimum");
            pick = limit;
        } else {
            on_track = false;
        }
        prefix.push_back(pick);
        prefix_sum += w[pick];
        if (prefix.size() == k) break;
    }
    if (stats) stats->nodes = search.nodes();
    return Support(std::move(prefix), p);
}

}  // namespace geohopca
