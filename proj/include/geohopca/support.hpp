#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "geohopca/error.hpp"

namespace geohopca {

/// A selection of distinct column indices (0-based, ascending) out of `p` columns.
class Support {
public:
    Support() = default;
    Support(std::vector<std::size_t> indices, std::size_t p) : idx_(std::move(indices)), p_(p) {
        std::sort(idx_.begin(), idx_.end());
        detail::require(std::adjacent_find(idx_.begin(), idx_.end()) == idx_.end(),
                        "support indices must be distinct");
        detail::require(idx_.empty() || idx_.back() < p_, "support index out of range");
    }

    const std::vector<std::size_t>& indices() const noexcept { return idx_; }
    std::size_t size() const noexcept { return idx_.size(); }
    bool empty() const noexcept { return idx_.empty(); }
    std::size_t universe() const noexcept { return p_; }

    bool contains(std::size_t j) const { return std::binary_search(idx_.begin(), idx_.end(), j); }

    /// True if every index of `other` is also in this support.
    bool includes(const std::vector<std::size_t>& other_sorted) const {
        return std::includes(idx_.begin(), idx_.end(), other_sorted.begin(), other_sorted.end());
    }

    std::vector<std::size_t> one_based() const {
        std::vector<std::size_t> out(idx_);
        for (auto& i : out) ++i;
        return out;
    }

    std::string str() const {
        std::string s = "{";
        for (std::size_t i = 0; i < idx_.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(idx_[i] + 1);
        }
        return s + "}";
    }

    bool operator==(const Support&) const = default;

private:
    std::vector<std::size_t> idx_;
    std::size_t p_ = 0;
};

}  // namespace geohopca
