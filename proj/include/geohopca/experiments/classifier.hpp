#pragma once

// Nearest-subspace classification with per-class bases learned from a
// compressed set of training samples.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "geohopca/rng.hpp"
#include "geohopca/select.hpp"

namespace geohopca::experiments {

struct ClassifierModel {
    std::vector<int> labels;    // ascending
    std::vector<Matrix> bases;  // D x r, orthonormal, one per label
    double ratio = 1.0;
};

/// Each class stack is D x N_c (samples as columns). Per class, k =
/// max(r, round(ratio * N_c)) samples are selected (eta = AUTO) and the class
/// basis is the rank-r PCA basis of the selected samples.
inline ClassifierModel train_classifier(const std::vector<Matrix>& class_stacks, const std::vector<int>& labels,
                                        double ratio, std::size_t r, SelectorConfig cfg = {}) {
    detail::require(!class_stacks.empty(), "train_classifier: no classes");
    detail::require(class_stacks.size() == labels.size(), "train_classifier: one label per class");
    detail::require(ratio > 0.0 && ratio <= 1.0, "train_classifier: ratio must be in (0, 1]");
    detail::require(r >= 1, "train_classifier: rank must be positive");
    ClassifierModel m;
    m.ratio = ratio;
    std::map<int, std::size_t> order;
    for (std::size_t c = 0; c < labels.size(); ++c)
        detail::require(order.emplace(labels[c], c).second, "train_classifier: duplicate label");
    const std::size_t D = class_stacks.front().rows();
    for (const auto& [label, c] : order) {
        const Matrix& a = class_stacks[c];
        detail::require(a.rows() == D, "train_classifier: inconsistent sample dimension");
        detail::require(a.cols() >= r && D >= r,
                        "train_classifier: class " + std::to_string(label) + " has too few samples for rank " + std::to_string(r));
        const auto target = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(a.cols())));
        cfg.k = std::min(a.cols(), std::max(r, target));
        cfg.r = r;
        cfg.eta.reset();
        m.labels.push_back(label);
        m.bases.push_back(select_columns(a, cfg).basis.u);
    }
    return m;
}

inline double subspace_residual(const Matrix& u, std::span<const double> b) {
    std::vector<double> res(b.begin(), b.end());
    for (std::size_t k = 0; k < u.cols(); ++k) {
        auto uk = u.col(k);
        const double c = dot(uk, b);
        for (std::size_t i = 0; i < res.size(); ++i) res[i] -= c * uk[i];
    }
    return std::sqrt(dot(res, res));
}

/// Label whose subspace leaves the smallest residual ‖(I − UUᵀ)b‖; ties go to
/// the lowest label.
inline int classify(const ClassifierModel& model, std::span<const double> b) {
    detail::require(!model.bases.empty(), "classify: empty model");
    detail::require(b.size() == model.bases.front().rows(), "classify: sample dimension mismatch");
    std::size_t best = 0;
    double best_res = subspace_residual(model.bases[0], b);
    for (std::size_t c = 1; c < model.bases.size(); ++c) {
        const double res = subspace_residual(model.bases[c], b);
        if (res < best_res) {
            best_res = res;
            best = c;
        }
    }
    return model.labels[best];
}

struct Evaluation {
    double accuracy = 0.0;
    Matrix confusion;  // rows = true label, cols = predicted; rows normalized
};

inline Evaluation accuracy_and_confusion(const ClassifierModel& model, const Matrix& test, const std::vector<int>& truth) {
    detail::require(test.cols() >= 1, "accuracy: empty test set");
    detail::require(test.cols() == truth.size(), "accuracy: one label per test sample");
    const std::size_t C = model.labels.size();
    auto index_of = [&](int label) {
        auto it = std::lower_bound(model.labels.begin(), model.labels.end(), label);
        detail::require(it != model.labels.end() && *it == label, "accuracy: unknown label " + std::to_string(label));
        return static_cast<std::size_t>(it - model.labels.begin());
    };
    Evaluation ev;
    ev.confusion = Matrix(C, C);
    std::size_t correct = 0;
    for (std::size_t s = 0; s < test.cols(); ++s) {
        const int pred = classify(model, test.col(s));
        if (pred == truth[s]) ++correct;
        ev.confusion(index_of(truth[s]), index_of(pred)) += 1.0;
    }
    for (std::size_t i = 0; i < C; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < C; ++j) row += ev.confusion(i, j);
        if (row > 0)
            for (std::size_t j = 0; j < C; ++j) ev.confusion(i, j) /= row;
    }
    ev.accuracy = static_cast<double>(correct) / static_cast<double>(test.cols());
    return ev;
}

// ---------------------------------------------------------------------------
// IDX (MNIST) files: big-endian magic 0x00000803 (ubyte images, 3 dims) or
// 0x00000801 (ubyte labels, 1 dim).

struct IdxImages {
    std::size_t count = 0, rows = 0, cols = 0;
    std::vector<std::uint8_t> pixels;  // count * rows * cols, row-major per image
};

namespace internal {
inline std::uint32_t read_be32(std::istream& in, const std::string& path) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) geohopca::detail::fail(ErrorKind::Io, path + ": truncated IDX header");
    return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
}
}  // namespace internal

inline IdxImages read_idx_images(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) geohopca::detail::fail(ErrorKind::Io, "cannot open IDX file: " + path);
    if (internal::read_be32(in, path) != 0x00000803u) geohopca::detail::fail(ErrorKind::Io, path + ": not an IDX image file");
    IdxImages im;
    im.count = internal::read_be32(in, path);
    im.rows = internal::read_be32(in, path);
    im.cols = internal::read_be32(in, path);
    im.pixels.resize(im.count * im.rows * im.cols);
    if (!in.read(reinterpret_cast<char*>(im.pixels.data()), static_cast<std::streamsize>(im.pixels.size())))
        geohopca::detail::fail(ErrorKind::Io, path + ": truncated IDX payload");
    return im;
}

inline std::vector<std::uint8_t> read_idx_labels(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) geohopca::detail::fail(ErrorKind::Io, "cannot open IDX file: " + path);
    if (internal::read_be32(in, path) != 0x00000801u) geohopca::detail::fail(ErrorKind::Io, path + ": not an IDX label file");
    std::vector<std::uint8_t> labels(internal::read_be32(in, path));
    if (!in.read(reinterpret_cast<char*>(labels.data()), static_cast<std::streamsize>(labels.size())))
        geohopca::detail::fail(ErrorKind::Io, path + ": truncated IDX payload");
    return labels;
}

struct LabeledSplit {
    std::vector<int> class_labels;     // ascending
    std::vector<Matrix> class_stacks;  // D x n per class
    Matrix samples;                    // D x M, all classes
    std::vector<int> sample_labels;
};

/// Draws `per_class` samples of each label (seeded shuffle, then first come
/// first served). Pixels are scaled to [0, 1].
inline LabeledSplit sample_per_class(const IdxImages& images, const std::vector<std::uint8_t>& labels,
                                     std::size_t per_class, std::uint64_t seed) {
    using geohopca::detail::require;
    require(images.count == labels.size(), "IDX image and label counts differ");
    const std::size_t D = images.rows * images.cols;
    std::vector<std::size_t> perm(images.count);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed);
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);

    std::map<int, std::vector<std::size_t>> picks;
    for (auto i : perm) {
        auto& v = picks[labels[i]];
        if (v.size() < per_class) v.push_back(i);
    }
    LabeledSplit out;
    std::size_t total = 0;
    for (auto& [label, v] : picks) total += v.size();
    out.samples = Matrix(D, total);
    std::size_t col = 0;
    for (auto& [label, v] : picks) {
        require(v.size() == per_class, "label " + std::to_string(label) + " has fewer than " + std::to_string(per_class) + " samples");
        Matrix stack(D, v.size());
        for (std::size_t s = 0; s < v.size(); ++s) {
            const std::uint8_t* px = images.pixels.data() + v[s] * D;
            for (std::size_t i = 0; i < D; ++i) {
                stack(i, s) = px[i] / 255.0;
                out.samples(i, col) = px[i] / 255.0;
            }
            out.sample_labels.push_back(label);
            ++col;
        }
        out.class_labels.push_back(label);
        out.class_stacks.push_back(std::move(stack));
    }
    return out;
}

}  // namespace geohopca::experiments
