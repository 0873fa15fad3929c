#pragma once

// RGB images as matrices, and low-rank reconstruction from a selected subset
// of image columns.
//
// PPM P6 with maxval 255 only. Pixels are held in [0, 1] (byte / 255);
// writing rounds back to bytes, so read -> write is bit-exact.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cctype>
#include <fstream>
#include <string>
#include <vector>

#include "geohopca/pca.hpp"
#include "geohopca/select.hpp"

namespace geohopca::experiments {

struct Image {
    std::size_t height = 0, width = 0;
    std::vector<double> data;  // (y * width + x) * 3 + channel

    Image() = default;
    Image(std::size_t h, std::size_t w) : height(h), width(w), data(h * w * 3, 0.0) {
        detail::require(h >= 1 && w >= 1, "image: dimensions must be positive");
    }
    double& at(std::size_t y, std::size_t x, std::size_t c) { return data[(y * width + x) * 3 + c]; }
    double at(std::size_t y, std::size_t x, std::size_t c) const { return data[(y * width + x) * 3 + c]; }
};

namespace internal {

// Next header token, skipping whitespace and '#' comments.
inline std::string ppm_token(std::istream& in, const std::string& path) {
    std::string tok;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {}
            continue;
        }
        if (std::isspace(ch)) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(static_cast<char>(ch));
    }
    if (tok.empty()) geohopca::detail::fail(ErrorKind::Io, path + ": truncated PPM header");
    return tok;
}

inline std::size_t ppm_number(std::istream& in, const std::string& path) {
    const std::string t = ppm_token(in, path);
    if (t.empty() || !std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; }) || t.size() > 9)
        geohopca::detail::fail(ErrorKind::Io, path + ": bad PPM header field '" + t + "'");
    return std::stoul(t);
}

}  // namespace internal

inline Image read_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) geohopca::detail::fail(ErrorKind::Io, "cannot open image: " + path);
    if (internal::ppm_token(in, path) != "P6") geohopca::detail::fail(ErrorKind::Io, path + ": not a binary PPM (P6)");
    const std::size_t w = internal::ppm_number(in, path);
    const std::size_t h = internal::ppm_number(in, path);
    const std::size_t maxval = internal::ppm_number(in, path);
    if (w == 0 || h == 0) geohopca::detail::fail(ErrorKind::Io, path + ": empty image");
    if (maxval != 255) geohopca::detail::fail(ErrorKind::Io, path + ": only maxval 255 is supported");
    // ppm_token consumed exactly one whitespace byte after maxval.
    std::vector<unsigned char> bytes(w * h * 3);
    if (!in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size())))
        geohopca::detail::fail(ErrorKind::Io, path + ": truncated PPM payload");
    Image img(h, w);
    for (std::size_t i = 0; i < bytes.size(); ++i) img.data[i] = bytes[i] / 255.0;
    return img;
}

inline std::uint8_t to_byte(double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

inline void write_ppm(const std::string& path, const Image& img) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) geohopca::detail::fail(ErrorKind::Io, "cannot open for writing: " + path);
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    std::vector<unsigned char> bytes(img.data.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = to_byte(img.data[i]);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) geohopca::detail::fail(ErrorKind::Io, "write failed: " + path);
}

enum class Orientation { RowWise, ColumnWise };

inline const char* to_string(Orientation o) { return o == Orientation::RowWise ? "row-wise" : "column-wise"; }

/// Row-wise: H x 3W, entry (y, c*W + x). Column-wise: W x 3H, entry (x, c*H + y).
inline Matrix image_to_matrix(const Image& img, Orientation o) {
    const std::size_t H = img.height, W = img.width;
    detail::require(img.data.size() == H * W * 3, "image: expected 3 channels");
    if (o == Orientation::RowWise) {
        Matrix m(H, 3 * W);
        for (std::size_t c = 0; c < 3; ++c)
            for (std::size_t x = 0; x < W; ++x)
                for (std::size_t y = 0; y < H; ++y) m(y, c * W + x) = img.at(y, x, c);
        return m;
    }
    Matrix m(W, 3 * H);
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t y = 0; y < H; ++y)
            for (std::size_t x = 0; x < W; ++x) m(x, c * H + y) = img.at(y, x, c);
    return m;
}

inline std::pair<Matrix, Matrix> image_to_matrices(const Image& img) {
    return {image_to_matrix(img, Orientation::RowWise), image_to_matrix(img, Orientation::ColumnWise)};
}

inline Image matrix_to_image(const Matrix& m, std::size_t H, std::size_t W, Orientation o) {
    Image img(H, W);
    if (o == Orientation::RowWise) {
        detail::require(m.rows() == H && m.cols() == 3 * W, "image: matrix shape mismatch");
        for (std::size_t c = 0; c < 3; ++c)
            for (std::size_t x = 0; x < W; ++x)
                for (std::size_t y = 0; y < H; ++y) img.at(y, x, c) = m(y, c * W + x);
    } else {
        detail::require(m.rows() == W && m.cols() == 3 * H, "image: matrix shape mismatch");
        for (std::size_t c = 0; c < 3; ++c)
            for (std::size_t y = 0; y < H; ++y)
                for (std::size_t x = 0; x < W; ++x) img.at(y, x, c) = m(x, c * H + y);
    }
    return img;
}

struct ReconReport {
    double frobenius_error = 0.0;  // ‖A − UUᵀA‖_F before clamping
    double clamped_error = 0.0;    // after clamping to [0, 1]
    double dense_error = 0.0;      // rank-n PCA of the whole matrix
    double eta_bound = 0.0;        // AUTO target used by the selector
    double eta_achieved = 0.0;     // squared error on the selected columns
    double runtime_seconds = 0.0;
    std::size_t n_components = 0;
    std::size_t k = 0;
    Orientation orientation = Orientation::RowWise;
    SelectorStatus status = SelectorStatus::Converged;
    std::size_t cuts_used = 0;
};

struct ReconResult {
    Image image;
    ReconReport report;
};

inline ReconResult reconstruct_image(const Image& img, std::size_t n_components, std::size_t oversample = 2,
                                     Orientation o = Orientation::RowWise, SelectorConfig cfg = {}) {
    detail::require(oversample >= 1, "reconstruct: oversample must be at least 1");
    const auto t0 = std::chrono::steady_clock::now();
    const Matrix a = image_to_matrix(img, o);
    detail::require(n_components >= 1 && n_components <= std::min(a.rows(), a.cols()),
                    "reconstruct: components must be in 1.." + std::to_string(std::min(a.rows(), a.cols())));
    cfg.k = std::min(n_components * oversample, a.cols());
    cfg.r = n_components;
    cfg.eta.reset();
    const SelectorResult sel = select_columns(a, cfg);
    const Matrix res = project_out(a, sel.basis.u);
    Matrix approx = a;
    for (std::size_t i = 0; i < approx.data().size(); ++i) approx.data()[i] -= res.data()[i];
    ReconResult out;
    ReconReport& rep = out.report;
    rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.frobenius_error = std::sqrt(frobenius_norm_sq(res));
    out.image = matrix_to_image(approx, img.height, img.width, o);
    double clamped = 0.0;
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        double& v = out.image.data[i];
        v = std::clamp(v, 0.0, 1.0);
        clamped += (v - img.data[i]) * (v - img.data[i]);
    }
    rep.clamped_error = std::sqrt(clamped);
    rep.dense_error = std::sqrt(frobenius_norm_sq(project_out(a, truncated_left_svd(a, n_components).u)));
    rep.eta_bound = sel.eta_target;
    rep.eta_achieved = sel.eta_achieved;
    rep.n_components = n_components;
    rep.k = cfg.k;
    rep.orientation = o;
    rep.status = sel.status;
    rep.cuts_used = sel.cuts_used;
    return out;
}

}  // namespace geohopca::experiments
