#pragma once

// NPY v1.0 reader/writer for float64 arrays.
//
// Writing always emits fortran_order=True, which is the storage order of
// DenseTensor and Matrix, so the payload is a straight copy. Reading also
// accepts C-ordered files and '<f4' payloads, and format versions 2.0/3.0.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "geohopca/tensor.hpp"

namespace geohopca::npy {

static_assert(std::endian::native == std::endian::little, "NPY I/O assumes a little-endian host");

struct Array {
    std::vector<std::size_t> shape;  // empty for 0-d
    std::vector<double> data;        // fortran (mode-1-fastest) order
};

inline std::string header_text(std::span<const std::size_t> shape) {
    std::string dict = "{'descr': '<f8', 'fortran_order': True, 'shape': (";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        dict += std::to_string(shape[i]);
        if (shape.size() == 1 || i + 1 < shape.size()) dict += ",";
        if (i + 1 < shape.size()) dict += " ";
    }
    dict += "), }";
    // numpy reserves room for the growth axis (the last one in fortran order)
    // to reach 21 digits; matching it keeps files byte-identical to np.save.
    if (!shape.empty()) dict.append(21 - std::min<std::size_t>(21, std::to_string(shape.back()).size()), ' ');
    // magic(6) + version(2) + len(2) + dict + padding + '\n' is a multiple of 64
    const std::size_t unpadded = 10 + dict.size() + 1;
    const std::size_t pad = 64 - unpadded % 64;  // 1..64, as numpy writes it
    dict.append(pad, ' ');
    dict += '\n';
    return dict;
}

inline std::string encode(std::span<const std::size_t> shape, std::span<const double> data) {
    const std::string header = header_text(shape);
    std::string out;
    out.reserve(10 + header.size() + data.size() * 8);
    out += "\x93NUMPY";
    out += '\x01';
    out += '\x00';
    const auto len = static_cast<std::uint16_t>(header.size());
    out += static_cast<char>(len & 0xff);
    out += static_cast<char>(len >> 8);
    out += header;
    out.append(reinterpret_cast<const char*>(data.data()), data.size() * sizeof(double));
    return out;
}

inline void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) detail::fail(ErrorKind::Io, "cannot open for writing: " + path);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) detail::fail(ErrorKind::Io, "write failed: " + path);
}

inline void save(const std::string& path, const DenseTensor& x) {
    write_file(path, encode(x.shape().dims(), x.data()));
}

inline void save(const std::string& path, const Matrix& m) {
    const std::size_t shape[2] = {m.rows(), m.cols()};
    write_file(path, encode(shape, m.data()));
}

namespace detail {

inline std::string dict_value(const std::string& dict, const std::string& key) {
    const std::string needle = "'" + key + "'";
    const auto k = dict.find(needle);
    if (k == std::string::npos) geohopca::detail::fail(ErrorKind::Io, "npy header missing key " + key);
    auto p = dict.find(':', k + needle.size());
    if (p == std::string::npos) geohopca::detail::fail(ErrorKind::Io, "npy header malformed near " + key);
    ++p;
    while (p < dict.size() && dict[p] == ' ') ++p;
    std::size_t e = p;
    if (p < dict.size() && dict[p] == '(') {
        e = dict.find(')', p);
        if (e == std::string::npos) geohopca::detail::fail(ErrorKind::Io, "npy header: unterminated shape");
        return dict.substr(p, e - p + 1);
    }
    if (p < dict.size() && (dict[p] == '\'' || dict[p] == '"')) {
        e = dict.find(dict[p], p + 1);
        if (e == std::string::npos) geohopca::detail::fail(ErrorKind::Io, "npy header: unterminated string");
        return dict.substr(p + 1, e - p - 1);
    }
    while (e < dict.size() && dict[e] != ',' && dict[e] != '}') ++e;
    auto v = dict.substr(p, e - p);
    while (!v.empty() && v.back() == ' ') v.pop_back();
    return v;
}

inline std::vector<std::size_t> parse_shape(const std::string& tuple) {
    std::vector<std::size_t> dims;
    std::string inner = tuple.substr(1, tuple.size() - 2);
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(std::remove(item.begin(), item.end(), ' '), item.end());
        item.erase(std::remove(item.begin(), item.end(), 'L'), item.end());
        if (item.empty()) continue;
        if (!std::all_of(item.begin(), item.end(), [](char c) { return c >= '0' && c <= '9'; }))
            geohopca::detail::fail(ErrorKind::Io, "npy header: bad shape entry '" + item + "'");
        dims.push_back(std::stoull(item));
    }
    return dims;
}

}  // namespace detail

inline Array decode(const std::string& bytes, const std::string& origin = "<memory>") {
    using geohopca::detail::fail;
    if (bytes.size() < 10 || bytes.compare(0, 6, "\x93NUMPY") != 0)
        fail(ErrorKind::Io, origin + ": not an NPY file");
    const auto major = static_cast<unsigned char>(bytes[6]);
    std::size_t hlen = 0, hstart = 0;
    if (major == 1) {
        hlen = static_cast<unsigned char>(bytes[8]) | (static_cast<std::size_t>(static_cast<unsigned char>(bytes[9])) << 8);
        hstart = 10;
    } else if (major == 2 || major == 3) {
        if (bytes.size() < 12) fail(ErrorKind::Io, origin + ": truncated NPY header");
        for (int i = 3; i >= 0; --i) hlen = (hlen << 8) | static_cast<unsigned char>(bytes[8 + i]);
        hstart = 12;
    } else {
        fail(ErrorKind::Io, origin + ": unsupported NPY version " + std::to_string(major));
    }
    if (bytes.size() < hstart + hlen) fail(ErrorKind::Io, origin + ": truncated NPY header");
    const std::string dict = bytes.substr(hstart, hlen);

    const std::string descr = detail::dict_value(dict, "descr");
    const std::string order = detail::dict_value(dict, "fortran_order");
    Array a;
    a.shape = detail::parse_shape(detail::dict_value(dict, "shape"));
    std::size_t n = 1;
    for (auto d : a.shape) {
        if (d != 0 && n > bytes.size() / d) fail(ErrorKind::Io, origin + ": NPY shape larger than the file");
        n *= d;
    }

    std::size_t width = 0;
    if (descr == "<f8" || descr == "=f8" || descr == "f8") width = 8;
    else if (descr == "<f4" || descr == "=f4" || descr == "f4") width = 4;
    else fail(ErrorKind::Io, origin + ": unsupported dtype '" + descr + "' (need <f8 or <f4)");

    const std::size_t payload = hstart + hlen;
    if (bytes.size() - payload < n * width) fail(ErrorKind::Io, origin + ": truncated NPY payload");
    std::vector<double> raw(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (width == 8) {
            std::memcpy(&raw[i], bytes.data() + payload + 8 * i, 8);
        } else {
            float f;
            std::memcpy(&f, bytes.data() + payload + 4 * i, 4);
            raw[i] = f;
        }
    }

    if (order == "True" || a.shape.size() <= 1) {
        a.data = std::move(raw);
    } else if (order == "False") {
        // C order: last index fastest. Permute to mode-1-fastest.
        a.data.assign(n, 0.0);
        const std::size_t nd = a.shape.size();
        std::vector<std::size_t> idx(nd, 0);
        for (std::size_t c = 0; c < n; ++c) {
            std::size_t f = 0, stride = 1;
            for (std::size_t k = 0; k < nd; ++k) {
                f += idx[k] * stride;
                stride *= a.shape[k];
            }
            a.data[f] = raw[c];
            for (std::size_t k = nd; k-- > 0;) {
                if (++idx[k] < a.shape[k]) break;
                idx[k] = 0;
            }
        }
    } else {
        fail(ErrorKind::Io, origin + ": bad fortran_order value '" + order + "'");
    }
    return a;
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) geohopca::detail::fail(ErrorKind::Io, "cannot open file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline Array load(const std::string& path) { return decode(read_file(path), path); }

inline DenseTensor load_tensor(const std::string& path) {
    Array a = load(path);
    if (a.shape.empty()) geohopca::detail::fail(ErrorKind::Io, path + ": 0-d array is not a tensor");
    try {
        return DenseTensor(Shape(a.shape), std::move(a.data));
    } catch (const Error& e) {
        throw Error(ErrorKind::Io, path + ": " + e.what());
    }
}

inline Matrix load_matrix(const std::string& path) {
    Array a = load(path);
    if (a.shape.size() != 2) geohopca::detail::fail(ErrorKind::Io, path + ": expected a 2-D array");
    try {
        return Matrix(a.shape[0], a.shape[1], std::move(a.data));
    } catch (const Error& e) {
        throw Error(ErrorKind::Io, path + ": " + e.what());
    }
}

}  // namespace geohopca::npy
