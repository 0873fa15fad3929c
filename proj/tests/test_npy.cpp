#include <filesystem>

#include <gtest/gtest.h>

#include "geohopca/npy.hpp"
#include "test_util.hpp"

using namespace geohopca;

namespace {

std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("geohopca_test_" + name)).string();
}

std::string le16(std::size_t v) { return {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)}; }

}  // namespace

TEST(Npy, HeaderLayout) {
    const std::size_t shape[] = {2, 3};
    const std::string h = npy::header_text(shape);
    EXPECT_EQ(h.rfind("{'descr': '<f8', 'fortran_order': True, 'shape': (2, 3), }", 0), 0u);
    EXPECT_EQ((10 + h.size()) % 64, 0u);
    EXPECT_EQ(h.back(), '\n');

    const std::size_t one[] = {5};
    EXPECT_EQ(npy::header_text(one).rfind("{'descr': '<f8', 'fortran_order': True, 'shape': (5,), }", 0), 0u);
}

TEST(Npy, EncodeMatchesNumpyBytes) {
    // np.save(f, np.asfortranarray(x)) for a 2x3 float64 array: 58-char dict,
    // 20 growth-axis spaces, then padding to a 128-byte preamble.
    const std::size_t shape[] = {2, 3};
    const double data[] = {1, 2, 3, 4, 5, 6};
    std::string expect = "\x93NUMPY";
    expect += '\x01';
    expect += '\x00';
    const std::string dict = "{'descr': '<f8', 'fortran_order': True, 'shape': (2, 3), }";
    expect += le16(118);
    expect += dict + std::string(59, ' ') + "\n";
    expect.append(reinterpret_cast<const char*>(data), sizeof(data));
    EXPECT_EQ(npy::encode(shape, data), expect);
}

TEST(Npy, HeaderLengthsMatchNumpy) {
    // Header lengths numpy 2.x writes for these fortran-ordered shapes.
    for (auto shape : {std::vector<std::size_t>{6, 7, 8}, std::vector<std::size_t>{1000, 20, 20},
                       std::vector<std::size_t>{10, 10}})
        EXPECT_EQ(npy::header_text(shape).size(), 118u);
}

TEST(Npy, RoundTripTensorBitExact) {
    std::mt19937_64 g(5);
    const DenseTensor x = testutil::random_tensor(g, {3, 4, 2});
    const auto p = tmp_path("rt.npy");
    npy::save(p, x);
    EXPECT_EQ(npy::load_tensor(p), x);
    const Matrix m = testutil::random_matrix(g, 4, 7);
    npy::save(p, m);
    EXPECT_EQ(npy::load_matrix(p), m);
    std::filesystem::remove(p);
}

TEST(Npy, ReadsCOrderAndFloat32) {
    // 2x3 C-order float64 holding row-major 1..6.
    std::string dict = "{'descr': '<f8', 'fortran_order': False, 'shape': (2, 3), }";
    dict += std::string(64 - (10 + dict.size() + 1) % 64, ' ') + "\n";
    std::string bytes = "\x93NUMPY";
    bytes += '\x01';
    bytes += '\x00';
    bytes += le16(dict.size());
    bytes += dict;
    const double c[] = {1, 2, 3, 4, 5, 6};
    bytes.append(reinterpret_cast<const char*>(c), sizeof(c));
    const npy::Array a = npy::decode(bytes);
    EXPECT_EQ(Matrix(2, 3, a.data), Matrix::from_rows({{1, 2, 3}, {4, 5, 6}}));

    std::string d4 = "{'descr': '<f4', 'fortran_order': True, 'shape': (2,), }";
    d4 += std::string(64 - (10 + d4.size() + 1) % 64, ' ') + "\n";
    std::string b4 = "\x93NUMPY";
    b4 += '\x01';
    b4 += '\x00';
    b4 += le16(d4.size());
    b4 += d4;
    const float f[] = {0.5f, -2.0f};
    b4.append(reinterpret_cast<const char*>(f), sizeof(f));
    EXPECT_EQ(npy::decode(b4).data, (std::vector<double>{0.5, -2.0}));
}

TEST(Npy, MalformedInputsAreIoErrors) {
    auto kind_of = [](const std::string& b) {
        try {
            npy::decode(b);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::Numeric;
    };
    EXPECT_EQ(kind_of("hello"), ErrorKind::Io);
    const std::size_t shape[] = {4};
    const double d[] = {1, 2, 3, 4};
    std::string good = npy::encode(shape, d);
    EXPECT_EQ(kind_of(good.substr(0, good.size() - 8)), ErrorKind::Io);
    std::string bad = good;
    bad.replace(bad.find("<f8"), 3, "<i8");
    EXPECT_EQ(kind_of(bad), ErrorKind::Io);
    std::string huge = good;
    huge.replace(huge.find("(4,)"), 4, "(9999999999999, 99999999999)");
    EXPECT_EQ(kind_of(huge), ErrorKind::Io);

    try {
        npy::load_tensor("/nonexistent/x.npy");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Io);
        EXPECT_NE(std::string(e.what()).find("/nonexistent/x.npy"), std::string::npos);
    }
}
