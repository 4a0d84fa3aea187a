#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "support/oracles.hpp"
#include "tlc/errors.hpp"
#include "tlc/metrics.hpp"
#include "tlc/tensor_io.hpp"

namespace tlc {
namespace {

namespace fs = std::filesystem;

class TensorFileTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("tlc_tensor_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
};

template <typename Fn>
ErrorCode error_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected tlc::Error";
  return ErrorCode::kUsage;
}

TEST(FeatureMapTest, RejectsWrongLengthAndNonFinite) {
  EXPECT_EQ(error_of([] { FeatureMap(1, 2, 2, {1, 2, 3}); }), ErrorCode::kShapeMismatch);
  EXPECT_EQ(error_of([] { FeatureMap(1, 1, 2, {1, std::nan("")}); }), ErrorCode::kNonFiniteValue);
  EXPECT_EQ(error_of([] { FeatureMap(1, 1, 1, {std::numeric_limits<double>::infinity()}); }),
            ErrorCode::kNonFiniteValue);
  EXPECT_EQ(error_of([] { FeatureMap(0, 1, 1); }), ErrorCode::kShapeMismatch);
}

TEST(FeatureMapTest, LayoutIsChannelMajorRowMajor) {
  const FeatureMap m(2, 2, 3, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11});
  EXPECT_EQ(m(0, 1, 2), 5);
  EXPECT_EQ(m(1, 0, 0), 6);
  EXPECT_EQ(m.view(1)(1, 1), 10);
  const FeatureMap crop = m.crop(1, 1, 1, 2);
  EXPECT_EQ(crop, FeatureMap(2, 1, 2, {4, 5, 10, 11}));
}

TEST_F(TensorFileTest, ReadsSmallFile) {
  const FeatureMap m(1, 2, 2, {1, 2, 3, 4});
  write_tensor(m, dir_ / "a.tlct");
  EXPECT_EQ(read_tensor(dir_ / "a.tlct"), m);
}

TEST_F(TensorFileTest, SingleValueFileIsHeaderPlusOneFloat) {
  write_tensor(FeatureMap(1, 1, 1, {0.0}), dir_ / "one.tlct");
  EXPECT_EQ(fs::file_size(dir_ / "one.tlct"), 24u);
  const auto bytes = encode_tensor(FeatureMap(1, 1, 1, {0.0}));
  const std::vector<std::uint8_t> expected{'T', 'L', 'C', 'T', 1, 0, 0, 0, 1, 0, 0, 0,
                                           1,   0,   0,   0,   1, 0, 0, 0, 0, 0, 0, 0};
  EXPECT_EQ(bytes, expected);
}

TEST_F(TensorFileTest, HeaderIsLittleEndian) {
  const auto bytes = encode_tensor(FeatureMap(3, 258, 1));
  EXPECT_EQ(bytes[8], 3);
  EXPECT_EQ(bytes[12], 2);  // 258 = 0x0102
  EXPECT_EQ(bytes[13], 1);
  // 1.0f = 0x3f800000
  const auto one = encode_tensor(FeatureMap(1, 1, 1, {1.0}));
  EXPECT_EQ(one[20], 0x00);
  EXPECT_EQ(one[23], 0x3f);
}

TEST_F(TensorFileTest, RandomRoundTripIsBitExact) {
  Rng rng(7);
  for (int trial = 0; trial < 3; ++trial) {
    const FeatureMap m = testing::random_map(rng, 8, 64, 64, -1e3, 1e3);
    write_tensor(m, dir_ / "r.tlct");
    const FeatureMap back = read_tensor(dir_ / "r.tlct");
    ASSERT_TRUE(back.same_shape(m));
    for (std::size_t i = 0; i < m.size(); ++i) {
      ASSERT_EQ(std::bit_cast<std::uint64_t>(back.values()[i]),
                std::bit_cast<std::uint64_t>(m.values()[i]));
    }
  }
}

TEST_F(TensorFileTest, BadMagicIsMalformed) {
  auto bytes = encode_tensor(FeatureMap(1, 1, 1, {1.0}));
  bytes[0] = bytes[1] = bytes[2] = bytes[3] = 'X';
  EXPECT_EQ(error_of([&] { decode_tensor(bytes); }), ErrorCode::kMalformedHeader);
  {
    std::ofstream out(dir_ / "x.tlct", std::ios::binary);
    out << "XXXX";
  }
  EXPECT_EQ(error_of([&] { read_tensor(dir_ / "x.tlct"); }), ErrorCode::kMalformedHeader);
}

TEST_F(TensorFileTest, WrongVersionIsMalformed) {
  auto bytes = encode_tensor(FeatureMap(1, 1, 1, {1.0}));
  bytes[4] = 2;
  EXPECT_EQ(error_of([&] { decode_tensor(bytes); }), ErrorCode::kMalformedHeader);
}

TEST_F(TensorFileTest, ShortPayloadIsTruncated) {
  auto bytes = encode_tensor(FeatureMap(2, 2, 2));
  bytes.resize(bytes.size() - 1);
  EXPECT_EQ(error_of([&] { decode_tensor(bytes); }), ErrorCode::kTruncatedPayload);
}

TEST_F(TensorFileTest, NanPayloadIsRejected) {
  auto bytes = encode_tensor(FeatureMap(1, 1, 1, {1.0}));
  const auto nan_bits = std::bit_cast<std::uint32_t>(std::numeric_limits<float>::quiet_NaN());
  for (int i = 0; i < 4; ++i) bytes[20 + i] = static_cast<std::uint8_t>(nan_bits >> (8 * i));
  EXPECT_EQ(error_of([&] { decode_tensor(bytes); }), ErrorCode::kNonFiniteValue);
}

TEST_F(TensorFileTest, UnwritablePathIsIoFailure) {
  EXPECT_EQ(error_of([&] { write_tensor(FeatureMap(1, 1, 1), dir_ / "missing" / "a.tlct"); }),
            ErrorCode::kIoFailure);
  EXPECT_EQ(error_of([&] { read_tensor(dir_ / "nope.tlct"); }), ErrorCode::kIoFailure);
}

TEST(PsnrTest, IdenticalMapsAreInfinite) {
  const FeatureMap m(1, 2, 2, {1, 2, 3, 4});
  const MetricReport r = psnr(m, m, 1.0);
  EXPECT_EQ(r.mse, 0.0);
  EXPECT_TRUE(std::isinf(r.psnr_db));
  EXPECT_GT(r.psnr_db, 0.0);
}

TEST(PsnrTest, UniformOffsetOfTen) {
  const FeatureMap a(1, 4, 4);
  FeatureMap b = a;
  for (double& v : b.values()) v += 10.0;
  const MetricReport r = psnr(a, b, 255.0);
  EXPECT_DOUBLE_EQ(r.mse, 100.0);
  EXPECT_NEAR(r.psnr_db, 28.1308, 1e-4);
  EXPECT_NEAR(r.psnr_db, 20.0 * std::log10(25.5), 1e-12);
}

TEST(PsnrTest, MatchesDirectSummationSymmetricAndScaleInvariant) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const FeatureMap a = testing::random_map(rng, 3, 9, 13, 0.0, 255.0);
    const FeatureMap b = testing::random_map(rng, 3, 9, 13, 0.0, 255.0);
    // Oracle: plain loop with long double accumulation.
    long double sum = 0.0L;
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t i = 0; i < 9; ++i)
        for (std::size_t j = 0; j < 13; ++j) {
          const long double d = static_cast<long double>(a(c, i, j)) - b(c, i, j);
          sum += d * d;
        }
    const double mse = static_cast<double>(sum / (3 * 9 * 13));
    const double expected = 10.0 * std::log10(255.0 * 255.0 / mse);
    const MetricReport r = psnr(a, b, 255.0);
    EXPECT_NEAR(r.psnr_db, expected, 1e-9 * std::abs(expected));
    EXPECT_EQ(psnr(b, a, 255.0).psnr_db, r.psnr_db);

    const double s = rng.uniform(0.1, 10.0);
    FeatureMap as = a, bs = b;
    for (double& v : as.values()) v *= s;
    for (double& v : bs.values()) v *= s;
    EXPECT_NEAR(psnr(as, bs, 255.0 * s).psnr_db, r.psnr_db, 1e-9);
  }
}

TEST(PsnrTest, ShapeMismatchAndBadPeak) {
  EXPECT_EQ(error_of([] { psnr(FeatureMap(1, 2, 2), FeatureMap(1, 2, 3), 1.0); }),
            ErrorCode::kShapeMismatch);
  EXPECT_EQ(error_of([] { psnr(FeatureMap(1, 2, 2), FeatureMap(1, 2, 2), 0.0); }),
            ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace tlc
