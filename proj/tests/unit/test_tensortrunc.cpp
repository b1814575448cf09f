#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "bittrunc/errors.hpp"
#include "bittrunc/tensortrunc.hpp"

using namespace bittrunc;
using namespace bittrunc::tensor;

namespace {

TensorBuffer scalar(float v) { return TensorBuffer({1}, {v}); }

std::uint32_t bits(float f) { return std::bit_cast<std::uint32_t>(f); }

}  // namespace

TEST(TruncateTensor, Examples) {
  const auto t = normal_tensor({4, 5}, 1);
  EXPECT_TRUE(truncate_tensor(t, 0).bit_equal(t));
  EXPECT_EQ(truncate_tensor(scalar(1.0f), 23).data()[0], 1.5f);
  EXPECT_EQ(bits(truncate_tensor(scalar(1.0f), 17).data()[0]), 0x3F810000u);
  EXPECT_THROW(truncate_tensor(t, 24), InvalidArgument);
}

TEST(TruncateTensor, IdempotentAndContained) {
  const auto t = normal_tensor({10000}, 2);
  for (unsigned n = 1; n <= 23; ++n) {
    const auto once = truncate_tensor(t, n);
    EXPECT_TRUE(truncate_tensor(once, n).bit_equal(once));
    for (std::size_t i = 0; i < t.size(); i += 97) {
      const std::uint32_t orig = bits(t.data()[i]), got = bits(once.data()[i]);
      EXPECT_EQ(got >> n, orig >> n);
      EXPECT_EQ(got >> (n - 1) & 1u, 1u);
      EXPECT_EQ(got & ((1u << (n - 1)) - 1), 0u);
    }
  }
}

TEST(TruncateTensor, NonFinitePreserved) {
  const float inf = std::numeric_limits<float>::infinity();
  const float nan = std::numeric_limits<float>::quiet_NaN();
  const TensorBuffer t({5}, {1.0f, inf, -inf, nan, 0.0f});
  const auto out = truncate_tensor(t, 8);
  EXPECT_EQ(bits(out.data()[1]), bits(inf));
  EXPECT_EQ(bits(out.data()[2]), bits(-inf));
  EXPECT_EQ(bits(out.data()[3]), bits(nan));
  const auto hw = truncate_tensor(t, 8, NonFinitePolicy::HardwareFaithful);
  EXPECT_TRUE(std::isnan(hw.data()[1]));
  const auto rep = error_stats(t, out, 8);
  EXPECT_EQ(rep.nonfinite_count, 3u);
  EXPECT_EQ(rep.zero_count, 1u);
  EXPECT_EQ(rep.bound_violations, 0u);
}

TEST(ErrorStats, Examples) {
  const auto t = normal_tensor({1000}, 3);
  const auto zero = error_stats(t, truncate_tensor(t, 0), 0);
  EXPECT_EQ(zero.max_abs_error, 0.0);
  EXPECT_EQ(zero.max_rel_error, 0.0);
  EXPECT_EQ(zero.mse, 0.0);
  const auto one = scalar(1.0f);
  EXPECT_EQ(error_stats(one, truncate_tensor(one, 23), 23).max_abs_error, 0.5);
  EXPECT_EQ(relative_error_bound(17), std::ldexp(1.0, -7));
}

TEST(ErrorStats, BoundHolds) {
  const auto t = normal_tensor({200000}, 4);
  for (unsigned n : {1u, 8u, 16u, 17u, 20u, 23u}) {
    const auto r = error_stats(t, truncate_tensor(t, n), n);
    EXPECT_LE(r.max_rel_error, r.bound) << n;
    EXPECT_EQ(r.bound_violations, 0u);
  }
}

TEST(Sweep, RowsAndSavings) {
  const auto t = normal_tensor({5000}, 5);
  const std::vector<unsigned> only0{0};
  const auto r0 = sweep(t, only0);
  ASSERT_EQ(r0.size(), 1u);
  EXPECT_EQ(r0[0].max_rel_error, 0.0);
  const std::vector<unsigned> only17{17};
  EXPECT_NEAR(sweep(t, only17)[0].savings_pct, 51.69, 1e-9);
  const auto all = sweep(t, parse_levels("0..23"));
  ASSERT_EQ(all.size(), 24u);
  for (std::size_t i = 1; i < all.size(); ++i) EXPECT_GE(all[i].max_rel_error, all[i - 1].max_rel_error);
  const auto csv = sweep_to_csv(all);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,max_abs_err,max_rel_err,mse,bound,savings_pct");
}

TEST(Parsing, LevelsAndShape) {
  EXPECT_EQ(parse_levels("1,8,16"), (std::vector<unsigned>{1, 8, 16}));
  EXPECT_EQ(parse_levels("2..4").size(), 3u);
  EXPECT_THROW(parse_levels("24"), InvalidArgument);
  EXPECT_THROW(parse_levels("5..3"), InvalidArgument);
  EXPECT_THROW(parse_levels("a"), InvalidArgument);
  EXPECT_EQ(parse_shape("3x4"), (std::vector<std::uint32_t>{3, 4}));
  EXPECT_EQ(parse_shape("64,3,3,3"), (std::vector<std::uint32_t>{64, 3, 3, 3}));
  EXPECT_THROW(parse_shape("3,0"), InvalidArgument);
}

TEST(TrntFormat, RoundTripAndLayout) {
  const auto t = normal_tensor({2, 3}, 6);
  const auto bytes = encode_trnt(t);
  ASSERT_EQ(bytes.size(), 7u + 8 + 24);
  EXPECT_EQ(bytes[0], 0x54);
  EXPECT_EQ(bytes[3], 0x54);
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[5], 1);
  EXPECT_EQ(bytes[6], 2);
  EXPECT_EQ(bytes[7], 2);
  EXPECT_EQ(bytes[11], 3);
  const std::uint32_t first = bytes[15] | bytes[16] << 8 | bytes[17] << 16 | std::uint32_t(bytes[18]) << 24;
  EXPECT_EQ(first, bits(t.data()[0]));
  EXPECT_TRUE(decode_trnt(bytes).bit_equal(t));

  const auto path = std::filesystem::temp_directory_path() / "bittrunc_tensor_rt.trnt";
  save_tensor(t, path);
  EXPECT_TRUE(load_tensor(path).bit_equal(t));
  std::filesystem::remove(path);
}

TEST(TrntFormat, Errors) {
  auto bytes = encode_trnt(normal_tensor({10}, 7));
  auto bad = bytes;
  bad[0] = bad[1] = bad[2] = bad[3] = 'X';
  EXPECT_THROW(decode_trnt(bad), FormatError);
  auto short_payload = bytes;
  short_payload.resize(short_payload.size() - 4);
  EXPECT_THROW(decode_trnt(short_payload), FormatError);
  auto version = bytes;
  version[4] = 2;
  EXPECT_THROW(decode_trnt(version), FormatError);
  auto rank0 = bytes;
  rank0[6] = 0;
  EXPECT_THROW(decode_trnt(rank0), FormatError);
  EXPECT_THROW(decode_trnt(std::vector<std::uint8_t>{0x54, 0x52}), FormatError);
}

TEST(RawFormat, RoundTripAndShape) {
  const auto t = normal_tensor({6}, 8);
  const auto raw = encode_raw(t);
  EXPECT_EQ(raw.size(), 24u);
  EXPECT_TRUE(decode_raw(raw).bit_equal(t));
  EXPECT_EQ(decode_raw(raw, {2, 3}).rank(), 2u);
  EXPECT_THROW(decode_raw(raw, {5}), FormatError);
  std::vector<std::uint8_t> odd(7);
  EXPECT_THROW(decode_raw(odd), FormatError);
}
