#include "bittrunc/bitcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bittrunc/errors.hpp"

namespace bittrunc {

const char* to_string(TruncationMode mode) {
  return mode == TruncationMode::Byte ? "BYTE" : "WORD";
}

const char* to_string(NonFinitePolicy policy) {
  return policy == NonFinitePolicy::Preserve ? "preserve" : "hardware";
}

TruncationSpec TruncationSpec::byte(unsigned k) {
  TruncationSpec spec{TruncationMode::Byte, k};
  spec.validate();
  return spec;
}

TruncationSpec TruncationSpec::word(unsigned k) {
  TruncationSpec spec{TruncationMode::Word, k};
  spec.validate();
  return spec;
}

void TruncationSpec::validate() const {
  if (!valid()) {
    throw InvalidArgument(std::string(to_string(mode)) + " mode truncation count " + std::to_string(count) +
                          " out of range 0.." + std::to_string(max_count()));
  }
}

TruncationIndexSet::TruncationIndexSet(std::vector<unsigned> indices) : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (indices_[i] >= kWordBits) {
      throw InvalidArgument("bit index " + std::to_string(indices_[i]) + " outside a 32-bit word");
    }
    if (i > 0 && indices_[i] == indices_[i - 1]) {
      throw InvalidArgument("duplicate bit index " + std::to_string(indices_[i]));
    }
    mask_ |= std::uint32_t{1} << indices_[i];
  }
}

TruncationIndexSet TruncationIndexSet::contiguous(unsigned n) {
  if (n > kWordBits) throw InvalidArgument("contiguous set larger than a word");
  std::vector<unsigned> idx(n);
  for (unsigned i = 0; i < n; ++i) idx[i] = i;
  return TruncationIndexSet(std::move(idx));
}

TruncationIndexSet TruncationIndexSet::from_mask(std::uint32_t mask) {
  std::vector<unsigned> idx;
  for (unsigned i = 0; i < kWordBits; ++i) {
    if (mask & (std::uint32_t{1} << i)) idx.push_back(i);
  }
  return TruncationIndexSet(std::move(idx));
}

std::optional<unsigned> TruncationIndexSet::t_max() const {
  if (indices_.empty()) return std::nullopt;
  return indices_.back();
}

std::string TruncationIndexSet::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (i) os << ',';
    os << indices_[i];
  }
  os << '}';
  return os.str();
}

DummyPattern optimal_dummy(const TruncationIndexSet& set) {
  const auto top = set.t_max();
  if (!top) return {};
  const std::uint32_t one = std::uint32_t{1} << *top;
  return {one, set.mask() & ~one};
}

namespace {

// Dummy pattern over the k LSBs: bit k-1 set, bits below cleared.
constexpr std::uint32_t low_mask(unsigned k) {
  return k >= 32 ? 0xFFFFFFFFu : (std::uint32_t{1} << k) - 1u;
}

constexpr std::uint32_t contiguous_dummy(std::uint32_t value, unsigned k) {
  if (k == 0) return value;
  return (value & ~low_mask(k)) | (std::uint32_t{1} << (k - 1));
}

}  // namespace

std::uint8_t apply_truncation_byte(std::uint8_t value, unsigned k) {
  if (k > kByteBits) throw InvalidArgument("byte truncation count " + std::to_string(k) + " exceeds 8");
  return static_cast<std::uint8_t>(contiguous_dummy(value, k));
}

std::uint32_t truncation_mask(TruncationSpec spec) {
  spec.validate();
  if (spec.mode == TruncationMode::Word) return low_mask(spec.count);
  return low_mask(spec.count) * 0x01010101u;
}

std::uint32_t apply_truncation_word(std::uint32_t word, TruncationSpec spec) {
  spec.validate();
  if (spec.count == 0) return word;
  if (spec.mode == TruncationMode::Word) return contiguous_dummy(word, spec.count);
  const std::uint32_t head = (std::uint32_t{1} << (spec.count - 1)) * 0x01010101u;
  return (word & ~truncation_mask(spec)) | head;
}

double FloatBits::normalized_value() const {
  const double significand = 1.0 + std::ldexp(static_cast<double>(fraction()), -23);
  const double magnitude = std::ldexp(significand, static_cast<int>(exponent()) - 127);
  return sign() ? -magnitude : magnitude;
}

FloatBits apply_truncation_float(FloatBits value, const TruncationIndexSet& set, NonFinitePolicy policy) {
  if (!set.within_fraction()) {
    throw InvalidArgument("float truncation set " + set.to_string() + " reaches beyond fraction bit 22");
  }
  if (policy == NonFinitePolicy::Preserve && !value.is_finite()) return value;
  return FloatBits(optimal_dummy(set).apply(value.raw()));
}

float truncate_fraction(float value, unsigned n, NonFinitePolicy policy) {
  if (n > kFractionBits) {
    throw InvalidArgument("fraction truncation count " + std::to_string(n) + " exceeds 23");
  }
  const FloatBits bits = FloatBits::from_float(value);
  if (n == 0 || (policy == NonFinitePolicy::Preserve && !bits.is_finite())) return value;
  return FloatBits(contiguous_dummy(bits.raw(), n)).to_float();
}

double FloatContext::c1() const {
  const double scale = std::ldexp(1.0, static_cast<int>(exponent & 0xFFu) - 127);
  return sign ? -scale : scale;
}

double FloatContext::c2(const TruncationIndexSet& set) const {
  return std::ldexp(static_cast<double>(fraction & 0x7FFFFFu & ~set.mask()), -23);
}

double EnsembleStats::value(std::size_t j) const {
  return c1 * std::ldexp(static_cast<double>(base_units + truncated_sums.at(j)), -23);
}

double EnsembleStats::mean() const {
  const double units = static_cast<double>(base_units) + 0.5 * static_cast<double>(mean_twice_units);
  return c1 * std::ldexp(units, -23);
}

bool BestFillResult::is_argmin(std::uint32_t fill) const {
  return std::find(argmin_fills.begin(), argmin_fills.end(), fill) != argmin_fills.end();
}

BestFillResult brute_force_best_fill(const TruncationIndexSet& set, const FloatContext& context, unsigned cap) {
  if (cap > kOracleCardinalityCap) {
    throw InvalidArgument("oracle cap " + std::to_string(cap) + " exceeds " +
                          std::to_string(kOracleCardinalityCap));
  }
  if (set.cardinality() > cap) {
    throw InvalidArgument("truncation set of " + std::to_string(set.cardinality()) +
                          " bits exceeds oracle cap " + std::to_string(cap));
  }
  if (!set.within_fraction()) {
    throw InvalidArgument("oracle set " + set.to_string() + " reaches beyond fraction bit 22");
  }

  BestFillResult result;
  EnsembleStats& stats = result.stats;
  const auto idx = set.indices();
  stats.m = set.combinations();
  stats.c1 = context.c1();
  stats.c2 = context.c2(set);
  stats.base_units = (std::uint64_t{1} << kFractionBits) + (context.fraction & 0x7FFFFFu & ~set.mask());

  // Enumeration order j: bit i of j drives index idx[i].
  stats.truncated_sums.resize(stats.m);
  std::uint64_t total = 0;
  for (std::uint64_t j = 0; j < stats.m; ++j) {
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (j & (std::uint64_t{1} << i)) sum += std::uint64_t{1} << idx[i];
    }
    stats.truncated_sums[j] = sum;
    total += sum;
  }
  // Every bit is set in exactly m/2 fills, so total / m is a multiple of 1/2.
  stats.mean_twice_units = (2 * total) / stats.m;

  // |fill - truth| < 2^23 and m <= 2^12, so every SSE fits in 2^58.
  stats.sse_per_fill.resize(stats.m);
  for (std::uint64_t f = 0; f < stats.m; ++f) {
    std::uint64_t sse = 0;
    const auto fill = static_cast<std::int64_t>(stats.truncated_sums[f]);
    for (std::uint64_t j = 0; j < stats.m; ++j) {
      const std::int64_t diff = fill - static_cast<std::int64_t>(stats.truncated_sums[j]);
      sse += static_cast<std::uint64_t>(diff * diff);
    }
    stats.sse_per_fill[f] = sse;
  }

  result.min_sse = stats.m ? *std::min_element(stats.sse_per_fill.begin(), stats.sse_per_fill.end()) : 0;
  for (std::uint64_t f = 0; f < stats.m; ++f) {
    if (stats.sse_per_fill[f] == result.min_sse) {
      result.argmin_fills.push_back(static_cast<std::uint32_t>(stats.truncated_sums[f]));
    }
  }

  const DummyPattern dummy = optimal_dummy(set);
  result.dummy_fill = dummy.force_one_mask;
  result.complement_fill = dummy.force_zero_mask;

  auto sse_of = [&](std::uint32_t pattern) {
    for (std::uint64_t f = 0; f < stats.m; ++f) {
      if (stats.truncated_sums[f] == pattern) return stats.sse_per_fill[f];
    }
    return std::numeric_limits<std::uint64_t>::max();
  };
  result.dummy_sse = sse_of(result.dummy_fill);
  result.complement_sse = sse_of(result.complement_fill);
  return result;
}

Rational expected_mse_uniform(unsigned n) {
  if (n > kWordBits) throw InvalidArgument("uniform MSE defined for n <= 32");
  if (n == 0) return {0, 1};
  // (4^n + 2)/12 = (2^(2n-1) + 1)/6, and 3 divides 2^odd + 1.
  const std::uint64_t num = ((std::uint64_t{1} << (2 * n - 1)) + 1) / 3;
  return {num, 2};
}

double expected_mse_float(const TruncationIndexSet& set, const FloatContext& context) {
  if (!set.within_fraction()) {
    throw InvalidArgument("float MSE set " + set.to_string() + " reaches beyond fraction bit 22");
  }
  if (set.empty()) return 0.0;
  double variance = 0.0;
  double half_sum = 0.0;
  for (unsigned k : set.indices()) {
    const double w = std::ldexp(1.0, static_cast<int>(k) - 23);
    variance += w * w / 4.0;
    half_sum += w / 2.0;
  }
  const double bias = std::ldexp(1.0, static_cast<int>(*set.t_max()) - 23) - half_sum;
  const double c1 = context.c1();
  return c1 * c1 * (variance + bias * bias);
}

}  // namespace bittrunc
