#pragma once

// Bit-truncation semantics for bytes, 32-bit words and IEEE-754 binary32
// values. Truncated bits are replaced by the minimum expected-MSE dummy
// pattern: the most significant truncated bit reads 1, every other truncated
// bit reads 0.

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bittrunc {

inline constexpr unsigned kFractionBits = 23;
inline constexpr unsigned kWordBits = 32;
inline constexpr unsigned kByteBits = 8;

/// Default cardinality cap for the exhaustive fill oracle (4^12 cell visits).
inline constexpr unsigned kOracleCardinalityCap = 12;

enum class TruncationMode { Byte, Word };

const char* to_string(TruncationMode mode);

/// Run-time truncation knob: `count` contiguous LSBs per byte (Byte mode,
/// 0..8) or per 32-bit word (Word mode, 0..32).
struct TruncationSpec {
  TruncationMode mode = TruncationMode::Word;
  unsigned count = 0;

  static TruncationSpec byte(unsigned k);
  static TruncationSpec word(unsigned k);

  unsigned max_count() const { return mode == TruncationMode::Byte ? kByteBits : kWordBits; }
  bool valid() const { return count <= max_count(); }
  /// Throws InvalidArgument when `count` exceeds the mode's range.
  void validate() const;

  friend bool operator==(const TruncationSpec&, const TruncationSpec&) = default;
};

/// Sorted set of distinct bit positions in 0..31.
class TruncationIndexSet {
 public:
  TruncationIndexSet() = default;
  /// Sorts the input; throws InvalidArgument on duplicates or positions > 31.
  explicit TruncationIndexSet(std::vector<unsigned> indices);
  TruncationIndexSet(std::initializer_list<unsigned> indices)
      : TruncationIndexSet(std::vector<unsigned>(indices)) {}

  /// {0, 1, ..., n-1}.
  static TruncationIndexSet contiguous(unsigned n);
  static TruncationIndexSet from_mask(std::uint32_t mask);

  std::span<const unsigned> indices() const { return indices_; }
  bool empty() const { return indices_.empty(); }
  std::size_t cardinality() const { return indices_.size(); }
  std::optional<unsigned> t_max() const;
  /// Number of fills, 2^|T|.
  std::uint64_t combinations() const { return std::uint64_t{1} << indices_.size(); }
  std::uint32_t mask() const { return mask_; }
  bool within_fraction() const { return mask_ <= 0x7FFFFFu; }

  std::string to_string() const;

  friend bool operator==(const TruncationIndexSet& a, const TruncationIndexSet& b) {
    return a.mask_ == b.mask_;
  }

 private:
  std::vector<unsigned> indices_;
  std::uint32_t mask_ = 0;
};

/// Bits forced to one / forced to zero when a truncated word is read.
struct DummyPattern {
  std::uint32_t force_one_mask = 0;
  std::uint32_t force_zero_mask = 0;

  std::uint32_t covered() const { return force_one_mask | force_zero_mask; }
  std::uint32_t apply(std::uint32_t word) const {
    return (word & ~covered()) | force_one_mask;
  }

  friend bool operator==(const DummyPattern&, const DummyPattern&) = default;
};

DummyPattern optimal_dummy(const TruncationIndexSet& set);

/// Replaces bits k-1..0 of `value` with 1 followed by k-1 zeros. k = 0 is identity.
std::uint8_t apply_truncation_byte(std::uint8_t value, unsigned k);

/// Word mode truncates the k LSBs of the word; byte mode truncates the k LSBs
/// of each of the four bytes independently.
std::uint32_t apply_truncation_word(std::uint32_t word, TruncationSpec spec);

/// Mask of the bit positions a spec truncates.
std::uint32_t truncation_mask(TruncationSpec spec);

/// IEEE-754 binary32 viewed as sign / exponent / fraction fields.
class FloatBits {
 public:
  constexpr FloatBits() = default;
  constexpr explicit FloatBits(std::uint32_t raw) : raw_(raw) {}
  static FloatBits from_float(float value) { return FloatBits(std::bit_cast<std::uint32_t>(value)); }
  static constexpr FloatBits from_fields(bool sign, std::uint32_t exponent, std::uint32_t fraction) {
    return FloatBits((std::uint32_t{sign} << 31) | ((exponent & 0xFFu) << 23) | (fraction & 0x7FFFFFu));
  }

  constexpr std::uint32_t raw() const { return raw_; }
  constexpr bool sign() const { return (raw_ >> 31) != 0; }
  constexpr std::uint32_t exponent() const { return (raw_ >> 23) & 0xFFu; }
  constexpr std::uint32_t fraction() const { return raw_ & 0x7FFFFFu; }

  float to_float() const { return std::bit_cast<float>(raw_); }
  /// Value from the sign/exponent/fraction fields assuming a normalized
  /// significand, i.e. (-1)^s * 2^(e-127) * (1 + f/2^23), evaluated in double.
  double normalized_value() const;

  constexpr bool is_nan() const { return exponent() == 0xFFu && fraction() != 0; }
  constexpr bool is_inf() const { return exponent() == 0xFFu && fraction() == 0; }
  constexpr bool is_finite() const { return exponent() != 0xFFu; }
  constexpr bool is_subnormal() const { return exponent() == 0 && fraction() != 0; }
  constexpr bool is_zero() const { return (raw_ & 0x7FFFFFFFu) == 0; }
  constexpr bool is_normal() const { return exponent() != 0 && exponent() != 0xFFu; }

  friend constexpr bool operator==(FloatBits, FloatBits) = default;

 private:
  std::uint32_t raw_ = 0;
};

/// How the float API treats Inf and NaN inputs.
enum class NonFinitePolicy {
  Preserve,          ///< pass Inf/NaN through unchanged
  HardwareFaithful,  ///< apply the raw bit rule (Inf becomes NaN)
};

const char* to_string(NonFinitePolicy policy);

/// Replaces the fraction bits at `set` with the dummy pattern. Throws
/// InvalidArgument if `set` reaches into the exponent or sign.
FloatBits apply_truncation_float(FloatBits value, const TruncationIndexSet& set,
                                 NonFinitePolicy policy = NonFinitePolicy::Preserve);

/// Contiguous n-LSB fraction truncation, 0 <= n <= 23.
float truncate_fraction(float value, unsigned n, NonFinitePolicy policy = NonFinitePolicy::Preserve);

/// Sign, exponent and the untruncated fraction bits around a truncation set.
/// Fraction bits that fall inside the set are ignored.
struct FloatContext {
  bool sign = false;
  std::uint32_t exponent = 127;
  std::uint32_t fraction = 0;

  /// (-1)^sign * 2^(exponent-127)
  double c1() const;
  /// Untruncated fraction value: sum over k not in T of b_k 2^(k-23).
  double c2(const TruncationIndexSet& set) const;
};

/// Non-negative rational num/den.
struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// The ensemble of true values a truncated word may have held, in units of
/// one fraction LSB (2^-23 of the significand).
struct EnsembleStats {
  std::uint64_t m = 0;                       ///< 2^|T|
  std::uint64_t base_units = 0;              ///< 2^23 + untruncated fraction bits
  std::vector<std::uint64_t> truncated_sums; ///< y_j - base, for j = 0..m-1 (fill order)
  std::uint64_t mean_twice_units = 0;        ///< 2 * mean(y_j - base), exact
  std::vector<std::uint64_t> sse_per_fill;   ///< indexed like truncated_sums
  double c1 = 1.0;
  double c2 = 0.0;

  /// Decimal value y_j.
  double value(std::size_t j) const;
  /// Decimal mean x = (1/m) sum y_j.
  double mean() const;
};

struct BestFillResult {
  EnsembleStats stats;
  std::vector<std::uint32_t> argmin_fills;  ///< fill patterns (bit masks within T) attaining min SSE
  std::uint64_t min_sse = 0;                ///< in LSB^2 units
  std::uint32_t dummy_fill = 0;
  std::uint32_t complement_fill = 0;
  std::uint64_t dummy_sse = 0;
  std::uint64_t complement_sse = 0;

  bool dummy_is_minimizer() const { return dummy_sse == min_sse; }
  bool is_argmin(std::uint32_t fill) const;
};

/// Enumerates every (true value, fill) pair over `set` with exact integer
/// arithmetic. Throws InvalidArgument when |set| exceeds `cap` or the set
/// leaves the fraction field.
BestFillResult brute_force_best_fill(const TruncationIndexSet& set, const FloatContext& context = {},
                                     unsigned cap = kOracleCardinalityCap);

/// Expected squared error of the dummy fill over n contiguous uniform LSBs,
/// (4^n + 2) / 12 in LSB^2, reduced. Valid for n <= 32.
Rational expected_mse_uniform(unsigned n);

/// Analytic expected squared error of the dummy fill for a float whose
/// fraction bits in `set` are uniform and independent.
double expected_mse_float(const TruncationIndexSet& set, const FloatContext& context = {});

}  // namespace bittrunc
