#pragma once

// Read/write power of the truncation memory as a function of the truncation
// setting. Two savings models: a single-slope linear model built from the
// average per-bit savings, and a piecewise-linear model through measured
// operating points (CalibrationTable).

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bittrunc/bitcore.hpp"

namespace bittrunc::power {

/// Post-layout figures for a 130 nm implementation. Base read power is not a
/// measured quantity; it follows from the byte-mode per-bit pair.
struct PowerParams {
  double byte_per_bit_uW = 296.0;
  double byte_per_bit_pct = 11.90;
  double word_per_bit_uW = 71.0;
  double word_per_bit_pct = 2.87;
  double base_read_power_uW = 296.0 / 0.1190;
  double write_power_mW = 2.35;
  double data_dep_zero_byte_uW = 90.0;
  double data_dep_zero_byte_pct = 3.6;
  double data_dep_ff_byte_uW = 60.0;
  double data_dep_ff_byte_pct = 2.2;
  double manager_overhead_uW = 1.1;
  double manager_overhead_pct = 0.47;

  /// Base power implied by the word-mode per-bit pair.
  double word_implied_base_uW() const { return word_per_bit_uW / (word_per_bit_pct / 100.0); }
  /// Throws InvalidArgument on negative values or when the byte- and
  /// word-implied base powers disagree by more than `tolerance` (relative).
  void validate(double tolerance = 0.01) const;
};

struct Anchor {
  unsigned bits = 0;
  double savings_pct = 0.0;

  friend bool operator==(const Anchor&, const Anchor&) = default;
};

/// Measured (bits truncated -> savings %) operating points per mode.
class CalibrationTable {
 public:
  /// Byte {0:0, 3:34.93, 4:47.02}; word {0:0, 17:51.69, 21:66.08}.
  static CalibrationTable defaults();

  /// Throws InvalidArgument unless both coordinates strictly increase.
  void set_anchors(TruncationMode mode, std::vector<Anchor> anchors);
  std::span<const Anchor> anchors(TruncationMode mode) const;

 private:
  std::vector<Anchor> byte_;
  std::vector<Anchor> word_;
};

enum class SavingsModel { Linear, Anchored };

const char* to_string(SavingsModel model);
SavingsModel parse_savings_model(std::string_view name);

/// k * per-bit percentage for the spec's mode, clamped to [0, 100].
double savings_linear(TruncationSpec spec, const PowerParams& params = {});

/// Exact at anchors, linear between, final-segment slope past the last anchor,
/// clamped to [0, 100]. Throws InvalidArgument if the mode has no anchors.
double savings_anchored(TruncationSpec spec, const CalibrationTable& table);

/// Bundles a model choice with its parameters.
class SavingsEstimator {
 public:
  SavingsEstimator(SavingsModel model = SavingsModel::Anchored, PowerParams params = {},
                   CalibrationTable table = CalibrationTable::defaults());

  double operator()(TruncationSpec spec) const;
  SavingsModel model() const { return model_; }
  const PowerParams& params() const { return params_; }
  const CalibrationTable& table() const { return table_; }

 private:
  SavingsModel model_;
  PowerParams params_;
  CalibrationTable table_;
};

/// Mean per-byte savings over a map of byte-mode k values. Throws
/// InvalidArgument on an empty map or any k > 8.
double aggregate_savings(std::span<const std::uint8_t> byte_k, const SavingsEstimator& estimator);

/// Histogram form of aggregate_savings: counts[k] bytes truncated by k bits.
double aggregate_savings(const std::array<std::uint64_t, 9>& counts, const SavingsEstimator& estimator);

enum class ByteClass { Zeros, Ones, Mixed };

/// Byte lanes of a word, lane 0 = bits 7..0.
using DataPattern = std::array<ByteClass, 4>;

DataPattern classify_word(std::uint32_t word);

/// Base read power minus the per-bit deltas of every truncated column. In word
/// mode with a data pattern, columns of all-zero bytes save 90 uW, all-one
/// bytes 60 uW, and the rest the 71 uW average.
double read_power_estimate(TruncationSpec spec, const PowerParams& params = {},
                           const std::optional<DataPattern>& pattern = std::nullopt);

struct PowerCalibration {
  PowerParams params;
  CalibrationTable table = CalibrationTable::defaults();
};

/// Parses the sectioned key/value calibration format. Unspecified sections keep
/// their defaults. Throws ParseError with the offending line.
PowerCalibration parse_calibration(std::string_view text);
PowerCalibration load_calibration(const std::filesystem::path& path);
std::string to_calibration_text(const PowerCalibration& calibration);

}  // namespace bittrunc::power
