#include "bittrunc/powermodel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bittrunc/errors.hpp"

namespace bittrunc::power {

namespace {

double clamp_pct(double pct) { return std::clamp(pct, 0.0, 100.0); }

double interpolate(std::span<const Anchor> anchors, double bits) {
  if (anchors.size() == 1) {
    const Anchor& a = anchors.front();
    return a.bits == 0 ? a.savings_pct : a.savings_pct * bits / a.bits;
  }
  // Segment containing `bits`, or the first/last segment when outside.
  std::size_t seg = 0;
  while (seg + 2 < anchors.size() && bits > anchors[seg + 1].bits) ++seg;
  const Anchor& lo = anchors[seg];
  const Anchor& hi = anchors[seg + 1];
  if (bits == lo.bits) return lo.savings_pct;
  if (bits == hi.bits) return hi.savings_pct;
  const double slope = (hi.savings_pct - lo.savings_pct) / (static_cast<double>(hi.bits) - lo.bits);
  return lo.savings_pct + slope * (bits - lo.bits);
}

}  // namespace

void PowerParams::validate(double tolerance) const {
  const double fields[] = {byte_per_bit_uW,       byte_per_bit_pct,      word_per_bit_uW,     word_per_bit_pct,
                           base_read_power_uW,    write_power_mW,        data_dep_zero_byte_uW,
                           data_dep_zero_byte_pct, data_dep_ff_byte_uW,  data_dep_ff_byte_pct,
                           manager_overhead_uW,   manager_overhead_pct};
  for (double v : fields) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("power parameters must be finite and non-negative");
  }
  if (byte_per_bit_pct > 0.0 && word_per_bit_pct > 0.0) {
    const double byte_base = byte_per_bit_uW / (byte_per_bit_pct / 100.0);
    const double word_base = word_implied_base_uW();
    if (std::abs(byte_base - word_base) > tolerance * byte_base) {
      throw InvalidArgument("byte-implied base power " + std::to_string(byte_base) +
                            " uW and word-implied base power " + std::to_string(word_base) + " uW disagree");
    }
    if (std::abs(base_read_power_uW - byte_base) > tolerance * byte_base) {
      throw InvalidArgument("base read power " + std::to_string(base_read_power_uW) +
                            " uW disagrees with the per-bit savings pairs (" + std::to_string(byte_base) + " uW)");
    }
  }
}

CalibrationTable CalibrationTable::defaults() {
  CalibrationTable t;
  t.set_anchors(TruncationMode::Byte, {{0, 0.0}, {3, 34.93}, {4, 47.02}});
  t.set_anchors(TruncationMode::Word, {{0, 0.0}, {17, 51.69}, {21, 66.08}});
  return t;
}

void CalibrationTable::set_anchors(TruncationMode mode, std::vector<Anchor> anchors) {
  const unsigned limit = mode == TruncationMode::Byte ? kByteBits : kWordBits;
  if (anchors.empty()) throw InvalidArgument(std::string(to_string(mode)) + " anchor list is empty");
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    if (anchors[i].bits > limit) {
      throw InvalidArgument(std::string(to_string(mode)) + " anchor at " + std::to_string(anchors[i].bits) +
                            " bits exceeds the mode's range");
    }
    if (!std::isfinite(anchors[i].savings_pct)) throw InvalidArgument("anchor savings must be finite");
    if (i > 0 && (anchors[i].bits <= anchors[i - 1].bits || anchors[i].savings_pct <= anchors[i - 1].savings_pct)) {
      throw InvalidArgument(std::string(to_string(mode)) + " anchors must strictly increase in bits and savings");
    }
  }
  (mode == TruncationMode::Byte ? byte_ : word_) = std::move(anchors);
}

std::span<const Anchor> CalibrationTable::anchors(TruncationMode mode) const {
  return mode == TruncationMode::Byte ? byte_ : word_;
}

const char* to_string(SavingsModel model) { return model == SavingsModel::Linear ? "linear" : "anchored"; }

SavingsModel parse_savings_model(std::string_view name) {
  if (name == "linear") return SavingsModel::Linear;
  if (name == "anchored") return SavingsModel::Anchored;
  throw InvalidArgument("unknown power model '" + std::string(name) + "'");
}

double savings_linear(TruncationSpec spec, const PowerParams& params) {
  spec.validate();
  const double per_bit = spec.mode == TruncationMode::Byte ? params.byte_per_bit_pct : params.word_per_bit_pct;
  return clamp_pct(spec.count * per_bit);
}

double savings_anchored(TruncationSpec spec, const CalibrationTable& table) {
  spec.validate();
  const auto anchors = table.anchors(spec.mode);
  if (anchors.empty()) {
    throw InvalidArgument(std::string("no ") + to_string(spec.mode) + " anchors in calibration table");
  }
  return clamp_pct(interpolate(anchors, spec.count));
}

SavingsEstimator::SavingsEstimator(SavingsModel model, PowerParams params, CalibrationTable table)
    : model_(model), params_(params), table_(std::move(table)) {}

double SavingsEstimator::operator()(TruncationSpec spec) const {
  return model_ == SavingsModel::Linear ? savings_linear(spec, params_) : savings_anchored(spec, table_);
}

double aggregate_savings(const std::array<std::uint64_t, 9>& counts, const SavingsEstimator& estimator) {
  const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  if (total == 0) throw InvalidArgument("aggregate savings over an empty truncation map");
  double weighted = 0.0;
  for (unsigned k = 0; k <= kByteBits; ++k) {
    if (counts[k]) weighted += static_cast<double>(counts[k]) * estimator(TruncationSpec{TruncationMode::Byte, k});
  }
  return weighted / static_cast<double>(total);
}

double aggregate_savings(std::span<const std::uint8_t> byte_k, const SavingsEstimator& estimator) {
  std::array<std::uint64_t, 9> counts{};
  for (std::uint8_t k : byte_k) {
    if (k > kByteBits) throw InvalidArgument("truncation map entry " + std::to_string(k) + " exceeds 8");
    ++counts[k];
  }
  return aggregate_savings(counts, estimator);
}

DataPattern classify_word(std::uint32_t word) {
  DataPattern pattern{};
  for (unsigned lane = 0; lane < 4; ++lane) {
    const auto byte = static_cast<std::uint8_t>(word >> (8 * lane));
    pattern[lane] = byte == 0x00 ? ByteClass::Zeros : byte == 0xFF ? ByteClass::Ones : ByteClass::Mixed;
  }
  return pattern;
}

double read_power_estimate(TruncationSpec spec, const PowerParams& params, const std::optional<DataPattern>& pattern) {
  spec.validate();
  double saved = 0.0;
  if (spec.mode == TruncationMode::Byte) {
    saved = spec.count * params.byte_per_bit_uW;
  } else if (!pattern) {
    saved = spec.count * params.word_per_bit_uW;
  } else {
    for (unsigned col = 0; col < spec.count; ++col) {
      switch ((*pattern)[col / 8]) {
        case ByteClass::Zeros:
          saved += params.data_dep_zero_byte_uW;
          break;
        case ByteClass::Ones:
          saved += params.data_dep_ff_byte_uW;
          break;
        case ByteClass::Mixed:
          saved += params.word_per_bit_uW;
          break;
      }
    }
  }
  return std::max(0.0, params.base_read_power_uW - saved);
}

}  // namespace bittrunc::power
