#include "bittrunc/tensortrunc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "bittrunc/errors.hpp"
#include "bittrunc/parallel.hpp"
#include "detail/format.hpp"

namespace bittrunc::tensor {

namespace {

constexpr std::size_t kChunk = 1 << 16;

void check_level(unsigned n) {
  if (n > kFractionBits) throw InvalidArgument("tensor truncation n = " + std::to_string(n) + " exceeds 23");
}

}  // namespace

std::size_t element_count(std::span<const std::uint32_t> shape) {
  if (shape.empty()) throw InvalidArgument("tensor shape needs at least one dimension");
  std::size_t n = 1;
  for (std::uint32_t d : shape) {
    if (d == 0) throw InvalidArgument("tensor dimensions must be >= 1");
    if (n > std::numeric_limits<std::size_t>::max() / 4 / d) throw InvalidArgument("tensor shape overflows");
    n *= d;
  }
  return n;
}

TensorBuffer::TensorBuffer(std::vector<std::uint32_t> shape, std::vector<float> data, std::string name)
    : shape_(std::move(shape)), data_(std::move(data)), name_(std::move(name)) {
  const std::size_t expected = element_count(shape_);
  if (expected != data_.size()) {
    throw InvalidArgument("tensor shape holds " + std::to_string(expected) + " elements, payload has " +
                          std::to_string(data_.size()));
  }
}

bool TensorBuffer::bit_equal(const TensorBuffer& other) const {
  if (shape_ != other.shape_ || data_.size() != other.data_.size()) return false;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (std::bit_cast<std::uint32_t>(data_[i]) != std::bit_cast<std::uint32_t>(other.data_[i])) return false;
  }
  return true;
}

TensorBuffer normal_tensor(std::vector<std::uint32_t> shape, std::uint64_t seed, double mean, double stddev) {
  const std::size_t count = element_count(shape);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(mean, stddev);
  std::vector<float> data(count);
  for (auto& v : data) v = static_cast<float>(dist(rng));
  return TensorBuffer(std::move(shape), std::move(data));
}

TensorBuffer truncate_tensor(const TensorBuffer& input, unsigned n, NonFinitePolicy policy, unsigned threads) {
  check_level(n);
  std::vector<float> out(input.data().begin(), input.data().end());
  if (n > 0) {
    const std::size_t chunks = (out.size() + kChunk - 1) / kChunk;
    parallel_for(chunks, threads, [&](std::size_t c) {
      const std::size_t end = std::min(out.size(), (c + 1) * kChunk);
      for (std::size_t i = c * kChunk; i < end; ++i) out[i] = truncate_fraction(out[i], n, policy);
    });
  }
  return TensorBuffer(std::vector<std::uint32_t>(input.shape().begin(), input.shape().end()), std::move(out),
                      input.name());
}

double relative_error_bound(unsigned n) {
  check_level(n);
  return std::ldexp(1.0, static_cast<int>(n) - 24);
}

TruncationReport error_stats(const TensorBuffer& original, const TensorBuffer& truncated, unsigned n,
                             const power::SavingsEstimator& estimator, NonFinitePolicy policy, unsigned threads) {
  check_level(n);
  if (!std::equal(original.shape().begin(), original.shape().end(), truncated.shape().begin(),
                  truncated.shape().end())) {
    throw InvalidArgument("error_stats: tensor shapes differ");
  }

  TruncationReport report;
  report.n = n;
  report.elements = original.size();
  report.bound = relative_error_bound(n);
  report.policy = policy;
  report.savings_pct = estimator(TruncationSpec{TruncationMode::Word, n});

  struct Partial {
    double max_abs = 0.0;
    double max_rel = 0.0;
    double sum_sq = 0.0;
    std::size_t finite = 0;
    std::size_t nonfinite = 0;
    std::size_t zeros = 0;
    std::size_t subnormals = 0;
    std::size_t violations = 0;
  };
  const auto a = original.data();
  const auto b = truncated.data();
  const std::size_t chunks = (a.size() + kChunk - 1) / kChunk;
  std::vector<Partial> partials(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    Partial& p = partials[c];
    const std::size_t end = std::min(a.size(), (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      const FloatBits orig = FloatBits::from_float(a[i]);
      if (!orig.is_finite() || !std::isfinite(b[i])) {
        ++p.nonfinite;
        continue;
      }
      // Both values are floats sharing an exponent; the double difference is exact.
      const double abs_err = std::abs(static_cast<double>(b[i]) - static_cast<double>(a[i]));
      ++p.finite;
      p.sum_sq += abs_err * abs_err;
      p.max_abs = std::max(p.max_abs, abs_err);
      if (orig.is_zero()) {
        ++p.zeros;
        continue;
      }
      if (orig.is_subnormal()) ++p.subnormals;
      const double rel = abs_err / std::abs(static_cast<double>(a[i]));
      p.max_rel = std::max(p.max_rel, rel);
      if (orig.is_normal() && rel > report.bound) ++p.violations;
    }
  });

  std::size_t finite = 0;
  double sum_sq = 0.0;
  for (const auto& p : partials) {
    report.max_abs_error = std::max(report.max_abs_error, p.max_abs);
    report.max_rel_error = std::max(report.max_rel_error, p.max_rel);
    report.nonfinite_count += p.nonfinite;
    report.zero_count += p.zeros;
    report.subnormal_count += p.subnormals;
    report.bound_violations += p.violations;
    finite += p.finite;
    sum_sq += p.sum_sq;
  }
  report.mse = finite ? sum_sq / static_cast<double>(finite) : 0.0;
  return report;
}

std::vector<TruncationReport> sweep(const TensorBuffer& input, std::span<const unsigned> levels,
                                    const power::SavingsEstimator& estimator, NonFinitePolicy policy,
                                    unsigned threads) {
  for (unsigned n : levels) check_level(n);
  std::vector<TruncationReport> rows;
  rows.reserve(levels.size());
  for (unsigned n : levels) {
    const TensorBuffer truncated = truncate_tensor(input, n, policy, threads);
    rows.push_back(error_stats(input, truncated, n, estimator, policy, threads));
  }
  return rows;
}

std::string sweep_to_csv(std::span<const TruncationReport> rows) {
  using detail::format_double;
  std::ostringstream os;
  os << "n,max_abs_err,max_rel_err,mse,bound,savings_pct\n";
  for (const auto& r : rows) {
    os << r.n << ',' << format_double(r.max_abs_error) << ',' << format_double(r.max_rel_error) << ','
       << format_double(r.mse) << ',' << format_double(r.bound) << ',' << format_double(r.savings_pct) << '\n';
  }
  return os.str();
}

std::string sweep_to_json(std::span<const TruncationReport> rows, std::string_view power_model) {
  nlohmann::ordered_json j;
  j["power_model"] = power_model;
  auto& arr = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    arr.push_back({{"n", r.n},
                   {"elements", r.elements},
                   {"max_abs_err", r.max_abs_error},
                   {"max_rel_err", r.max_rel_error},
                   {"mse", r.mse},
                   {"bound", r.bound},
                   {"savings_pct", r.savings_pct},
                   {"nonfinite", r.nonfinite_count},
                   {"zeros", r.zero_count},
                   {"subnormals", r.subnormal_count},
                   {"bound_violations", r.bound_violations},
                   {"nonfinite_policy", to_string(r.policy)}});
  }
  return j.dump(2) + "\n";
}

namespace {

unsigned parse_uint(std::string_view s, std::string_view whole) {
  unsigned v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw InvalidArgument("cannot parse '" + std::string(whole) + "'");
  }
  return v;
}

}  // namespace

std::vector<unsigned> parse_levels(std::string_view text) {
  std::vector<unsigned> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view item = text.substr(pos, end - pos);
    if (const auto dots = item.find(".."); dots != std::string_view::npos) {
      const unsigned lo = parse_uint(item.substr(0, dots), text);
      const unsigned hi = parse_uint(item.substr(dots + 2), text);
      if (lo > hi) throw InvalidArgument("descending range in '" + std::string(text) + "'");
      if (hi > kFractionBits) throw InvalidArgument("level " + std::to_string(hi) + " exceeds 23");
      for (unsigned v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      const unsigned v = parse_uint(item, text);
      if (v > kFractionBits) throw InvalidArgument("level " + std::to_string(v) + " exceeds 23");
      out.push_back(v);
    }
    pos = end + 1;
  }
  return out;
}

std::vector<std::uint32_t> parse_shape(std::string_view text) {
  std::vector<std::uint32_t> shape;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find_first_of(",x", pos);
    if (end == std::string_view::npos) end = text.size();
    shape.push_back(parse_uint(text.substr(pos, end - pos), text));
    pos = end + 1;
  }
  element_count(shape);
  return shape;
}

}  // namespace bittrunc::tensor
