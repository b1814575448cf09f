#pragma once

// Fraction-bit truncation of float32 tensors (DNN weights and biases), with
// error statistics and truncation-level sweeps paired with word-mode power.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bittrunc/bitcore.hpp"
#include "bittrunc/powermodel.hpp"

namespace bittrunc::tensor {

/// Dense float32 tensor.
class TensorBuffer {
 public:
  TensorBuffer() = default;
  /// Throws InvalidArgument if a dim is 0 or the payload length differs from the shape's product.
  TensorBuffer(std::vector<std::uint32_t> shape, std::vector<float> data, std::string name = {});

  std::span<const std::uint32_t> shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  std::span<const float> data() const { return data_; }
  std::span<float> data() { return data_; }
  const std::string& name() const { return name_; }

  /// Shapes equal and payloads bit-identical (NaN payloads included).
  bool bit_equal(const TensorBuffer& other) const;

 private:
  std::vector<std::uint32_t> shape_;
  std::vector<float> data_;
  std::string name_;
};

/// Product of dims; throws InvalidArgument for a zero dim or overflow.
std::size_t element_count(std::span<const std::uint32_t> shape);

/// i.i.d. normal samples from a seeded 64-bit Mersenne twister.
TensorBuffer normal_tensor(std::vector<std::uint32_t> shape, std::uint64_t seed, double mean = 0.0,
                           double stddev = 1.0);

/// Truncates the n fraction LSBs of every element, 0 <= n <= 23.
TensorBuffer truncate_tensor(const TensorBuffer& input, unsigned n, NonFinitePolicy policy = NonFinitePolicy::Preserve,
                             unsigned threads = 0);

/// Worst-case |dx/x| for finite normal inputs: 2^(n-24).
double relative_error_bound(unsigned n);

struct TruncationReport {
  unsigned n = 0;
  std::size_t elements = 0;
  double max_abs_error = 0.0;
  /// Over finite non-zero elements; zeros contribute absolute error only.
  double max_rel_error = 0.0;
  /// Mean squared error over finite elements.
  double mse = 0.0;
  double bound = 0.0;
  double savings_pct = 0.0;
  std::size_t nonfinite_count = 0;
  std::size_t zero_count = 0;
  std::size_t subnormal_count = 0;
  /// Finite normal elements whose relative error exceeds `bound`.
  std::size_t bound_violations = 0;
  NonFinitePolicy policy = NonFinitePolicy::Preserve;
};

/// Element-wise comparison. Throws InvalidArgument when shapes differ or n > 23.
TruncationReport error_stats(const TensorBuffer& original, const TensorBuffer& truncated, unsigned n,
                             const power::SavingsEstimator& estimator = {},
                             NonFinitePolicy policy = NonFinitePolicy::Preserve, unsigned threads = 0);

std::vector<TruncationReport> sweep(const TensorBuffer& input, std::span<const unsigned> levels,
                                    const power::SavingsEstimator& estimator = {},
                                    NonFinitePolicy policy = NonFinitePolicy::Preserve, unsigned threads = 0);

/// Columns: n,max_abs_err,max_rel_err,mse,bound,savings_pct.
std::string sweep_to_csv(std::span<const TruncationReport> rows);
std::string sweep_to_json(std::span<const TruncationReport> rows, std::string_view power_model);

/// "5", "0..23", "1,8,16" or combinations like "0..3,17". Throws InvalidArgument.
std::vector<unsigned> parse_levels(std::string_view text);

/// TRNT container: "TRNT", version 1, dtype 1 (float32), rank, rank x u32 LE dims, LE float32 payload.
std::vector<std::uint8_t> encode_trnt(const TensorBuffer& tensor);
TensorBuffer decode_trnt(std::span<const std::uint8_t> bytes);
/// Headerless little-endian float32.
std::vector<std::uint8_t> encode_raw(const TensorBuffer& tensor);
/// Empty `shape` means 1-D over the whole payload.
TensorBuffer decode_raw(std::span<const std::uint8_t> bytes, std::vector<std::uint32_t> shape = {});

TensorBuffer load_tensor(const std::filesystem::path& path);
TensorBuffer load_raw_tensor(const std::filesystem::path& path, std::vector<std::uint32_t> shape = {});
void save_tensor(const TensorBuffer& tensor, const std::filesystem::path& path);
void save_raw_tensor(const TensorBuffer& tensor, const std::filesystem::path& path);

/// "3,4,5" -> {3,4,5}.
std::vector<std::uint32_t> parse_shape(std::string_view text);

}  // namespace bittrunc::tensor
