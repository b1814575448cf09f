#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bittrunc/powermodel.hpp"

namespace bittrunc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitVerification = 3;

enum class ReportFormat { Json, Csv };

/// Flags shared by every subcommand.
struct GlobalOptions {
  std::optional<ReportFormat> report;  ///< unset: the subcommand's default
  power::SavingsModel model = power::SavingsModel::Anchored;
  std::optional<std::filesystem::path> calibration;
  std::uint64_t seed = 7;
  unsigned threads = 0;

  ReportFormat report_or(ReportFormat fallback) const { return report.value_or(fallback); }
  /// Loads the calibration file when given.
  power::SavingsEstimator estimator() const;
};

/// Raised by a subcommand whose checks ran but found violations (exit 3).
class VerificationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VerifyOptions {
  unsigned max_cardinality = 6;
  unsigned samples = 200;
  unsigned contiguous_max = 8;
};

struct SimOptions {
  std::filesystem::path script;
  std::optional<std::filesystem::path> trace_out;
  std::optional<std::filesystem::path> text_out;
  std::size_t words = 1024;
  bool strict = false;
  bool lint = false;
};

struct PowerOptions {
  std::string mode = "word";
  std::optional<unsigned> k;
  std::optional<std::string> data_word;
};

struct VideoOptions {
  std::filesystem::path input;
  std::optional<std::filesystem::path> output;
  std::optional<std::filesystem::path> report_out;
  unsigned width = 0;
  unsigned height = 0;
  double fps = 30.0;
  std::string policy;
  std::string condition = "overcast";
  std::optional<std::filesystem::path> roi;
  double variance_threshold = 100.0;
  std::optional<std::string> content_map;
  bool luma_only = false;
  std::string metric_planes = "luma";
};

struct TensorOptions {
  std::string action;  ///< truncate | sweep | generate
  std::optional<std::filesystem::path> input;
  std::optional<std::filesystem::path> output;
  std::optional<std::filesystem::path> report_out;
  bool raw = false;
  std::optional<std::string> shape;
  std::string levels = "0";
  std::string nonfinite = "preserve";
  std::uint64_t count = 0;
  double stddev = 1.0;
};

int cmd_verify_prop1(const GlobalOptions& global, const VerifyOptions& options, std::ostream& out, std::ostream& err);
int cmd_sim(const GlobalOptions& global, const SimOptions& options, std::ostream& out, std::ostream& err);
int cmd_power(const GlobalOptions& global, const PowerOptions& options, std::ostream& out, std::ostream& err);
int cmd_video(const GlobalOptions& global, const VideoOptions& options, std::ostream& out, std::ostream& err);
int cmd_tensor(const GlobalOptions& global, const TensorOptions& options, std::ostream& out, std::ostream& err);

/// Parses `args` (args[0] is the program name), runs the subcommand and maps
/// failures onto exit codes 0 / 2 / 3.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Writes `text` to `path`, throwing FormatError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace bittrunc::cli
