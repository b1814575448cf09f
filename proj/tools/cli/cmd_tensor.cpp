#include <nlohmann/json.hpp>
#include <ostream>

#include "bittrunc/errors.hpp"
#include "bittrunc/tensortrunc.hpp"
#include "cli.hpp"

namespace bittrunc::cli {

namespace {

tensor::TensorBuffer load_input(const TensorOptions& options) {
  if (options.raw) {
    std::vector<std::uint32_t> shape;
    if (options.shape) shape = tensor::parse_shape(*options.shape);
    return tensor::load_raw_tensor(*options.input, std::move(shape));
  }
  if (options.shape) throw InvalidArgument("--shape only applies to --raw input");
  return tensor::load_tensor(*options.input);
}

void save_output(const TensorOptions& options, const tensor::TensorBuffer& t) {
  if (options.raw) {
    tensor::save_raw_tensor(t, *options.output);
  } else {
    tensor::save_tensor(t, *options.output);
  }
}

NonFinitePolicy parse_policy(const std::string& name) {
  return name == "hardware" ? NonFinitePolicy::HardwareFaithful : NonFinitePolicy::Preserve;
}

}  // namespace

int cmd_tensor(const GlobalOptions& global, const TensorOptions& options, std::ostream& out, std::ostream& err) {
  if (options.action == "generate") {
    std::vector<std::uint32_t> shape;
    if (options.shape && options.count) throw InvalidArgument("give --count or --shape, not both");
    if (options.shape) {
      shape = tensor::parse_shape(*options.shape);
    } else if (options.count > 0 && options.count <= 0xFFFFFFFFu) {
      shape = {static_cast<std::uint32_t>(options.count)};
    } else {
      throw InvalidArgument("generate needs --count (1..2^32-1) or --shape");
    }
    save_output(options, tensor::normal_tensor(std::move(shape), global.seed, 0.0, options.stddev));
    return kExitOk;
  }

  const NonFinitePolicy policy = parse_policy(options.nonfinite);
  const auto estimator = global.estimator();
  const auto input = load_input(options);

  if (options.action == "truncate") {
    const auto levels = tensor::parse_levels(options.levels);
    if (levels.size() != 1) throw InvalidArgument("truncate takes a single --n");
    const unsigned n = levels.front();
    const auto truncated = tensor::truncate_tensor(input, n, policy, global.threads);
    if (options.output) save_output(options, truncated);
    const auto report = tensor::error_stats(input, truncated, n, estimator, policy, global.threads);
    const std::vector<tensor::TruncationReport> rows{report};
    const std::string text = global.report_or(ReportFormat::Json) == ReportFormat::Csv
                                 ? tensor::sweep_to_csv(rows)
                                 : tensor::sweep_to_json(rows, power::to_string(estimator.model()));
    if (options.report_out) {
      write_text_file(*options.report_out, text);
    } else {
      out << text;
    }
    if (report.bound_violations) {
      err << "warning: " << report.bound_violations << " element(s) exceed the relative error bound\n";
    }
    return kExitOk;
  }

  const auto levels = tensor::parse_levels(options.levels);
  const auto rows = tensor::sweep(input, levels, estimator, policy, global.threads);
  const std::string text = global.report_or(ReportFormat::Csv) == ReportFormat::Csv
                               ? tensor::sweep_to_csv(rows)
                               : tensor::sweep_to_json(rows, power::to_string(estimator.model()));
  if (options.output) {
    write_text_file(*options.output, text);
  } else {
    out << text;
  }
  return kExitOk;
}

}  // namespace bittrunc::cli
