#include <charconv>
#include <nlohmann/json.hpp>
#include <ostream>

#include "bittrunc/errors.hpp"
#include "cli.hpp"

namespace bittrunc::cli {

int cmd_power(const GlobalOptions& global, const PowerOptions& options, std::ostream& out, std::ostream&) {
  const auto estimator = global.estimator();
  const auto& params = estimator.params();
  const TruncationMode mode = options.mode == "byte" ? TruncationMode::Byte : TruncationMode::Word;

  std::optional<power::DataPattern> pattern;
  if (options.data_word) {
    std::string_view text = *options.data_word;
    if (text.starts_with("0x") || text.starts_with("0X")) text.remove_prefix(2);
    std::uint32_t word = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), word, 16);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
      throw InvalidArgument("--data-word expects a 32-bit hex value");
    }
    pattern = power::classify_word(word);
  }

  std::vector<unsigned> levels;
  const unsigned max_k = mode == TruncationMode::Byte ? kByteBits : kWordBits;
  if (options.k) {
    TruncationSpec{mode, *options.k}.validate();
    levels.push_back(*options.k);
  } else {
    for (unsigned k = 0; k <= max_k; ++k) levels.push_back(k);
  }

  struct Row {
    unsigned k;
    double savings, linear, anchored, read_uW;
  };
  std::vector<Row> rows;
  for (unsigned k : levels) {
    const TruncationSpec spec{mode, k};
    rows.push_back({k, estimator(spec), power::savings_linear(spec, params),
                    power::savings_anchored(spec, estimator.table()),
                    power::read_power_estimate(spec, params, pattern)});
  }

  if (global.report_or(ReportFormat::Json) == ReportFormat::Csv) {
    out << "mode,k,savings_pct,linear_pct,anchored_pct,read_power_uW\n";
    for (const auto& r : rows) {
      nlohmann::json v = {r.savings, r.linear, r.anchored, r.read_uW};
      out << options.mode << ',' << r.k << ',' << v[0].dump() << ',' << v[1].dump() << ',' << v[2].dump() << ','
          << v[3].dump() << '\n';
    }
    return kExitOk;
  }

  nlohmann::ordered_json j;
  j["mode"] = options.mode;
  j["model"] = power::to_string(estimator.model());
  j["base_read_power_uW"] = params.base_read_power_uW;
  j["write_power_mW"] = params.write_power_mW;
  j["manager_overhead_uW"] = params.manager_overhead_uW;
  j["data_dependent"] = pattern.has_value();
  auto& arr = j["levels"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    arr.push_back({{"k", r.k},
                   {"savings_pct", r.savings},
                   {"linear_pct", r.linear},
                   {"anchored_pct", r.anchored},
                   {"read_power_uW", r.read_uW}});
  }
  out << j.dump(2) << '\n';
  return kExitOk;
}

}  // namespace bittrunc::cli
