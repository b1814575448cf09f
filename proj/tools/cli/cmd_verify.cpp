#include <algorithm>
#include <chrono>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <numeric>
#include <ostream>
#include <random>

#include "bittrunc/bitcore.hpp"
#include "bittrunc/errors.hpp"
#include "cli.hpp"

namespace bittrunc::cli {

namespace {

struct CaseResult {
  std::string origin;
  TruncationIndexSet set;
  FloatContext context;
  BestFillResult fill;

  bool ok() const { return fill.dummy_is_minimizer() && fill.dummy_sse == fill.complement_sse; }
  bool tie() const { return fill.argmin_fills.size() > 1; }
};

FloatContext random_context(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint32_t> exponent(1, 254);
  std::uniform_int_distribution<std::uint32_t> fraction(0, 0x7FFFFF);
  return {static_cast<bool>(rng() & 1u), exponent(rng), fraction(rng)};
}

TruncationIndexSet random_set(std::mt19937_64& rng, unsigned max_cardinality) {
  std::uniform_int_distribution<unsigned> card(1, max_cardinality);
  std::vector<unsigned> pool(kFractionBits);
  std::iota(pool.begin(), pool.end(), 0u);
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(card(rng));
  return TruncationIndexSet(std::move(pool));
}

std::string hex(std::uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%06X", v);
  return buf;
}

}  // namespace

int cmd_verify_prop1(const GlobalOptions& global, const VerifyOptions& options, std::ostream& out, std::ostream& err) {
  if (options.max_cardinality == 0 || options.max_cardinality > kOracleCardinalityCap) {
    throw InvalidArgument("--max-cardinality must be 1.." + std::to_string(kOracleCardinalityCap));
  }
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(global.seed);

  std::vector<CaseResult> cases;
  for (unsigned n = 1; n <= options.contiguous_max; ++n) {
    const auto set = TruncationIndexSet::contiguous(n);
    cases.push_back({"contiguous", set, {}, brute_force_best_fill(set)});
  }
  for (unsigned s = 0; s < options.samples; ++s) {
    const auto set = random_set(rng, options.max_cardinality);
    const auto ctx = random_context(rng);
    cases.push_back({"random", set, ctx, brute_force_best_fill(set, ctx)});
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto violations = std::count_if(cases.begin(), cases.end(), [](const CaseResult& c) { return !c.ok(); });
  const auto ties = std::count_if(cases.begin(), cases.end(), [](const CaseResult& c) { return c.tie(); });

  if (global.report_or(ReportFormat::Json) == ReportFormat::Csv) {
    out << "case,origin,set,sign,exponent,fraction,min_sse,dummy_fill,dummy_sse,complement_fill,complement_sse,"
           "argmin_count,tie,ok\n";
    for (std::size_t i = 0; i < cases.size(); ++i) {
      const auto& c = cases[i];
      std::string set = c.set.to_string();
      std::replace(set.begin(), set.end(), ',', ' ');
      out << i << ',' << c.origin << ',' << set << ',' << c.context.sign << ',' << c.context.exponent << ','
          << hex(c.context.fraction) << ',' << c.fill.min_sse << ',' << hex(c.fill.dummy_fill) << ','
          << c.fill.dummy_sse << ',' << hex(c.fill.complement_fill) << ',' << c.fill.complement_sse << ','
          << c.fill.argmin_fills.size() << ',' << (c.tie() ? "true" : "false") << ',' << (c.ok() ? "true" : "false")
          << '\n';
    }
  } else {
    nlohmann::ordered_json j;
    j["seed"] = global.seed;
    j["max_cardinality"] = options.max_cardinality;
    j["samples"] = options.samples;
    j["cases"] = cases.size();
    j["violations"] = violations;
    j["ties"] = ties;
    j["elapsed_s"] = seconds;
    auto& list = j["results"] = nlohmann::ordered_json::array();
    for (const auto& c : cases) {
      std::vector<std::string> argmin;
      for (auto f : c.fill.argmin_fills) argmin.push_back(hex(f));
      list.push_back({{"origin", c.origin},
                      {"set", std::vector<unsigned>(c.set.indices().begin(), c.set.indices().end())},
                      {"sign", c.context.sign},
                      {"exponent", c.context.exponent},
                      {"fraction", hex(c.context.fraction)},
                      {"min_sse", c.fill.min_sse},
                      {"dummy_fill", hex(c.fill.dummy_fill)},
                      {"dummy_sse", c.fill.dummy_sse},
                      {"complement_fill", hex(c.fill.complement_fill)},
                      {"complement_sse", c.fill.complement_sse},
                      {"argmin", argmin},
                      {"tie", c.tie()},
                      {"ok", c.ok()}});
    }
    out << j.dump(2) << '\n';
  }

  err << cases.size() << " cases, " << ties << " ties, " << violations << " violations\n";
  if (violations > 0) throw VerificationFailure(std::to_string(violations) + " case(s) where the dummy fill is not optimal");
  return kExitOk;
}

}  // namespace bittrunc::cli
