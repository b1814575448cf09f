#include "cli.hpp"

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif
#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>

#include "bittrunc/errors.hpp"

namespace bittrunc::cli {

power::SavingsEstimator GlobalOptions::estimator() const {
  if (!calibration) return power::SavingsEstimator(model);
  const auto cal = power::load_calibration(*calibration);
  return power::SavingsEstimator(model, cal.params, cal.table);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError("cannot write " + path.string());
  os << text;
  if (!os) throw FormatError("short write to " + path.string());
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bit-truncation memory emulator and analysis toolkit", "bittrunc"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  std::string report_name;
  std::string model_name = "anchored";
  std::string calibration;
  app.add_option("--report", report_name, "Report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--model", model_name, "Power savings model")
      ->check(CLI::IsMember({"linear", "anchored"}))
      ->capture_default_str();
  app.add_option("--calibration", calibration, "Calibration table file")->check(CLI::ExistingFile);
  app.add_option("--seed", global.seed, "Random seed")->capture_default_str();
  app.add_option("--threads", global.threads, "Worker thread cap (0 = all cores)")->capture_default_str();

  VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand("verify-prop1", "Exhaustively check the dummy-fill rule against every fill");
  verify_cmd->add_option("--max-cardinality", verify.max_cardinality, "Largest random index set")
      ->capture_default_str();
  verify_cmd->add_option("--samples", verify.samples, "Random index sets to check")->capture_default_str();

  SimOptions sim;
  auto* sim_cmd = app.add_subcommand("sim", "Run a .tmscript against the memory model");
  sim_cmd->add_option("script", sim.script, "Script path")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--trace-out", sim.trace_out, "CSV trace output");
  sim_cmd->add_option("--text-out", sim.text_out, "Aligned text trace output (default: stdout)");
  sim_cmd->add_option("--words", sim.words, "Memory depth in words")->capture_default_str();
  sim_cmd->add_flag("--strict", sim.strict, "Fail (exit 3) when a read returns unknown bits");
  sim_cmd->add_flag("--lint", sim.lint, "Warn when writes hit gated columns");

  PowerOptions pw;
  auto* power_cmd = app.add_subcommand("power", "Power savings and read power per truncation level");
  power_cmd->add_option("--mode", pw.mode, "Truncation mode")->check(CLI::IsMember({"byte", "word"}))->capture_default_str();
  power_cmd->add_option("--k", pw.k, "Truncated bits (default: every level)");
  power_cmd->add_option("--data-word", pw.data_word, "Stored word (hex) for data-dependent read power");

  VideoOptions vid;
  auto* video_cmd = app.add_subcommand("video", "Apply a viewer-aware truncation policy to a raw I420 clip");
  video_cmd->add_option("--input", vid.input, "Input .yuv")->required()->check(CLI::ExistingFile);
  video_cmd->add_option("--width", vid.width, "Frame width")->required();
  video_cmd->add_option("--height", vid.height, "Frame height")->required();
  video_cmd->add_option("--fps", vid.fps, "Frame rate (metadata only)");
  video_cmd->add_option("--policy", vid.policy, "Truncation policy")
      ->required()
      ->check(CLI::IsMember({"luminance", "content", "roi"}));
  video_cmd->add_option("--condition", vid.condition, "Ambient condition for the luminance policy")
      ->check(CLI::IsMember({"normal", "overcast", "sunlight"}))
      ->capture_default_str();
  video_cmd->add_option("--roi", vid.roi, "ROI sidecar file")->check(CLI::ExistingFile);
  video_cmd->add_option("--variance-threshold", vid.variance_threshold, "Plain macroblock variance threshold")
      ->capture_default_str();
  video_cmd->add_option("--content-map", vid.content_map, "Plain%:k steps, e.g. 0:0,20:1,40:2,60:3,80:4");
  video_cmd->add_flag("--luma-only", vid.luma_only, "Leave chroma planes untruncated");
  video_cmd->add_option("--metric-planes", vid.metric_planes, "Planes used for PSNR/SSIM")
      ->check(CLI::IsMember({"luma", "all"}))
      ->capture_default_str();
  video_cmd->add_option("--output", vid.output, "Truncated clip output");
  video_cmd->add_option("--report-out", vid.report_out, "Report file (default: stdout)");

  TensorOptions ten;
  auto* tensor_cmd = app.add_subcommand("tensor", "Truncate float32 tensors and sweep truncation levels");
  tensor_cmd->require_subcommand(1);
  auto add_input = [&](CLI::App* sub) {
    sub->add_option("--input", ten.input, "Input tensor")->required()->check(CLI::ExistingFile);
    sub->add_flag("--raw", ten.raw, "Input is headerless little-endian float32");
    sub->add_option("--shape", ten.shape, "Shape for raw input, e.g. 64,3,3,3");
    sub->add_option("--nonfinite", ten.nonfinite, "Inf/NaN handling")
        ->check(CLI::IsMember({"preserve", "hardware"}))
        ->capture_default_str();
  };
  auto* t_trunc = tensor_cmd->add_subcommand("truncate", "Truncate n fraction LSBs of every element");
  add_input(t_trunc);
  t_trunc->add_option("--n", ten.levels, "Fraction bits to truncate (0..23)")->required();
  t_trunc->add_option("--output", ten.output, "Truncated tensor output (same format as input)");
  t_trunc->add_option("--report-out", ten.report_out, "Error report file (default: stdout)");
  auto* t_sweep = tensor_cmd->add_subcommand("sweep", "Error and power table over truncation levels");
  add_input(t_sweep);
  t_sweep->add_option("--n", ten.levels, "Levels, e.g. 0..23 or 1,8,16")->capture_default_str();
  t_sweep->add_option("--output", ten.output, "Table output (default: stdout)");
  auto* t_gen = tensor_cmd->add_subcommand("generate", "Write a seeded normal float32 tensor");
  t_gen->add_option("--count", ten.count, "Element count (1-D)");
  t_gen->add_option("--shape", ten.shape, "Shape, e.g. 64,3,3,3");
  t_gen->add_option("--stddev", ten.stddev, "Standard deviation")->capture_default_str();
  t_gen->add_option("--output", ten.output, "Output tensor")->required();
  t_gen->add_flag("--raw", ten.raw, "Write headerless float32");

  try {
    std::vector<std::string> reversed(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(reversed.begin(), reversed.end());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (!report_name.empty()) global.report = report_name == "csv" ? ReportFormat::Csv : ReportFormat::Json;
    global.model = power::parse_savings_model(model_name);
    if (!calibration.empty()) global.calibration = calibration;

    if (verify_cmd->parsed()) return cmd_verify_prop1(global, verify, out, err);
    if (sim_cmd->parsed()) return cmd_sim(global, sim, out, err);
    if (power_cmd->parsed()) return cmd_power(global, pw, out, err);
    if (video_cmd->parsed()) return cmd_video(global, vid, out, err);
    if (tensor_cmd->parsed()) {
      ten.action = t_trunc->parsed() ? "truncate" : t_sweep->parsed() ? "sweep" : "generate";
      return cmd_tensor(global, ten, out, err);
    }
  } catch (const VerificationFailure& e) {
    err << "verification failed: " << e.what() << '\n';
    return kExitVerification;
  } catch (const UnknownValueError& e) {
    err << "error: " << e.what() << '\n';
    return kExitVerification;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace bittrunc::cli
