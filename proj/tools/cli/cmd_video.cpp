#include <ostream>

#include "bittrunc/errors.hpp"
#include "bittrunc/videopipe.hpp"
#include "cli.hpp"

namespace bittrunc::cli {

int cmd_video(const GlobalOptions& global, const VideoOptions& options, std::ostream& out, std::ostream& err) {
  if (options.policy == "roi" && !options.roi) throw InvalidArgument("--policy roi needs --roi <file>");
  if (options.policy != "roi" && options.roi) throw InvalidArgument("--roi only applies to --policy roi");
  if (options.policy != "content" && options.content_map) {
    throw InvalidArgument("--content-map only applies to --policy content");
  }

  const auto estimator = global.estimator();
  video::VideoClip clip = video::load_yuv(options.input, options.width, options.height);
  clip.fps = options.fps;

  video::PolicyOptions policy;
  policy.truncate_chroma = !options.luma_only;
  policy.variance_threshold = options.variance_threshold;
  policy.threads = global.threads;
  if (options.content_map) policy.content_mapping = video::ContentMapping::parse(*options.content_map);

  video::PolicyDecision decision;
  if (options.policy == "luminance") {
    decision = video::decide_luminance(clip, video::parse_luminance_condition(options.condition), policy);
  } else if (options.policy == "content") {
    decision = video::decide_content(clip, policy);
  } else {
    decision = video::decide_roi(clip, video::load_roi(*options.roi), policy);
  }

  const auto truncated = video::apply_policy(clip, decision, global.threads);
  if (options.output) video::save_yuv(truncated, *options.output);

  video::ReportOptions report_opts;
  report_opts.metric_planes = options.metric_planes == "all" ? video::MetricPlanes::All : video::MetricPlanes::Luma;
  report_opts.threads = global.threads;
  const auto report = video::quality_report(clip, truncated, decision, estimator, report_opts);
  const std::string text =
      global.report_or(ReportFormat::Json) == ReportFormat::Csv ? video::to_csv(report) : video::to_json(report);
  if (options.report_out) {
    write_text_file(*options.report_out, text);
  } else {
    out << text;
  }
  err << clip.frames.size() << " frames, policy " << decision.policy << ", PSNR " << report.mean_psnr_db
      << " dB, SSIM " << report.mean_ssim << ", savings " << report.savings_pct << "%\n";
  return kExitOk;
}

}  // namespace bittrunc::cli
