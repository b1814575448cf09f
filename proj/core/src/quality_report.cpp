#include <nlohmann/json.hpp>
#include <sstream>

#include "bittrunc/errors.hpp"
#include "bittrunc/parallel.hpp"
#include "bittrunc/videopipe.hpp"
#include "detail/format.hpp"

namespace bittrunc::video {

QualityReport quality_report(const VideoClip& original, const VideoClip& truncated, const PolicyDecision& decision,
                             const power::SavingsEstimator& estimator, const ReportOptions& options) {
  if (original.frames.size() != truncated.frames.size() || original.width != truncated.width ||
      original.height != truncated.height) {
    throw InvalidArgument("original and truncated clips differ in shape");
  }
  if (original.frames.empty()) throw InvalidArgument("clip has no frames");

  QualityReport report;
  report.policy = decision.policy;
  report.parameters = decision.parameters;
  report.power_model = power::to_string(estimator.model());
  report.metric_planes = options.metric_planes;
  report.width = original.width;
  report.height = original.height;
  report.frames.resize(original.frames.size());

  parallel_for(original.frames.size(), options.threads, [&](std::size_t i) {
    FrameQuality& q = report.frames[i];
    q.index = i;
    q.psnr = psnr(original.frames[i], truncated.frames[i], options.metric_planes, options.psnr_cap);
    q.ssim = ssim(original.frames[i], truncated.frames[i], options.metric_planes);
    q.savings_pct = power::aggregate_savings(decision.frame(i).histogram(), estimator);
  });

  double psnr_sum = 0.0;
  double ssim_sum = 0.0;
  double mse_sum = 0.0;
  for (const auto& q : report.frames) {
    psnr_sum += q.psnr.db;
    ssim_sum += q.ssim;
    mse_sum += q.psnr.mse;
    report.identical = report.identical && q.psnr.identical;
  }
  const double n = static_cast<double>(report.frames.size());
  report.mean_psnr_db = psnr_sum / n;
  report.mean_ssim = ssim_sum / n;
  report.mean_mse = mse_sum / n;
  report.savings_pct = power::aggregate_savings(decision.histogram(original.frames.size()), estimator);
  return report;
}

std::string to_json(const QualityReport& report) {
  nlohmann::ordered_json j;
  j["policy"] = report.policy;
  j["parameters"] = report.parameters;
  j["power_model"] = report.power_model;
  j["metric_planes"] = report.metric_planes == MetricPlanes::Luma ? "luma" : "all";
  j["width"] = report.width;
  j["height"] = report.height;
  j["frame_count"] = report.frames.size();
  auto& frames = j["frames"] = nlohmann::ordered_json::array();
  for (const auto& q : report.frames) {
    frames.push_back({{"index", q.index},
                      {"psnr_db", q.psnr.db},
                      {"identical", q.psnr.identical},
                      {"mse", q.psnr.mse},
                      {"ssim", q.ssim},
                      {"savings_pct", q.savings_pct}});
  }
  j["aggregate"] = {{"mean_psnr_db", report.mean_psnr_db},
                    {"identical", report.identical},
                    {"mean_mse", report.mean_mse},
                    {"mean_ssim", report.mean_ssim},
                    {"savings_pct", report.savings_pct}};
  return j.dump(2) + "\n";
}

std::string to_csv(const QualityReport& report) {
  using detail::format_double;
  std::ostringstream os;
  os << "frame,psnr_db,identical,mse,ssim,savings_pct\n";
  for (const auto& q : report.frames) {
    os << q.index << ',' << format_double(q.psnr.db) << ',' << (q.psnr.identical ? "true" : "false") << ','
       << format_double(q.psnr.mse) << ',' << format_double(q.ssim) << ',' << format_double(q.savings_pct) << '\n';
  }
  os << "mean," << format_double(report.mean_psnr_db) << ',' << (report.identical ? "true" : "false") << ','
     << format_double(report.mean_mse) << ',' << format_double(report.mean_ssim) << ','
     << format_double(report.savings_pct) << '\n';
  return os.str();
}

}  // namespace bittrunc::video
