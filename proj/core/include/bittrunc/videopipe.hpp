#pragma once

// Raw I420 video, viewer-aware truncation policies (luminance, content, ROI),
// byte-mode truncation of pixel memory, and PSNR/SSIM quality reports.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bittrunc/powermodel.hpp"

namespace bittrunc::video {

enum class Plane { Y, U, V };

/// One 8-bit 4:2:0 frame: full-resolution Y followed by half-resolution U and V.
struct FramePlanar420 {
  unsigned width = 0;
  unsigned height = 0;
  std::vector<std::uint8_t> y;
  std::vector<std::uint8_t> u;
  std::vector<std::uint8_t> v;

  /// Throws InvalidArgument unless both dimensions are positive and even.
  static FramePlanar420 filled(unsigned width, unsigned height, std::uint8_t luma, std::uint8_t chroma = 128);

  unsigned chroma_width() const { return width / 2; }
  unsigned chroma_height() const { return height / 2; }
  unsigned plane_width(Plane p) const { return p == Plane::Y ? width : chroma_width(); }
  unsigned plane_height(Plane p) const { return p == Plane::Y ? height : chroma_height(); }
  std::span<std::uint8_t> plane(Plane p);
  std::span<const std::uint8_t> plane(Plane p) const;

  /// Throws FormatError when plane sizes do not match the dimensions.
  void validate() const;

  friend bool operator==(const FramePlanar420&, const FramePlanar420&) = default;
};

struct VideoClip {
  unsigned width = 0;
  unsigned height = 0;
  double fps = 30.0;
  std::vector<FramePlanar420> frames;

  friend bool operator==(const VideoClip& a, const VideoClip& b) {
    return a.width == b.width && a.height == b.height && a.frames == b.frames;
  }
};

/// Bytes per I420 frame, w*h*3/2.
std::size_t frame_bytes(unsigned width, unsigned height);

VideoClip decode_i420(std::span<const std::uint8_t> data, unsigned width, unsigned height);
std::vector<std::uint8_t> encode_i420(const VideoClip& clip);
VideoClip load_yuv(const std::filesystem::path& path, unsigned width, unsigned height);
void save_yuv(const VideoClip& clip, const std::filesystem::path& path);

inline constexpr unsigned kMacroblockSize = 16;
inline constexpr double kDefaultPlainVarianceThreshold = 100.0;

struct MacroblockGrid {
  unsigned blocks_x = 0;
  unsigned blocks_y = 0;
  double threshold = kDefaultPlainVarianceThreshold;
  std::vector<double> variance;  ///< population luma variance, row-major
  std::vector<bool> plain;       ///< variance < threshold
  double plain_pct = 0.0;
};

/// Partitions luma into 16x16 blocks (edge blocks may be partial).
MacroblockGrid analyze_macroblocks(const FramePlanar420& frame, double variance_threshold = kDefaultPlainVarianceThreshold);

/// Mean plain-macroblock percentage over every frame of the clip.
double clip_plain_pct(const VideoClip& clip, double variance_threshold = kDefaultPlainVarianceThreshold,
                      unsigned threads = 0);

enum class VarianceClass { Low, Medium, High };

const char* to_string(VarianceClass c);

/// Plain-MB percentage breakpoints: >= low_min is low variance, >= medium_min medium.
struct VarianceBreakpoints {
  double low_min_plain_pct = 60.0;
  double medium_min_plain_pct = 20.0;
};

VarianceClass classify_clip(double plain_pct, const VarianceBreakpoints& breakpoints = {});

enum class LuminanceCondition { Normal, Overcast, Sunlight };

LuminanceCondition parse_luminance_condition(std::string_view name);
const char* to_string(LuminanceCondition condition);

/// normal -> 0, overcast -> 3, sunlight -> 4.
unsigned policy_luminance(LuminanceCondition condition);

/// Step table from plain-MB percentage to truncated bits. Each step applies
/// from its `min_plain_pct` up to the next step.
struct ContentMapping {
  struct Step {
    double min_plain_pct = 0.0;
    unsigned k = 0;
  };
  std::vector<Step> steps;

  /// <20 -> 0, 20-40 -> 1, 40-60 -> 2, 60-80 -> 3, >=80 -> 4.
  static ContentMapping defaults();
  /// Parses "0:0,20:1,40:2,60:3,80:4".
  static ContentMapping parse(std::string_view text);
  /// Throws InvalidArgument if thresholds do not increase or k ever decreases.
  void validate() const;
};

/// Looks up plain_pct in the mapping; result clamped to 0..4.
unsigned policy_content(double plain_pct, const ContentMapping& mapping = ContentMapping::defaults());

struct Rect {
  long x = 0;
  long y = 0;
  long w = 0;
  long h = 0;
};

/// Per-frame ROI rectangles, in pixels.
class RoiSpec {
 public:
  /// Throws InvalidArgument when frame indices decrease or a size is negative.
  void add(std::size_t frame, Rect rect);
  std::span<const Rect> rects(std::size_t frame) const;
  std::size_t rect_count() const;
  bool empty() const { return by_frame_.empty(); }

 private:
  std::map<std::size_t, std::vector<Rect>> by_frame_;
  std::size_t last_frame_ = 0;
};

/// Line format `frame_index x y w h`, `#` comments.
RoiSpec parse_roi(std::string_view text);
RoiSpec load_roi(const std::filesystem::path& path);

inline constexpr unsigned kRoiOutsideBits = 3;

/// Per-byte truncation levels for one frame, laid out like the planes.
struct FrameTruncationMap {
  unsigned width = 0;
  unsigned height = 0;
  std::vector<std::uint8_t> y;
  std::vector<std::uint8_t> u;
  std::vector<std::uint8_t> v;

  static FrameTruncationMap uniform(unsigned width, unsigned height, unsigned k, bool truncate_chroma = true);
  std::span<const std::uint8_t> plane(Plane p) const;
  /// Histogram of k over every byte of the frame.
  std::array<std::uint64_t, 9> histogram() const;
};

/// k = 0 inside any rectangle, `k_outside` elsewhere. A chroma sample is kept
/// when any of its four luma samples lies inside a rectangle.
FrameTruncationMap policy_roi(std::span<const Rect> rois, unsigned width, unsigned height,
                              unsigned k_outside = kRoiOutsideBits, bool truncate_chroma = true);

struct PolicyDecision {
  std::string policy;
  std::map<std::string, std::string> parameters;
  /// One map per frame, or a single map shared by every frame.
  std::vector<FrameTruncationMap> frames;

  const FrameTruncationMap& frame(std::size_t index) const { return frames.size() == 1 ? frames[0] : frames.at(index); }
  std::array<std::uint64_t, 9> histogram(std::size_t frame_count) const;
};

struct PolicyOptions {
  bool truncate_chroma = true;
  double variance_threshold = kDefaultPlainVarianceThreshold;
  ContentMapping content_mapping = ContentMapping::defaults();
  unsigned threads = 0;
};

PolicyDecision decide_luminance(const VideoClip& clip, LuminanceCondition condition, const PolicyOptions& options = {});
PolicyDecision decide_content(const VideoClip& clip, const PolicyOptions& options = {});
PolicyDecision decide_roi(const VideoClip& clip, const RoiSpec& roi, const PolicyOptions& options = {});

/// Passes every byte through apply_truncation_byte with its mapped k. Throws
/// InvalidArgument when the decision does not match the clip.
VideoClip apply_policy(const VideoClip& clip, const PolicyDecision& decision, unsigned threads = 0);

inline constexpr double kPsnrCap = 99.0;

struct PsnrResult {
  double db = kPsnrCap;
  double mse = 0.0;
  bool identical = true;
};

PsnrResult psnr(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b, double cap = kPsnrCap);

/// Mean SSIM over every 8x8 window (stride 1), K1 = 0.01, K2 = 0.03, L = 255.
/// Planes smaller than the window are treated as a single window.
double ssim(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b, unsigned width, unsigned height);

enum class MetricPlanes { Luma, All };

/// Luma: Y plane only. All: per-plane values averaged with weights by sample count.
PsnrResult psnr(const FramePlanar420& a, const FramePlanar420& b, MetricPlanes planes = MetricPlanes::Luma,
                double cap = kPsnrCap);
double ssim(const FramePlanar420& a, const FramePlanar420& b, MetricPlanes planes = MetricPlanes::Luma);

struct FrameQuality {
  std::size_t index = 0;
  PsnrResult psnr;
  double ssim = 1.0;
  double savings_pct = 0.0;
};

struct QualityReport {
  std::string policy;
  std::map<std::string, std::string> parameters;
  std::string power_model;
  MetricPlanes metric_planes = MetricPlanes::Luma;
  unsigned width = 0;
  unsigned height = 0;
  std::vector<FrameQuality> frames;
  double mean_psnr_db = kPsnrCap;
  double mean_ssim = 1.0;
  double mean_mse = 0.0;
  double savings_pct = 0.0;
  bool identical = true;
};

struct ReportOptions {
  MetricPlanes metric_planes = MetricPlanes::Luma;
  double psnr_cap = kPsnrCap;
  unsigned threads = 0;
};

QualityReport quality_report(const VideoClip& original, const VideoClip& truncated, const PolicyDecision& decision,
                             const power::SavingsEstimator& estimator, const ReportOptions& options = {});

/// Nested JSON: metadata, per-frame array, aggregates.
std::string to_json(const QualityReport& report);
/// Flat CSV: one row per frame, then a `mean` row.
std::string to_csv(const QualityReport& report);

}  // namespace bittrunc::video
