#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "bittrunc/errors.hpp"
#include "bittrunc/parallel.hpp"
#include "bittrunc/videopipe.hpp"

namespace bittrunc::video {

LuminanceCondition parse_luminance_condition(std::string_view name) {
  if (name == "normal") return LuminanceCondition::Normal;
  if (name == "overcast") return LuminanceCondition::Overcast;
  if (name == "sunlight") return LuminanceCondition::Sunlight;
  throw InvalidArgument("unknown luminance condition '" + std::string(name) + "'");
}

const char* to_string(LuminanceCondition condition) {
  switch (condition) {
    case LuminanceCondition::Normal:
      return "normal";
    case LuminanceCondition::Overcast:
      return "overcast";
    case LuminanceCondition::Sunlight:
      return "sunlight";
  }
  return "?";
}

unsigned policy_luminance(LuminanceCondition condition) {
  switch (condition) {
    case LuminanceCondition::Normal:
      return 0;
    case LuminanceCondition::Overcast:
      return 3;
    case LuminanceCondition::Sunlight:
      return 4;
  }
  return 0;
}

ContentMapping ContentMapping::defaults() { return {{{0.0, 0}, {20.0, 1}, {40.0, 2}, {60.0, 3}, {80.0, 4}}}; }

ContentMapping ContentMapping::parse(std::string_view text) {
  ContentMapping mapping;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view item = text.substr(pos, end - pos);
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) throw InvalidArgument("mapping entry '" + std::string(item) + "' is not pct:k");
    Step step;
    const auto pct = item.substr(0, colon);
    const auto k = item.substr(colon + 1);
    const auto r1 = std::from_chars(pct.data(), pct.data() + pct.size(), step.min_plain_pct);
    const auto r2 = std::from_chars(k.data(), k.data() + k.size(), step.k);
    if (r1.ec != std::errc{} || r1.ptr != pct.data() + pct.size() || r2.ec != std::errc{} ||
        r2.ptr != k.data() + k.size()) {
      throw InvalidArgument("mapping entry '" + std::string(item) + "' is not pct:k");
    }
    mapping.steps.push_back(step);
    pos = end + 1;
  }
  mapping.validate();
  return mapping;
}

void ContentMapping::validate() const {
  if (steps.empty()) throw InvalidArgument("content mapping has no steps");
  for (std::size_t i = 1; i < steps.size(); ++i) {
    if (steps[i].min_plain_pct <= steps[i - 1].min_plain_pct) {
      throw InvalidArgument("content mapping thresholds must strictly increase");
    }
    if (steps[i].k < steps[i - 1].k) {
      throw InvalidArgument("content mapping is not monotone: plain% " + std::to_string(steps[i].min_plain_pct) +
                            " maps to fewer bits than " + std::to_string(steps[i - 1].min_plain_pct));
    }
  }
}

unsigned policy_content(double plain_pct, const ContentMapping& mapping) {
  mapping.validate();
  unsigned k = 0;
  for (const auto& step : mapping.steps) {
    if (plain_pct >= step.min_plain_pct) k = step.k;
  }
  return std::min(k, 4u);
}

void RoiSpec::add(std::size_t frame, Rect rect) {
  if (rect.w < 0 || rect.h < 0) throw InvalidArgument("ROI rectangle has negative size");
  if (!by_frame_.empty() && frame < last_frame_) {
    throw InvalidArgument("ROI frame index " + std::to_string(frame) + " follows " + std::to_string(last_frame_));
  }
  last_frame_ = frame;
  by_frame_[frame].push_back(rect);
}

std::span<const Rect> RoiSpec::rects(std::size_t frame) const {
  const auto it = by_frame_.find(frame);
  if (it == by_frame_.end()) return {};
  return it->second;
}

std::size_t RoiSpec::rect_count() const {
  std::size_t n = 0;
  for (const auto& [frame, rects] : by_frame_) n += rects.size();
  return n;
}

RoiSpec parse_roi(std::string_view text) {
  RoiSpec roi;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) continue;

    std::istringstream is(line);
    long long frame = 0;
    Rect r;
    std::string extra;
    if (!(is >> frame >> r.x >> r.y >> r.w >> r.h) || (is >> extra)) {
      throw ParseError(line_no, "expected 'frame_index x y w h'");
    }
    if (frame < 0) throw ParseError(line_no, "negative frame index");
    try {
      roi.add(static_cast<std::size_t>(frame), r);
    } catch (const InvalidArgument& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return roi;
}

RoiSpec load_roi(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open ROI file " + path.string());
  std::ostringstream body;
  body << in.rdbuf();
  return parse_roi(body.str());
}

FrameTruncationMap FrameTruncationMap::uniform(unsigned width, unsigned height, unsigned k, bool truncate_chroma) {
  if (k > kByteBits) throw InvalidArgument("byte truncation level " + std::to_string(k) + " exceeds 8");
  FrameTruncationMap m;
  m.width = width;
  m.height = height;
  const auto kk = static_cast<std::uint8_t>(k);
  const std::size_t chroma = std::size_t{width / 2} * (height / 2);
  m.y.assign(std::size_t{width} * height, kk);
  m.u.assign(chroma, truncate_chroma ? kk : std::uint8_t{0});
  m.v.assign(chroma, truncate_chroma ? kk : std::uint8_t{0});
  return m;
}

std::span<const std::uint8_t> FrameTruncationMap::plane(Plane p) const {
  return p == Plane::Y ? std::span(y) : p == Plane::U ? std::span(u) : std::span(v);
}

std::array<std::uint64_t, 9> FrameTruncationMap::histogram() const {
  std::array<std::uint64_t, 9> h{};
  for (const auto* plane : {&y, &u, &v}) {
    for (std::uint8_t k : *plane) ++h.at(k);
  }
  return h;
}

std::array<std::uint64_t, 9> PolicyDecision::histogram(std::size_t frame_count) const {
  std::array<std::uint64_t, 9> total{};
  if (frames.size() == 1) {
    const auto h = frames[0].histogram();
    for (std::size_t k = 0; k < h.size(); ++k) total[k] = h[k] * frame_count;
    return total;
  }
  for (const auto& f : frames) {
    const auto h = f.histogram();
    for (std::size_t k = 0; k < h.size(); ++k) total[k] += h[k];
  }
  return total;
}

FrameTruncationMap policy_roi(std::span<const Rect> rois, unsigned width, unsigned height, unsigned k_outside,
                              bool truncate_chroma) {
  FrameTruncationMap m = FrameTruncationMap::uniform(width, height, k_outside, truncate_chroma);
  const unsigned cw = width / 2;
  const unsigned ch = height / 2;
  for (const Rect& r : rois) {
    const long x0 = std::clamp<long>(r.x, 0, width);
    const long y0 = std::clamp<long>(r.y, 0, height);
    const long x1 = std::clamp<long>(r.x + r.w, 0, width);
    const long y1 = std::clamp<long>(r.y + r.h, 0, height);
    if (x0 >= x1 || y0 >= y1) continue;
    for (long yy = y0; yy < y1; ++yy) {
      std::fill_n(m.y.begin() + yy * width + x0, x1 - x0, std::uint8_t{0});
    }
    // Chroma sample (cx, cy) covers luma [2cx, 2cx+2) x [2cy, 2cy+2).
    const long cx0 = x0 / 2;
    const long cy0 = y0 / 2;
    const long cx1 = std::min<long>((x1 + 1) / 2, cw);
    const long cy1 = std::min<long>((y1 + 1) / 2, ch);
    for (long cy = cy0; cy < cy1; ++cy) {
      std::fill_n(m.u.begin() + cy * cw + cx0, cx1 - cx0, std::uint8_t{0});
      std::fill_n(m.v.begin() + cy * cw + cx0, cx1 - cx0, std::uint8_t{0});
    }
  }
  return m;
}

namespace {

void require_frames(const VideoClip& clip) {
  if (clip.frames.empty()) throw InvalidArgument("clip has no frames");
}

std::string format_pct(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

PolicyDecision decide_luminance(const VideoClip& clip, LuminanceCondition condition, const PolicyOptions& options) {
  require_frames(clip);
  const unsigned k = policy_luminance(condition);
  PolicyDecision d;
  d.policy = "luminance";
  d.parameters["condition"] = to_string(condition);
  d.parameters["k"] = std::to_string(k);
  d.parameters["truncate_chroma"] = options.truncate_chroma ? "true" : "false";
  d.frames.push_back(FrameTruncationMap::uniform(clip.width, clip.height, k, options.truncate_chroma));
  return d;
}

PolicyDecision decide_content(const VideoClip& clip, const PolicyOptions& options) {
  require_frames(clip);
  const double plain = clip_plain_pct(clip, options.variance_threshold, options.threads);
  const unsigned k = policy_content(plain, options.content_mapping);
  PolicyDecision d;
  d.policy = "content";
  d.parameters["plain_pct"] = format_pct(plain);
  d.parameters["variance_threshold"] = format_pct(options.variance_threshold);
  d.parameters["variance_class"] = to_string(classify_clip(plain));
  d.parameters["k"] = std::to_string(k);
  d.parameters["truncate_chroma"] = options.truncate_chroma ? "true" : "false";
  d.frames.push_back(FrameTruncationMap::uniform(clip.width, clip.height, k, options.truncate_chroma));
  return d;
}

PolicyDecision decide_roi(const VideoClip& clip, const RoiSpec& roi, const PolicyOptions& options) {
  require_frames(clip);
  PolicyDecision d;
  d.policy = "roi";
  d.parameters["k_outside"] = std::to_string(kRoiOutsideBits);
  d.parameters["rectangles"] = std::to_string(roi.rect_count());
  d.parameters["truncate_chroma"] = options.truncate_chroma ? "true" : "false";
  d.frames.resize(clip.frames.size());
  parallel_for(clip.frames.size(), options.threads, [&](std::size_t i) {
    d.frames[i] = policy_roi(roi.rects(i), clip.width, clip.height, kRoiOutsideBits, options.truncate_chroma);
  });
  return d;
}

VideoClip apply_policy(const VideoClip& clip, const PolicyDecision& decision, unsigned threads) {
  if (decision.frames.empty() || (decision.frames.size() != 1 && decision.frames.size() != clip.frames.size())) {
    throw InvalidArgument("policy decision covers " + std::to_string(decision.frames.size()) + " frames, clip has " +
                          std::to_string(clip.frames.size()));
  }
  for (const auto& m : decision.frames) {
    if (m.width != clip.width || m.height != clip.height) {
      throw InvalidArgument("policy decision dimensions differ from the clip");
    }
  }
  // Lookup table: truncated[k][v].
  std::array<std::array<std::uint8_t, 256>, 9> lut{};
  for (unsigned k = 0; k <= kByteBits; ++k) {
    for (unsigned v = 0; v < 256; ++v) lut[k][v] = apply_truncation_byte(static_cast<std::uint8_t>(v), k);
  }

  VideoClip out = clip;
  parallel_for(out.frames.size(), threads, [&](std::size_t i) {
    auto& frame = out.frames[i];
    const auto& map = decision.frame(i);
    for (const Plane p : {Plane::Y, Plane::U, Plane::V}) {
      auto data = frame.plane(p);
      const auto ks = map.plane(p);
      if (ks.size() != data.size()) throw InvalidArgument("truncation map plane size mismatch");
      for (std::size_t j = 0; j < data.size(); ++j) {
        if (ks[j] > kByteBits) throw InvalidArgument("truncation map entry exceeds 8");
        data[j] = lut[ks[j]][data[j]];
      }
    }
  });
  return out;
}

}  // namespace bittrunc::video
