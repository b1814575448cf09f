#include <algorithm>

#include "bittrunc/errors.hpp"
#include "bittrunc/parallel.hpp"
#include "bittrunc/videopipe.hpp"

namespace bittrunc::video {

MacroblockGrid analyze_macroblocks(const FramePlanar420& frame, double variance_threshold) {
  if (!(variance_threshold >= 0.0)) throw InvalidArgument("plain-MB variance threshold must be >= 0");
  frame.validate();

  MacroblockGrid grid;
  grid.threshold = variance_threshold;
  grid.blocks_x = (frame.width + kMacroblockSize - 1) / kMacroblockSize;
  grid.blocks_y = (frame.height + kMacroblockSize - 1) / kMacroblockSize;
  const std::size_t blocks = std::size_t{grid.blocks_x} * grid.blocks_y;
  grid.variance.resize(blocks);
  grid.plain.resize(blocks);

  std::size_t plain_count = 0;
  for (unsigned by = 0; by < grid.blocks_y; ++by) {
    for (unsigned bx = 0; bx < grid.blocks_x; ++bx) {
      const unsigned x0 = bx * kMacroblockSize;
      const unsigned y0 = by * kMacroblockSize;
      const unsigned x1 = std::min(frame.width, x0 + kMacroblockSize);
      const unsigned y1 = std::min(frame.height, y0 + kMacroblockSize);
      std::uint64_t sum = 0;
      std::uint64_t sum_sq = 0;
      for (unsigned yy = y0; yy < y1; ++yy) {
        const std::uint8_t* row = frame.y.data() + std::size_t{yy} * frame.width;
        for (unsigned xx = x0; xx < x1; ++xx) {
          sum += row[xx];
          sum_sq += std::uint64_t{row[xx]} * row[xx];
        }
      }
      const double n = static_cast<double>(x1 - x0) * (y1 - y0);
      // n^2 * var = n * sum_sq - sum^2, exact in integers.
      const double scaled = static_cast<double>(static_cast<std::uint64_t>(n) * sum_sq - sum * sum);
      const double var = scaled / (n * n);
      const std::size_t idx = std::size_t{by} * grid.blocks_x + bx;
      grid.variance[idx] = var;
      grid.plain[idx] = var < variance_threshold;
      plain_count += grid.plain[idx];
    }
  }
  grid.plain_pct = 100.0 * static_cast<double>(plain_count) / static_cast<double>(blocks);
  return grid;
}

double clip_plain_pct(const VideoClip& clip, double variance_threshold, unsigned threads) {
  if (clip.frames.empty()) throw InvalidArgument("clip has no frames");
  std::vector<double> per_frame(clip.frames.size());
  parallel_for(clip.frames.size(), threads,
               [&](std::size_t i) { per_frame[i] = analyze_macroblocks(clip.frames[i], variance_threshold).plain_pct; });
  double total = 0.0;
  for (double p : per_frame) total += p;
  return total / static_cast<double>(per_frame.size());
}

const char* to_string(VarianceClass c) {
  switch (c) {
    case VarianceClass::Low:
      return "low";
    case VarianceClass::Medium:
      return "medium";
    case VarianceClass::High:
      return "high";
  }
  return "?";
}

VarianceClass classify_clip(double plain_pct, const VarianceBreakpoints& breakpoints) {
  if (plain_pct >= breakpoints.low_min_plain_pct) return VarianceClass::Low;
  if (plain_pct >= breakpoints.medium_min_plain_pct) return VarianceClass::Medium;
  return VarianceClass::High;
}

}  // namespace bittrunc::video
