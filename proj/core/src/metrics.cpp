#include <cmath>

#include "bittrunc/errors.hpp"
#include "bittrunc/videopipe.hpp"

namespace bittrunc::video {

namespace {

constexpr double kPeak = 255.0;
constexpr unsigned kSsimWindow = 8;

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) throw InvalidArgument("metric inputs differ in size: " + std::to_string(a) + " vs " + std::to_string(b));
  if (a == 0) throw InvalidArgument("metric inputs are empty");
}

void check_frames(const FramePlanar420& a, const FramePlanar420& b) {
  if (a.width != b.width || a.height != b.height) throw InvalidArgument("frames differ in dimensions");
  a.validate();
  b.validate();
}

// Summed-area table with one row/column of zero padding.
class Integral {
 public:
  template <typename Fn>
  Integral(unsigned width, unsigned height, Fn&& sample) : w_(width + 1), data_(std::size_t{width + 1} * (height + 1), 0) {
    for (unsigned y = 0; y < height; ++y) {
      std::uint64_t row = 0;
      for (unsigned x = 0; x < width; ++x) {
        row += sample(std::size_t{y} * width + x);
        data_[std::size_t{y + 1} * w_ + x + 1] = data_[std::size_t{y} * w_ + x + 1] + row;
      }
    }
  }

  std::uint64_t box(unsigned x, unsigned y, unsigned w, unsigned h) const {
    const auto at = [&](unsigned xx, unsigned yy) { return data_[std::size_t{yy} * w_ + xx]; };
    return at(x + w, y + h) + at(x, y) - at(x + w, y) - at(x, y + h);
  }

 private:
  std::size_t w_;
  std::vector<std::uint64_t> data_;
};

}  // namespace

PsnrResult psnr(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b, double cap) {
  check_sizes(a.size(), b.size());
  std::uint64_t sse = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const int d = int{a[i]} - int{b[i]};
    sse += static_cast<std::uint64_t>(d * d);
  }
  PsnrResult r;
  r.mse = static_cast<double>(sse) / static_cast<double>(a.size());
  r.identical = sse == 0;
  r.db = r.identical ? cap : std::min(cap, 10.0 * std::log10(kPeak * kPeak / r.mse));
  return r;
}

double ssim(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b, unsigned width, unsigned height) {
  check_sizes(a.size(), b.size());
  if (a.size() != std::size_t{width} * height) throw InvalidArgument("SSIM plane size does not match dimensions");

  const double c1 = (0.01 * kPeak) * (0.01 * kPeak);
  const double c2 = (0.03 * kPeak) * (0.03 * kPeak);
  const unsigned win_w = std::min(width, kSsimWindow);
  const unsigned win_h = std::min(height, kSsimWindow);
  const double n = static_cast<double>(win_w) * win_h;

  const Integral sa(width, height, [&](std::size_t i) { return std::uint64_t{a[i]}; });
  const Integral sb(width, height, [&](std::size_t i) { return std::uint64_t{b[i]}; });
  const Integral saa(width, height, [&](std::size_t i) { return std::uint64_t{a[i]} * a[i]; });
  const Integral sbb(width, height, [&](std::size_t i) { return std::uint64_t{b[i]} * b[i]; });
  const Integral sab(width, height, [&](std::size_t i) { return std::uint64_t{a[i]} * b[i]; });

  double total = 0.0;
  std::size_t windows = 0;
  for (unsigned y = 0; y + win_h <= height; ++y) {
    for (unsigned x = 0; x + win_w <= width; ++x) {
      const double mu_a = static_cast<double>(sa.box(x, y, win_w, win_h)) / n;
      const double mu_b = static_cast<double>(sb.box(x, y, win_w, win_h)) / n;
      const double var_a = static_cast<double>(saa.box(x, y, win_w, win_h)) / n - mu_a * mu_a;
      const double var_b = static_cast<double>(sbb.box(x, y, win_w, win_h)) / n - mu_b * mu_b;
      const double cov = static_cast<double>(sab.box(x, y, win_w, win_h)) / n - mu_a * mu_b;
      total += ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) / ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
      ++windows;
    }
  }
  return total / static_cast<double>(windows);
}

PsnrResult psnr(const FramePlanar420& a, const FramePlanar420& b, MetricPlanes planes, double cap) {
  check_frames(a, b);
  if (planes == MetricPlanes::Luma) return psnr(a.y, b.y, cap);

  PsnrResult out;
  out.db = 0.0;
  double weight = 0.0;
  for (const Plane p : {Plane::Y, Plane::U, Plane::V}) {
    const PsnrResult r = psnr(a.plane(p), b.plane(p), cap);
    const double w = static_cast<double>(a.plane(p).size());
    out.db += w * r.db;
    out.mse += w * r.mse;
    out.identical = out.identical && r.identical;
    weight += w;
  }
  out.db /= weight;
  out.mse /= weight;
  return out;
}

double ssim(const FramePlanar420& a, const FramePlanar420& b, MetricPlanes planes) {
  check_frames(a, b);
  if (planes == MetricPlanes::Luma) return ssim(a.y, b.y, a.width, a.height);
  double total = 0.0;
  double weight = 0.0;
  for (const Plane p : {Plane::Y, Plane::U, Plane::V}) {
    const double w = static_cast<double>(a.plane(p).size());
    total += w * ssim(a.plane(p), b.plane(p), a.plane_width(p), a.plane_height(p));
    weight += w;
  }
  return total / weight;
}

}  // namespace bittrunc::video
