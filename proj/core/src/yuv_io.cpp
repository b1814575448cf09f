#include <fstream>
#include <iterator>

#include "bittrunc/errors.hpp"
#include "bittrunc/videopipe.hpp"

namespace bittrunc::video {

namespace {

void check_dimensions(unsigned width, unsigned height) {
  if (width == 0 || height == 0 || width % 2 || height % 2) {
    throw InvalidArgument("I420 dimensions must be positive and even, got " + std::to_string(width) + "x" +
                          std::to_string(height));
  }
}

}  // namespace

FramePlanar420 FramePlanar420::filled(unsigned width, unsigned height, std::uint8_t luma, std::uint8_t chroma) {
  check_dimensions(width, height);
  FramePlanar420 f;
  f.width = width;
  f.height = height;
  f.y.assign(std::size_t{width} * height, luma);
  f.u.assign(std::size_t{width / 2} * (height / 2), chroma);
  f.v.assign(std::size_t{width / 2} * (height / 2), chroma);
  return f;
}

std::span<std::uint8_t> FramePlanar420::plane(Plane p) {
  return p == Plane::Y ? std::span(y) : p == Plane::U ? std::span(u) : std::span(v);
}

std::span<const std::uint8_t> FramePlanar420::plane(Plane p) const {
  return p == Plane::Y ? std::span(y) : p == Plane::U ? std::span(u) : std::span(v);
}

void FramePlanar420::validate() const {
  const std::size_t luma = std::size_t{width} * height;
  const std::size_t chroma = std::size_t{chroma_width()} * chroma_height();
  if (width % 2 || height % 2 || y.size() != luma || u.size() != chroma || v.size() != chroma) {
    throw FormatError("frame planes do not match " + std::to_string(width) + "x" + std::to_string(height));
  }
}

std::size_t frame_bytes(unsigned width, unsigned height) {
  check_dimensions(width, height);
  return std::size_t{width} * height * 3 / 2;
}

VideoClip decode_i420(std::span<const std::uint8_t> data, unsigned width, unsigned height) {
  check_dimensions(width, height);
  const std::size_t per_frame = frame_bytes(width, height);
  if (data.size() % per_frame != 0) {
    throw FormatError("I420 payload of " + std::to_string(data.size()) + " bytes is not a multiple of the " +
                      std::to_string(per_frame) + "-byte frame size");
  }
  VideoClip clip;
  clip.width = width;
  clip.height = height;
  const std::size_t luma = std::size_t{width} * height;
  const std::size_t chroma = luma / 4;
  for (std::size_t off = 0; off < data.size(); off += per_frame) {
    FramePlanar420 f;
    f.width = width;
    f.height = height;
    const auto* p = data.data() + off;
    f.y.assign(p, p + luma);
    f.u.assign(p + luma, p + luma + chroma);
    f.v.assign(p + luma + chroma, p + per_frame);
    clip.frames.push_back(std::move(f));
  }
  return clip;
}

std::vector<std::uint8_t> encode_i420(const VideoClip& clip) {
  std::vector<std::uint8_t> out;
  out.reserve(frame_bytes(clip.width, clip.height) * clip.frames.size());
  for (const auto& f : clip.frames) {
    if (f.width != clip.width || f.height != clip.height) throw FormatError("frame size differs from clip size");
    f.validate();
    out.insert(out.end(), f.y.begin(), f.y.end());
    out.insert(out.end(), f.u.begin(), f.u.end());
    out.insert(out.end(), f.v.begin(), f.v.end());
  }
  return out;
}

VideoClip load_yuv(const std::filesystem::path& path, unsigned width, unsigned height) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open video " + path.string());
  const std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_i420(data, width, height);
}

void save_yuv(const VideoClip& clip, const std::filesystem::path& path) {
  const auto data = encode_i420(clip);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write video " + path.string());
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw FormatError("short write to " + path.string());
}

}  // namespace bittrunc::video
