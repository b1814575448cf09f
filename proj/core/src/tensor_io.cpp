#include <algorithm>
#include <array>
#include <fstream>
#include <iterator>

#include "bittrunc/errors.hpp"
#include "bittrunc/tensortrunc.hpp"

namespace bittrunc::tensor {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic{0x54, 0x52, 0x4E, 0x54};  // "TRNT"
constexpr std::uint8_t kVersion = 0x01;
constexpr std::uint8_t kDtypeFloat32 = 0x01;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[3]} << 24);
}

void append_payload(std::vector<std::uint8_t>& out, std::span<const float> data) {
  out.reserve(out.size() + data.size() * 4);
  for (float f : data) put_u32(out, std::bit_cast<std::uint32_t>(f));
}

std::vector<float> read_payload(std::span<const std::uint8_t> bytes) {
  std::vector<float> data(bytes.size() / 4);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = std::bit_cast<float>(get_u32(bytes.data() + 4 * i));
  return data;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open tensor file " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write tensor file " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("short write to " + path.string());
}

}  // namespace

std::vector<std::uint8_t> encode_trnt(const TensorBuffer& tensor) {
  if (tensor.rank() == 0 || tensor.rank() > 255) throw InvalidArgument("TRNT rank must be 1..255");
  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  out.push_back(kVersion);
  out.push_back(kDtypeFloat32);
  out.push_back(static_cast<std::uint8_t>(tensor.rank()));
  for (std::uint32_t d : tensor.shape()) put_u32(out, d);
  append_payload(out, tensor.data());
  return out;
}

TensorBuffer decode_trnt(std::span<const std::uint8_t> bytes) {
  constexpr std::size_t kFixedHeader = 7;
  if (bytes.size() < kFixedHeader) throw FormatError("TRNT header truncated");
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) throw FormatError("bad TRNT magic");
  if (bytes[4] != kVersion) throw FormatError("unsupported TRNT version " + std::to_string(bytes[4]));
  if (bytes[5] != kDtypeFloat32) throw FormatError("unsupported TRNT dtype " + std::to_string(bytes[5]));
  const std::size_t rank = bytes[6];
  if (rank == 0) throw FormatError("TRNT rank 0");
  const std::size_t header = kFixedHeader + 4 * rank;
  if (bytes.size() < header) throw FormatError("TRNT dimension table truncated");

  std::vector<std::uint32_t> shape(rank);
  for (std::size_t i = 0; i < rank; ++i) shape[i] = get_u32(bytes.data() + kFixedHeader + 4 * i);
  std::size_t count = 0;
  try {
    count = element_count(shape);
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("TRNT shape: ") + e.what());
  }
  const std::size_t payload = bytes.size() - header;
  if (payload != count * 4) {
    throw FormatError("TRNT header declares " + std::to_string(count) + " elements, payload holds " +
                      std::to_string(payload) + " bytes");
  }
  return TensorBuffer(std::move(shape), read_payload(bytes.subspan(header)));
}

std::vector<std::uint8_t> encode_raw(const TensorBuffer& tensor) {
  std::vector<std::uint8_t> out;
  append_payload(out, tensor.data());
  return out;
}

TensorBuffer decode_raw(std::span<const std::uint8_t> bytes, std::vector<std::uint32_t> shape) {
  if (bytes.size() % 4 != 0) throw FormatError("raw float32 payload length is not a multiple of 4");
  if (shape.empty()) {
    if (bytes.empty()) throw FormatError("raw float32 payload is empty");
    shape = {static_cast<std::uint32_t>(bytes.size() / 4)};
  }
  const std::size_t count = element_count(shape);
  if (count * 4 != bytes.size()) {
    throw FormatError("shape holds " + std::to_string(count) + " elements, raw payload holds " +
                      std::to_string(bytes.size() / 4));
  }
  return TensorBuffer(std::move(shape), read_payload(bytes));
}

TensorBuffer load_tensor(const std::filesystem::path& path) { return decode_trnt(read_file(path)); }

TensorBuffer load_raw_tensor(const std::filesystem::path& path, std::vector<std::uint32_t> shape) {
  return decode_raw(read_file(path), std::move(shape));
}

void save_tensor(const TensorBuffer& tensor, const std::filesystem::path& path) {
  write_file(path, encode_trnt(tensor));
}

void save_raw_tensor(const TensorBuffer& tensor, const std::filesystem::path& path) {
  write_file(path, encode_raw(tensor));
}

}  // namespace bittrunc::tensor
