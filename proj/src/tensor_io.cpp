#include "staf/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "staf/errors.hpp"

namespace staf {
namespace {

constexpr char kMagic[4] = {'S', 'T', 'A', 'F'};
constexpr std::uint8_t kDtypeFloat32 = 0;

void put_u16(std::string& buf, std::uint16_t v) {
  buf.push_back(static_cast<char>(v & 0xff));
  buf.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
}

std::uint16_t get_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

void write_tensor(const std::filesystem::path& path,
                  std::span<const std::uint32_t> dims,
                  std::span<const float> values) {
  if (dims.size() > 255) {
    throw std::invalid_argument("write_tensor: too many dims");
  }
  std::uint64_t count = 1;
  for (std::uint32_t d : dims) count *= d;
  if (count != values.size()) {
    throw std::invalid_argument("write_tensor: dims/payload mismatch");
  }

  std::string buf;
  buf.reserve(12 + dims.size() * 4 + values.size() * 4);
  buf.append(kMagic, 4);
  put_u16(buf, kTensorVersion);
  buf.push_back(static_cast<char>(kDtypeFloat32));
  buf.push_back(static_cast<char>(dims.size()));
  for (std::uint32_t d : dims) put_u32(buf, d);
  for (float v : values) put_u32(buf, std::bit_cast<std::uint32_t>(v));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw FormatError("write_tensor: cannot open " + path.string());
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) {
    throw FormatError("write_tensor: short write to " + path.string());
  }
}

TensorData read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError("read_tensor: cannot open " + path.string());
  }
  std::string buf((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(buf.data());
  if (buf.size() < 8 || std::memcmp(p, kMagic, 4) != 0) {
    throw FormatError("read_tensor: bad magic in " + path.string());
  }
  const std::uint16_t version = get_u16(p + 4);
  if (version != kTensorVersion) {
    throw FormatError("read_tensor: unsupported version " +
                      std::to_string(version));
  }
  const std::uint8_t dtype = p[6];
  if (dtype != kDtypeFloat32) {
    throw FormatError("read_tensor: unsupported dtype code " +
                      std::to_string(dtype));
  }
  const std::uint8_t ndim = p[7];
  const std::size_t header = 8 + static_cast<std::size_t>(ndim) * 4;
  if (buf.size() < header) {
    throw FormatError("read_tensor: truncated header in " + path.string());
  }

  TensorData t;
  t.dims.resize(ndim);
  std::uint64_t count = 1;
  for (int i = 0; i < ndim; ++i) {
    t.dims[i] = get_u32(p + 8 + 4 * i);
    count *= t.dims[i];
  }
  if (buf.size() != header + count * 4) {
    throw FormatError("read_tensor: truncated payload in " + path.string());
  }
  t.values.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    t.values[i] = std::bit_cast<float>(get_u32(p + header + 4 * i));
  }
  return t;
}

void write_frame_tensor(const std::filesystem::path& path, const Frame& f) {
  const std::uint32_t dims[3] = {static_cast<std::uint32_t>(f.height()),
                                 static_cast<std::uint32_t>(f.width()),
                                 static_cast<std::uint32_t>(f.channels())};
  write_tensor(path, dims, f.values());
}

Frame read_frame_tensor(const std::filesystem::path& path) {
  TensorData t = read_tensor(path);
  if (t.dims.size() != 3) {
    throw FormatError("read_frame_tensor: expected 3 dims, got " +
                      std::to_string(t.dims.size()));
  }
  try {
    return Frame(static_cast<int>(t.dims[0]), static_cast<int>(t.dims[1]),
                 static_cast<int>(t.dims[2]), std::move(t.values));
  } catch (const std::invalid_argument& e) {
    throw FormatError("read_frame_tensor: " + std::string(e.what()));
  }
}

void write_sample_tensor(const std::filesystem::path& path,
                         const std::vector<Frame>& frames) {
  if (frames.empty()) {
    throw std::invalid_argument("write_sample_tensor: no frames");
  }
  const Frame& first = frames.front();
  for (const Frame& f : frames) {
    if (!f.same_shape(first)) {
      throw std::invalid_argument("write_sample_tensor: frame dims differ");
    }
  }
  const std::uint32_t dims[4] = {static_cast<std::uint32_t>(frames.size()),
                                 static_cast<std::uint32_t>(first.height()),
                                 static_cast<std::uint32_t>(first.width()),
                                 static_cast<std::uint32_t>(first.channels())};
  std::vector<float> payload;
  payload.reserve(frames.size() * first.size());
  for (const Frame& f : frames) {
    payload.insert(payload.end(), f.values().begin(), f.values().end());
  }
  write_tensor(path, dims, payload);
}

std::vector<Frame> read_sample_tensor(const std::filesystem::path& path) {
  TensorData t = read_tensor(path);
  if (t.dims.size() != 4) {
    throw FormatError("read_sample_tensor: expected 4 dims, got " +
                      std::to_string(t.dims.size()));
  }
  const int n = static_cast<int>(t.dims[0]);
  const int h = static_cast<int>(t.dims[1]);
  const int w = static_cast<int>(t.dims[2]);
  const int c = static_cast<int>(t.dims[3]);
  const std::size_t per = static_cast<std::size_t>(h) * w * c;
  std::vector<Frame> frames;
  frames.reserve(n);
  for (int i = 0; i < n; ++i) {
    std::vector<float> data(t.values.begin() + i * per,
                            t.values.begin() + (i + 1) * per);
    try {
      frames.emplace_back(h, w, c, std::move(data));
    } catch (const std::invalid_argument& e) {
      throw FormatError("read_sample_tensor: " + std::string(e.what()));
    }
  }
  return frames;
}

}  // namespace staf
