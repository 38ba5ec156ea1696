#include "rh/image_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

namespace rh {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoFailure, "short write to " + path.string());
}

// Netpbm header tokenizer: whitespace separated, '#' starts a comment.
class HeaderReader {
 public:
  explicit HeaderReader(const std::string& bytes) : bytes_(bytes) {}

  std::string token() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
    if (start == pos_) throw Error(ErrorCode::MalformedHeader, "unexpected end of header");
    return bytes_.substr(start, pos_ - start);
  }

  long integer() {
    const std::string t = token();
    char* end = nullptr;
    const long v = std::strtol(t.c_str(), &end, 10);
    if (end != t.c_str() + t.size()) throw Error(ErrorCode::MalformedHeader, "bad integer '" + t + "'");
    return v;
  }

  double real() {
    const std::string t = token();
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) throw Error(ErrorCode::MalformedHeader, "bad number '" + t + "'");
    return v;
  }

  // Exactly one whitespace byte separates the header from the raster.
  std::size_t data_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      throw Error(ErrorCode::MalformedHeader, "missing separator before raster data");
    }
    return pos_ + 1;
  }

 private:
  void skip() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

struct PgmData {
  int width = 0;
  int height = 0;
  int maxval = 0;
  std::vector<std::uint16_t> samples;
};

PgmData read_pgm(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  HeaderReader header(bytes);
  const std::string magic = header.token();
  if (magic != "P5") throw Error(ErrorCode::MalformedHeader, "only binary P5 PGM is supported, got " + magic);
  PgmData pgm;
  const long w = header.integer();
  const long h = header.integer();
  const long maxval = header.integer();
  if (w <= 0 || h <= 0 || w > (1 << 20) || h > (1 << 20)) {
    throw Error(ErrorCode::MalformedHeader, "bad PGM dimensions");
  }
  if (maxval < 1 || maxval > 65535) throw Error(ErrorCode::MalformedHeader, "bad PGM maxval");
  pgm.width = static_cast<int>(w);
  pgm.height = static_cast<int>(h);
  pgm.maxval = static_cast<int>(maxval);
  const std::size_t offset = header.data_offset();
  const std::size_t count = static_cast<std::size_t>(w) * h;
  const std::size_t bps = maxval < 256 ? 1 : 2;
  if (bytes.size() < offset + count * bps) throw Error(ErrorCode::TruncatedData, path.string());
  pgm.samples.resize(count);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + offset);
  for (std::size_t i = 0; i < count; ++i) {
    pgm.samples[i] = bps == 1 ? p[i] : static_cast<std::uint16_t>((p[2 * i] << 8) | p[2 * i + 1]);
  }
  return pgm;
}

void write_pgm(const std::filesystem::path& path, int width, int height, int maxval,
               const std::vector<std::uint16_t>& samples) {
  if (maxval < 1 || maxval > 65535) throw Error(ErrorCode::InvalidArgument, "bad PGM maxval");
  std::ostringstream out;
  out << "P5\n" << width << ' ' << height << '\n' << maxval << '\n';
  std::string bytes = out.str();
  const std::size_t bps = maxval < 256 ? 1 : 2;
  bytes.reserve(bytes.size() + samples.size() * bps);
  for (const std::uint16_t s : samples) {
    if (bps == 2) bytes.push_back(static_cast<char>(s >> 8));
    bytes.push_back(static_cast<char>(s & 0xff));
  }
  write_file(path, bytes);
}

}  // namespace

IntensityImage load_pgm(const std::filesystem::path& path) {
  const PgmData pgm = read_pgm(path);
  IntensityImage image(pgm.width, pgm.height, 0.0, pgm.maxval);
  for (std::size_t i = 0; i < pgm.samples.size(); ++i) image.data()[i] = pgm.samples[i];
  return image;
}

void save_pgm(const std::filesystem::path& path, const IntensityImage& image) {
  std::vector<std::uint16_t> samples(image.size());
  const double maxval = image.maxval();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double v = std::clamp(std::round(image.data()[i]), 0.0, maxval);
    samples[i] = static_cast<std::uint16_t>(v);
  }
  write_pgm(path, image.width(), image.height(), image.maxval(), samples);
}

LabelMap load_label_pgm(const std::filesystem::path& path) {
  PgmData pgm = read_pgm(path);
  LabelMap labels(pgm.width, pgm.height);
  labels.data() = std::move(pgm.samples);
  return labels;
}

void save_label_pgm(const std::filesystem::path& path, const LabelMap& labels) {
  write_pgm(path, labels.width(), labels.height(), 65535, labels.data());
}

Mask load_mask_pgm(const std::filesystem::path& path) {
  const PgmData pgm = read_pgm(path);
  Mask mask(pgm.width, pgm.height);
  for (std::size_t i = 0; i < pgm.samples.size(); ++i) mask.data()[i] = pgm.samples[i] ? 1 : 0;
  return mask;
}

void save_mask_pgm(const std::filesystem::path& path, const Mask& mask) {
  std::vector<std::uint16_t> samples(mask.data().begin(), mask.data().end());
  for (auto& s : samples) s = s ? 255 : 0;
  write_pgm(path, mask.width(), mask.height(), 255, samples);
}

DisparityMap load_pfm(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  HeaderReader header(bytes);
  const std::string magic = header.token();
  if (magic == "PF") throw Error(ErrorCode::UnsupportedChannels, "three-channel PFM is not supported");
  if (magic != "Pf") throw Error(ErrorCode::MalformedHeader, "not a PFM file: " + magic);
  const long w = header.integer();
  const long h = header.integer();
  if (w <= 0 || h <= 0 || w > (1 << 20) || h > (1 << 20)) {
    throw Error(ErrorCode::MalformedHeader, "bad PFM dimensions");
  }
  const double scale = header.real();
  if (scale == 0.0 || !std::isfinite(scale)) throw Error(ErrorCode::MalformedHeader, "bad PFM scale");
  const bool little = scale < 0.0;
  const std::size_t offset = header.data_offset();
  const std::size_t count = static_cast<std::size_t>(w) * h;
  if (bytes.size() < offset + count * 4) throw Error(ErrorCode::TruncatedData, path.string());

  DisparityMap map(static_cast<int>(w), static_cast<int>(h));
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + offset);
  for (long row = 0; row < h; ++row) {
    const int y = static_cast<int>(h - 1 - row);
    for (long x = 0; x < w; ++x) {
      const unsigned char* q = p + 4 * (row * w + x);
      std::uint32_t u = little ? (std::uint32_t(q[0]) | std::uint32_t(q[1]) << 8 |
                                  std::uint32_t(q[2]) << 16 | std::uint32_t(q[3]) << 24)
                               : (std::uint32_t(q[3]) | std::uint32_t(q[2]) << 8 |
                                  std::uint32_t(q[1]) << 16 | std::uint32_t(q[0]) << 24);
      map(static_cast<int>(x), y) = std::bit_cast<float>(u);
    }
  }
  return map;
}

void save_pfm(const std::filesystem::path& path, const DisparityMap& map) {
  std::ostringstream out;
  out << "Pf\n" << map.width() << ' ' << map.height() << "\n-1.0\n";
  std::string bytes = out.str();
  bytes.reserve(bytes.size() + map.size() * 4);
  for (int y = map.height() - 1; y >= 0; --y) {
    for (int x = 0; x < map.width(); ++x) {
      const auto u = std::bit_cast<std::uint32_t>(map(x, y));
      for (int k = 0; k < 4; ++k) bytes.push_back(static_cast<char>((u >> (8 * k)) & 0xff));
    }
  }
  write_file(path, bytes);
}

}  // namespace rh
