#include "curvelane/pnm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "curvelane/error.hpp"

namespace curvelane {

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(const std::string& bytes) : bytes_(bytes) {}

  int next_int() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      throw Error(ErrorCode::IoError, "malformed PNM header");
    }
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + (bytes_[pos_++] - '0');
      if (value > 1'000'000'000) throw Error(ErrorCode::IoError, "PNM header value too large");
    }
    return static_cast<int>(value);
  }

  // Exactly one whitespace byte separates the header from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      throw Error(ErrorCode::IoError, "missing whitespace before PNM raster");
    }
    return pos_ + 1;
  }

  std::size_t pos_ = 2;

 private:
  void skip_space_and_comments() {
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
};

}  // namespace

Image decode_pnm(const std::string& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw Error(ErrorCode::IoError, "only binary PGM (P5) and PPM (P6) are supported");
  }
  const int channels = bytes[1] == '5' ? 1 : 3;
  HeaderReader header(bytes);
  const int width = header.next_int();
  const int height = header.next_int();
  const int maxval = header.next_int();
  if (width <= 0 || height <= 0) throw Error(ErrorCode::IoError, "PNM image has no pixels");
  if (maxval <= 0 || maxval > 255) throw Error(ErrorCode::IoError, "only 8-bit PNM samples are supported");
  const std::size_t offset = header.raster_offset();
  Image img(width, height, channels);
  if (bytes.size() - offset < img.data.size()) throw Error(ErrorCode::IoError, "truncated PNM raster");
  const float scale = 1.0f / static_cast<float>(maxval);
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    const auto v = static_cast<unsigned char>(bytes[offset + i]);
    img.data[i] = std::min(1.0f, static_cast<float>(v) * scale);
  }
  return img;
}

Image read_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return decode_pnm(buffer.str());
}

std::string encode_pnm(const Image& img) {
  if (img.channels != 1 && img.channels != 3) throw Error(ErrorCode::ChannelMismatch, "PNM needs 1 or 3 channels");
  std::string out = (img.channels == 1 ? "P5\n" : "P6\n") + std::to_string(img.width) + " " +
                    std::to_string(img.height) + "\n255\n";
  const std::size_t header = out.size();
  out.resize(header + img.data.size());
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    const float v = std::clamp(img.data[i], 0.0f, 1.0f);
    out[header + i] = static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0f)));
  }
  return out;
}

void write_pnm(const std::filesystem::path& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  const std::string bytes = encode_pnm(img);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

}  // namespace curvelane
