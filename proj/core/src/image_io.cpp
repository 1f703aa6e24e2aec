#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "sled/error.hpp"
#include "sled/imaging.hpp"

namespace sled {
namespace {

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DecodeError(path.string(), "cannot open file");
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Cursor over a netpbm header: whitespace separated ASCII integers with
// '#' comments running to end of line.
class PnmHeaderReader {
 public:
  PnmHeaderReader(const std::vector<unsigned char>& bytes, const std::string& path)
      : bytes_(bytes), path_(path) {}

  void skip(std::size_t n) { pos_ += n; }

  long next_int() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      throw DecodeError(path_, "malformed PNM header");
    }
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000L) {
        throw DecodeError(path_, "PNM header value out of range");
      }
      ++pos_;
    }
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_start() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw DecodeError(path_, "malformed PNM header");
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<unsigned char>& bytes_;
  const std::string& path_;
  std::size_t pos_ = 0;
};

RgbImage decode_pnm(const std::vector<unsigned char>& bytes, const std::string& path) {
  const bool color = bytes[1] == '6';
  PnmHeaderReader header(bytes, path);
  header.skip(2);
  const long width = header.next_int();
  const long height = header.next_int();
  const long maxval = header.next_int();
  if (width <= 0 || height <= 0) {
    throw DecodeError(path, "zero-sized image");
  }
  if (maxval <= 0 || maxval > 65535) {
    throw DecodeError(path, "unsupported PNM maxval " + std::to_string(maxval));
  }
  const std::size_t start = header.raster_start();
  const std::size_t samples_per_pixel = color ? 3 : 1;
  const std::size_t bytes_per_sample = maxval > 255 ? 2 : 1;
  const std::size_t n_pixels = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() < start + n_pixels * samples_per_pixel * bytes_per_sample) {
    throw DecodeError(path, "truncated PNM raster");
  }

  const double to_unit = 255.0 / static_cast<double>(maxval);
  auto sample = [&](std::size_t i) {
    const std::size_t at = start + i * bytes_per_sample;
    unsigned value = bytes[at];
    if (bytes_per_sample == 2) value = (value << 8) | bytes[at + 1];
    value = std::min<unsigned>(value, static_cast<unsigned>(maxval));
    return maxval == 255 ? static_cast<double>(value) : value * to_unit;
  };

  RgbImage img(static_cast<int>(width), static_cast<int>(height));
  for (std::size_t p = 0; p < n_pixels; ++p) {
    for (std::size_t c = 0; c < 3; ++c) {
      const std::size_t s = color ? p * 3 + c : p;
      img.plane(kChannels[c])[p] = sample(s);
    }
  }
  return img;
}

RgbImage decode_png(const std::string& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw DecodeError(path, std::string("PNG decode failed: ") + image.message);
  }
  if (image.width == 0 || image.height == 0) {
    png_image_free(&image);
    throw DecodeError(path, "zero-sized image");
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  // Images with alpha are composited onto black.
  png_color background{0, 0, 0};
  if (!png_image_finish_read(&image, &background, buffer.data(), 0, nullptr)) {
    std::string reason = image.message;
    png_image_free(&image);
    throw DecodeError(path, "PNG decode failed: " + reason);
  }

  RgbImage img(static_cast<int>(image.width), static_cast<int>(image.height));
  const std::size_t n_pixels = static_cast<std::size_t>(image.width) * image.height;
  for (std::size_t p = 0; p < n_pixels; ++p) {
    for (std::size_t c = 0; c < 3; ++c) {
      img.plane(kChannels[c])[p] = buffer[p * 3 + c];
    }
  }
  return img;
}

constexpr std::array<unsigned char, 8> kPngSignature = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

}  // namespace

RgbImage::RgbImage(int width, int height, double fill) : width_(width), height_(height) {
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  for (auto& p : planes_) p.assign(n, fill);
}

RgbImage load_image(const std::filesystem::path& path) {
  const std::string name = path.string();
  const std::vector<unsigned char> bytes = read_file(path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '6' || bytes[1] == '5')) {
    return decode_pnm(bytes, name);
  }
  if (bytes.size() >= kPngSignature.size() &&
      std::equal(kPngSignature.begin(), kPngSignature.end(), bytes.begin())) {
    return decode_png(name);
  }
  if (bytes.empty()) {
    throw DecodeError(name, "empty file");
  }
  throw DecodeError(name, "unsupported image format");
}

void save_ppm(const RgbImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(path.string() + ": cannot open file for writing");
  }
  out << "P6\n" << img.width() << ' ' << img.height() << "\n255\n";
  std::vector<char> raster;
  raster.reserve(static_cast<std::size_t>(img.width()) * img.height() * 3);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (Channel c : kChannels) {
        const double v = std::clamp(std::round(img(c, x, y)), 0.0, 255.0);
        raster.push_back(static_cast<char>(static_cast<unsigned char>(v)));
      }
    }
  }
  out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
  if (!out) {
    throw Error(path.string() + ": write failed");
  }
}

}  // namespace sled
