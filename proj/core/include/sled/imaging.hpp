#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace sled {

// Row-major single-plane raster of real values. The tag parameter keeps
// grayscale and gradient images from being mixed up at call sites.
template <typename Tag>
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, double fill = 0.0)
      : width_(width), height_(height),
        pixels_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return pixels_.empty(); }

  double& operator()(int x, int y) { return pixels_[index(x, y)]; }
  double operator()(int x, int y) const { return pixels_[index(x, y)]; }

  std::span<double> pixels() { return pixels_; }
  std::span<const double> pixels() const { return pixels_; }

  bool operator==(const Raster&) const = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> pixels_;
};

struct GrayTag {};
struct GradientTag {};

// Luminance in [0, 255].
using GrayImage = Raster<GrayTag>;
// Sobel gradient magnitude, non-negative.
using GradientImage = Raster<GradientTag>;

enum class Channel : int { kRed = 0, kGreen = 1, kBlue = 2 };

// Three equally sized planes of intensities in [0, 255].
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(int width, int height, double fill = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return width_ == 0 || height_ == 0; }

  double& operator()(Channel c, int x, int y) { return planes_[idx(c)][offset(x, y)]; }
  double operator()(Channel c, int x, int y) const { return planes_[idx(c)][offset(x, y)]; }

  std::span<double> plane(Channel c) { return planes_[idx(c)]; }
  std::span<const double> plane(Channel c) const { return planes_[idx(c)]; }

  bool operator==(const RgbImage&) const = default;

 private:
  static std::size_t idx(Channel c) { return static_cast<std::size_t>(c); }
  std::size_t offset(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::array<std::vector<double>, 3> planes_;
};

inline constexpr std::array<Channel, 3> kChannels = {Channel::kRed, Channel::kGreen,
                                                     Channel::kBlue};

// Decodes binary PPM (P6), PGM (P5) or PNG. The format is detected from the
// file contents, not the extension. Grayscale inputs are replicated into all
// three channels. Throws DecodeError.
RgbImage load_image(const std::filesystem::path& path);

// Writes a binary P6 PPM, rounding and clamping each sample to [0, 255].
void save_ppm(const RgbImage& img, const std::filesystem::path& path);

// BT.601 luminance 0.299 R + 0.587 G + 0.114 B, not quantized.
GrayImage to_grayscale(const RgbImage& img);

// Magnitude of the 3x3 Sobel response, sqrt(Gx^2 + Gy^2), with the input
// replicate-padded by one pixel so the output keeps the input dimensions.
GradientImage sobel_gradient_magnitude(const GrayImage& img);

// Cubic-convolution resampling (a = -0.5) to ceil(scale * width) x
// ceil(scale * height). When downscaling the kernel is stretched by 1/scale
// to antialias. Out-of-range taps mirror at the border and weights are
// normalised per output sample, so constant images stay constant. Results are
// clamped to [0, 255]. Throws ParameterError for a non-positive scale or an
// empty output.
RgbImage resample_bicubic(const RgbImage& img, double scale);

}  // namespace sled
