#pragma once

#include <vector>

#include "sled/imaging.hpp"

namespace sled {

struct PixelPos {
  int x = 0;  // column
  int y = 0;  // row

  bool operator==(const PixelPos&) const = default;
};

// Local maxima and minima of a grayscale image, each list in row-major order.
struct ExtremaSet {
  std::vector<PixelPos> maxima;
  std::vector<PixelPos> minima;

  bool operator==(const ExtremaSet&) const = default;
};

// Slides a w x w window (w odd, >= 3) over every position where it fits
// entirely inside the image. The centre pixel is a maximum when it exceeds
// every other pixel in the window, a minimum when it is below all of them.
// With strict = false ties with the centre are allowed, so plateaus yield
// extrema. Throws ParameterError for an invalid window.
ExtremaSet detect_local_extrema(const GrayImage& gray, int w, bool strict = true);

}  // namespace sled
