#include <algorithm>
#include <cmath>

#include "sled/imaging.hpp"

namespace sled {

GrayImage to_grayscale(const RgbImage& img) {
  GrayImage gray(img.width(), img.height());
  auto r = img.plane(Channel::kRed);
  auto g = img.plane(Channel::kGreen);
  auto b = img.plane(Channel::kBlue);
  auto out = gray.pixels();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
  }
  return gray;
}

GradientImage sobel_gradient_magnitude(const GrayImage& img) {
  const int w = img.width();
  const int h = img.height();
  GradientImage grad(w, h);
  auto at = [&](int x, int y) {
    return img(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1));
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double tl = at(x - 1, y - 1), tc = at(x, y - 1), tr = at(x + 1, y - 1);
      const double ml = at(x - 1, y), mr = at(x + 1, y);
      const double bl = at(x - 1, y + 1), bc = at(x, y + 1), br = at(x + 1, y + 1);
      const double gx = (tr + 2.0 * mr + br) - (tl + 2.0 * ml + bl);
      const double gy = (bl + 2.0 * bc + br) - (tl + 2.0 * tc + tr);
      grad(x, y) = std::sqrt(gx * gx + gy * gy);
    }
  }
  return grad;
}

}  // namespace sled
