#include "sled/extrema.hpp"

#include <string>

#include "sled/error.hpp"

namespace sled {

ExtremaSet detect_local_extrema(const GrayImage& gray, int w, bool strict) {
  if (w < 3 || w % 2 == 0) {
    throw ParameterError("extrema window must be odd and >= 3, got " + std::to_string(w));
  }
  const int r = w / 2;
  ExtremaSet out;
  for (int y = r; y + r < gray.height(); ++y) {
    for (int x = r; x + r < gray.width(); ++x) {
      const double c = gray(x, y);
      bool is_max = true;
      bool is_min = true;
      for (int dy = -r; dy <= r && (is_max || is_min); ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const double v = gray(x + dx, y + dy);
          if (strict) {
            is_max = is_max && c > v;
            is_min = is_min && c < v;
          } else {
            is_max = is_max && c >= v;
            is_min = is_min && c <= v;
          }
        }
      }
      if (is_max) out.maxima.push_back({x, y});
      if (is_min) out.minima.push_back({x, y});
    }
  }
  return out;
}

}  // namespace sled
