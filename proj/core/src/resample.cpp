#include <algorithm>
#include <cmath>
#include <vector>

#include "sled/error.hpp"
#include "sled/imaging.hpp"

namespace sled {
namespace {

// Keys cubic convolution kernel with a = -0.5.
double cubic(double x) {
  const double ax = std::abs(x);
  const double ax2 = ax * ax;
  const double ax3 = ax2 * ax;
  if (ax <= 1.0) return 1.5 * ax3 - 2.5 * ax2 + 1.0;
  if (ax <= 2.0) return -0.5 * ax3 + 2.5 * ax2 - 4.0 * ax + 2.0;
  return 0.0;
}

struct Taps {
  std::vector<int> index;
  std::vector<double> weight;
};

// Mirror an out-of-range sample index back into [0, n), repeating the edge
// sample (…, 1, 0 | 0, 1, …, n-1 | n-1, n-2, …).
int mirror(int i, int n) {
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

std::vector<Taps> contributions(int in_len, int out_len, double scale) {
  const bool shrink = scale < 1.0;
  const double kernel_width = shrink ? 4.0 / scale : 4.0;
  const int n_taps = static_cast<int>(std::ceil(kernel_width)) + 2;

  std::vector<Taps> taps(static_cast<std::size_t>(out_len));
  for (int x = 0; x < out_len; ++x) {
    const double u = (x + 0.5) / scale - 0.5;
    const int left = static_cast<int>(std::floor(u - kernel_width / 2.0));
    Taps& t = taps[static_cast<std::size_t>(x)];
    double total = 0.0;
    for (int k = 0; k < n_taps; ++k) {
      const int src = left + k;
      const double d = u - src;
      const double w = shrink ? scale * cubic(scale * d) : cubic(d);
      if (w == 0.0) continue;
      t.index.push_back(mirror(src, in_len));
      t.weight.push_back(w);
      total += w;
    }
    for (double& w : t.weight) w /= total;
  }
  return taps;
}

int output_length(int in_len, double scale) {
  // The epsilon keeps products that are integral in exact arithmetic
  // (e.g. 3 * 2/3) from rounding up.
  return static_cast<int>(std::ceil(scale * in_len - 1e-9));
}

}  // namespace

RgbImage resample_bicubic(const RgbImage& img, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ParameterError("resample scale must be positive and finite");
  }
  const int in_w = img.width();
  const int in_h = img.height();
  const int out_w = output_length(in_w, scale);
  const int out_h = output_length(in_h, scale);
  if (out_w < 1 || out_h < 1) {
    throw ParameterError("resample scale " + std::to_string(scale) + " produces an empty image");
  }

  const auto col_taps = contributions(in_w, out_w, scale);
  const auto row_taps = contributions(in_h, out_h, scale);

  RgbImage out(out_w, out_h);
  std::vector<double> horizontal(static_cast<std::size_t>(out_w) * static_cast<std::size_t>(in_h));
  for (Channel c : kChannels) {
    auto src = img.plane(c);
    for (int y = 0; y < in_h; ++y) {
      const double* row = src.data() + static_cast<std::size_t>(y) * in_w;
      for (int x = 0; x < out_w; ++x) {
        const Taps& t = col_taps[static_cast<std::size_t>(x)];
        double acc = 0.0;
        for (std::size_t k = 0; k < t.index.size(); ++k) acc += t.weight[k] * row[t.index[k]];
        horizontal[static_cast<std::size_t>(y) * out_w + x] = acc;
      }
    }
    auto dst = out.plane(c);
    for (int y = 0; y < out_h; ++y) {
      const Taps& t = row_taps[static_cast<std::size_t>(y)];
      for (int x = 0; x < out_w; ++x) {
        double acc = 0.0;
        for (std::size_t k = 0; k < t.index.size(); ++k) {
          acc += t.weight[k] * horizontal[static_cast<std::size_t>(t.index[k]) * out_w + x];
        }
        dst[static_cast<std::size_t>(y) * out_w + x] = std::clamp(acc, 0.0, 255.0);
      }
    }
  }
  return out;
}

}  // namespace sled
