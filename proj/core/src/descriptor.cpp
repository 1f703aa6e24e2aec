#include "sled/descriptor.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <sstream>
#include <string>

#include "sled/error.hpp"

namespace sled {
namespace {

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

template <typename F>
Moments moments(const std::vector<PixelPos>& points, F&& value) {
  Moments m;
  if (points.empty()) return m;
  const double n = static_cast<double>(points.size());
  for (const PixelPos& p : points) m.mean += value(p);
  m.mean /= n;
  for (const PixelPos& p : points) {
    const double d = value(p) - m.mean;
    m.variance += d * d;
  }
  m.variance /= n;
  return m;
}

void fill_half(SledVector& out, int offset, const std::vector<PixelPos>& points, const Block& block,
               const RgbImage& rgb, const GradientImage& grad) {
  if (points.empty()) return;  // stays zero
  for (int c = 0; c < 3; ++c) {
    const Channel ch = kChannels[static_cast<std::size_t>(c)];
    const Moments m = moments(points, [&](PixelPos p) { return rgb(ch, p.x, p.y); });
    out[offset + kMeanRed + c] = m.mean;
    out[offset + kVarRed + c] = m.variance;
  }
  const double cx = (block.x0 + block.x1 - 1) / 2.0;
  const double cy = (block.y0 + block.y1 - 1) / 2.0;
  const Moments spatial = moments(points, [&](PixelPos p) { return std::hypot(p.x - cx, p.y - cy); });
  out[offset + kMeanSpatial] = spatial.mean;
  out[offset + kVarSpatial] = spatial.variance;
  const Moments gradient = moments(points, [&](PixelPos p) { return grad(p.x, p.y); });
  out[offset + kMeanGradient] = gradient.mean;
  out[offset + kVarGradient] = gradient.variance;
}

std::vector<PixelPos> inside(const Block& block, const std::vector<PixelPos>& points) {
  std::vector<PixelPos> out;
  // Row-major order lets us skip straight to the first row of the block.
  auto first = std::lower_bound(points.begin(), points.end(), block.y0,
                                [](const PixelPos& p, int row) { return p.y < row; });
  for (auto it = first; it != points.end() && it->y < block.y1; ++it) {
    if (block.contains(*it)) out.push_back(*it);
  }
  return out;
}

bool row_major_sorted(const std::vector<PixelPos>& points) {
  return std::is_sorted(points.begin(), points.end(), [](const PixelPos& a, const PixelPos& b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  });
}

std::vector<PixelPos> inside_any_order(const Block& block, const std::vector<PixelPos>& points) {
  if (row_major_sorted(points)) return inside(block, points);
  std::vector<PixelPos> out;
  std::copy_if(points.begin(), points.end(), std::back_inserter(out),
               [&](const PixelPos& p) { return block.contains(p); });
  return out;
}

}  // namespace

void PipelineConfig::validate() const {
  if (window < 3 || window % 2 == 0) {
    throw ParameterError("window must be odd and >= 3, got " + std::to_string(window));
  }
  if (block_size < 2) {
    throw ParameterError("block size must be >= 2, got " + std::to_string(block_size));
  }
  if (!(overlap >= 0.0 && overlap < 1.0)) {
    throw ParameterError("overlap must lie in [0, 1), got " + std::to_string(overlap));
  }
  if (scales.empty()) {
    throw ParameterError("at least one scale is required");
  }
  for (double s : scales) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw ParameterError("scales must be positive, got " + std::to_string(s));
    }
  }
  if (!(epsilon_scale >= 0.0) || !std::isfinite(epsilon_scale)) {
    throw ParameterError("epsilon scale must be non-negative");
  }
}

BlockGrid partition_blocks(int width, int height, int block_size, double overlap) {
  if (block_size < 2) throw ParameterError("block size must be >= 2");
  if (!(overlap >= 0.0 && overlap < 1.0)) throw ParameterError("overlap must lie in [0, 1)");
  if (width < 1 || height < 1) throw ParameterError("image dimensions must be positive");

  BlockGrid grid;
  grid.block_size = block_size;
  grid.step = std::max(1, static_cast<int>(std::floor(block_size * (1.0 - overlap) + 1e-9)));
  for (int y0 = 0; y0 < height; y0 += grid.step) {
    for (int x0 = 0; x0 < width; x0 += grid.step) {
      grid.blocks.push_back(
          {x0, y0, std::min(x0 + block_size, width), std::min(y0 + block_size, height)});
    }
  }
  return grid;
}

SledVector extract_sled(const Block& block, const ExtremaSet& extrema, const RgbImage& rgb,
                        const GradientImage& grad) {
  SledVector f = SledVector::Zero();
  fill_half(f, 0, inside_any_order(block, extrema.maxima), block, rgb, grad);
  fill_half(f, kSledHalfDim, inside_any_order(block, extrema.minima), block, rgb, grad);
  return f;
}

CovarianceDescriptor embed_covariance(std::span<const SledVector> vectors, double epsilon_scale) {
  if (vectors.size() < 2) {
    throw DegenerateInputError("covariance embedding needs at least 2 vectors, got " +
                               std::to_string(vectors.size()));
  }
  const auto n = static_cast<Eigen::Index>(vectors.size());
  Eigen::MatrixXd samples(n, kSledDim);
  // Shifting by the first vector leaves the covariance unchanged and makes
  // identical inputs produce an exact zero matrix.
  const SledVector origin = vectors.front();
  for (Eigen::Index i = 0; i < n; ++i) {
    samples.row(i) = (vectors[static_cast<std::size_t>(i)] - origin).transpose();
  }

  const Eigen::RowVectorXd mean = samples.colwise().mean();
  samples.rowwise() -= mean;
  Eigen::MatrixXd cov = (samples.transpose() * samples) / static_cast<double>(n);
  cov = 0.5 * (cov + cov.transpose()).eval();

  const double trace = cov.trace();
  const double eps = trace > 0.0 ? epsilon_scale * trace / kSledDim : epsilon_scale;
  cov.diagonal().array() += eps;
  return {std::move(cov), eps, vectors.size()};
}

std::size_t MultiscaleDescriptor::parameter_count() const {
  std::size_t total = 0;
  for (const auto& m : matrices) total += symmetric_parameter_count(static_cast<std::size_t>(m.matrix.rows()));
  return total;
}

CovarianceDescriptor compute_scale_descriptor(const RgbImage& img, const PipelineConfig& cfg) {
  const GrayImage gray = to_grayscale(img);
  const GradientImage grad = sobel_gradient_magnitude(gray);
  const ExtremaSet extrema = detect_local_extrema(gray, cfg.window, cfg.strict_extrema);
  const BlockGrid grid = partition_blocks(img.width(), img.height(), cfg.block_size, cfg.overlap);

  std::vector<SledVector> vectors;
  vectors.reserve(grid.blocks.size());
  for (const Block& b : grid.blocks) vectors.push_back(extract_sled(b, extrema, img, grad));
  return embed_covariance(vectors, cfg.epsilon_scale);
}

MultiscaleDescriptor compute_descriptor(const RgbImage& img, const PipelineConfig& cfg) {
  cfg.validate();
  if (img.empty()) throw DegenerateInputError("empty image");

  MultiscaleDescriptor out;
  out.scales = cfg.scales;
  out.matrices.reserve(cfg.scales.size());
  for (double s : cfg.scales) {
    try {
      if (s == 1.0) {
        out.matrices.push_back(compute_scale_descriptor(img, cfg));
      } else {
        out.matrices.push_back(compute_scale_descriptor(resample_bicubic(img, s), cfg));
      }
    } catch (const DegenerateInputError& e) {
      std::ostringstream msg;
      msg << "scale " << s << ": " << e.what();
      throw DegenerateInputError(msg.str());
    }
  }
  return out;
}

}  // namespace sled
