#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

#include "sled/extrema.hpp"
#include "sled/imaging.hpp"

namespace sled {

inline constexpr int kSledDim = 20;
inline constexpr int kSledHalfDim = 10;

// Layout of one half (maxima or minima) of a SLED vector. The minima half
// starts at kSledHalfDim.
enum SledComponent : int {
  kMeanRed = 0,
  kMeanGreen = 1,
  kMeanBlue = 2,
  kVarRed = 3,
  kVarGreen = 4,
  kVarBlue = 5,
  kMeanSpatial = 6,
  kVarSpatial = 7,
  kMeanGradient = 8,
  kVarGradient = 9,
};

using SledVector = Eigen::Matrix<double, kSledDim, 1>;

// Number of independent entries of a symmetric dim x dim matrix.
constexpr std::size_t symmetric_parameter_count(std::size_t dim) { return dim * (dim + 1) / 2; }

struct PipelineConfig {
  int window = 3;        // extrema search window w
  int block_size = 32;   // block side W
  double overlap = 0.5;  // fraction shared by consecutive blocks
  std::vector<double> scales = {2.0 / 3.0, 1.0, 3.0 / 2.0};
  double epsilon_scale = 1e-6;
  bool strict_extrema = true;

  // Throws ParameterError on the first violated constraint.
  void validate() const;

  bool operator==(const PipelineConfig&) const = default;
};

// Half-open pixel rectangle [x0, x1) x [y0, y1).
struct Block {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  bool contains(PixelPos p) const { return p.x >= x0 && p.x < x1 && p.y >= y0 && p.y < y1; }

  bool operator==(const Block&) const = default;
};

struct BlockGrid {
  int block_size = 0;
  int step = 0;
  std::vector<Block> blocks;  // row-major
};

// Block origins sit at every multiple of the step below each image
// dimension; blocks running past the border are clipped. The step is
// floor(W * (1 - overlap)), at least 1.
BlockGrid partition_blocks(int width, int height, int block_size, double overlap);

// SLED vector of one block: for the maxima and then the minima falling inside
// the block, per-channel colour mean and variance, mean and variance of the
// Euclidean distance to the block centre, and mean and variance of the
// gradient magnitude. Variances are population (1/n). A half with no extrema
// is all zeros.
SledVector extract_sled(const Block& block, const ExtremaSet& extrema, const RgbImage& rgb,
                        const GradientImage& grad);

struct CovarianceDescriptor {
  Eigen::MatrixXd matrix;       // symmetric, regularised
  double regularization = 0.0;  // epsilon added to the diagonal
  std::size_t sample_count = 0; // vectors embedded

  // Only the matrix participates; the bookkeeping fields are not persisted.
  bool operator==(const CovarianceDescriptor& other) const { return matrix == other.matrix; }
};

// Biased (1/N) covariance of the vectors, plus epsilon * I with
// epsilon = epsilon_scale * trace / dim (or epsilon_scale when the trace is
// zero). Throws DegenerateInputError for fewer than two vectors.
CovarianceDescriptor embed_covariance(std::span<const SledVector> vectors, double epsilon_scale);

struct MultiscaleDescriptor {
  std::vector<double> scales;
  std::vector<CovarianceDescriptor> matrices;

  std::size_t parameter_count() const;

  bool operator==(const MultiscaleDescriptor&) const = default;
};

// Single-scale branch: extrema, gradient and blocks are all computed on the
// supplied (already resampled) image.
CovarianceDescriptor compute_scale_descriptor(const RgbImage& img, const PipelineConfig& cfg);

// Runs the single-scale branch once per configured scale, resampling the
// input first (scale 1 uses the input as is). Throws DegenerateInputError
// naming the scale when an image yields fewer than two blocks.
MultiscaleDescriptor compute_descriptor(const RgbImage& img, const PipelineConfig& cfg);

}  // namespace sled
