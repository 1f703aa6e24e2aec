#pragma once

#include <Eigen/Core>

#include <vector>

#include "sled/descriptor.hpp"

namespace sled {

// Symmetric positive-definite matrix together with its Cholesky factor.
// Construction validates the matrix, so a distance between two SpdMatrix
// values cannot fail on domain grounds except for a dimension mismatch.
class SpdMatrix {
 public:
  // Throws MetricError when the matrix is not square, not symmetric (relative
  // tolerance 1e-12) or not positive definite.
  explicit SpdMatrix(const Eigen::MatrixXd& m);

  Eigen::Index dim() const { return matrix_.rows(); }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  // Lower-triangular L with L L^T = matrix().
  const Eigen::MatrixXd& cholesky_factor() const { return lower_; }

 private:
  Eigen::MatrixXd matrix_;
  Eigen::MatrixXd lower_;
};

// Generalized eigenvalues of the pencil (A, B), i.e. the eigenvalues of
// L^-1 B L^-T with A = L L^T, ascending. Eigenvalues below 1 are taken as
// reciprocals from the reversed pencil, which keeps them accurate to full
// relative precision when the spectrum spans many orders of magnitude.
Eigen::VectorXd generalized_eigenvalues(const SpdMatrix& a, const SpdMatrix& b);

// Affine-invariant geodesic distance sqrt(sum_i ln^2 lambda_i) over the
// generalized eigenvalues of (A, B). Eigenvalues are floored at 1e-300
// before the logarithm.
double riemannian_distance(const SpdMatrix& a, const SpdMatrix& b);
double riemannian_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Per-scale SPD factors of a descriptor, reused across many distance calls.
struct PreparedDescriptor {
  std::vector<double> scales;
  std::vector<SpdMatrix> matrices;
};

PreparedDescriptor prepare(const MultiscaleDescriptor& d);

// Riemannian distance per scale. Throws IncompatibleDescriptorError when the
// scale lists differ.
std::vector<double> per_scale_distances(const PreparedDescriptor& a, const PreparedDescriptor& b);
std::vector<double> per_scale_distances(const MultiscaleDescriptor& a, const MultiscaleDescriptor& b);

// Unweighted sum of the per-scale distances.
double multiscale_distance(const PreparedDescriptor& a, const PreparedDescriptor& b);
double multiscale_distance(const MultiscaleDescriptor& a, const MultiscaleDescriptor& b);

}  // namespace sled
