#include "sled/metric.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sled/error.hpp"

namespace sled {
namespace {

constexpr double kEigenvalueFloor = 1e-300;

void check_scales(const std::vector<double>& a, const std::vector<double>& b) {
  if (a != b) {
    throw IncompatibleDescriptorError("descriptors were built with different scale lists");
  }
}

}  // namespace

SpdMatrix::SpdMatrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw MetricError("SPD matrix must be square and non-empty");
  }
  if (!m.allFinite()) {
    throw MetricError("SPD matrix has non-finite entries");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw MetricError("matrix is not symmetric");
  }
  matrix_ = 0.5 * (m + m.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(matrix_);
  if (llt.info() != Eigen::Success) {
    throw MetricError("matrix is not positive definite (Cholesky failed)");
  }
  lower_ = llt.matrixL();
}

namespace {

// Ascending eigenvalues of L^-1 B L^-T with A = L L^T.
Eigen::VectorXd whitened_spectrum(const SpdMatrix& a, const SpdMatrix& b) {
  const auto lower = a.cholesky_factor().triangularView<Eigen::Lower>();
  Eigen::MatrixXd w = lower.solve(b.matrix());
  w = lower.solve(w.transpose()).eval();
  w = 0.5 * (w + w.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(w, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw MetricError("symmetric eigensolver did not converge");
  }
  return solver.eigenvalues();
}

// ln of each generalized eigenvalue. The symmetric eigensolver only gets
// eigenvalues right to within eps times the largest one, so the pencil is
// whitened from both sides (the spectra are reciprocal) and every eigenvalue
// is read from the side where it is at least 1.
std::vector<double> log_generalized_eigenvalues(const SpdMatrix& a, const SpdMatrix& b) {
  if (a.dim() != b.dim()) {
    throw MetricError("dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                      std::to_string(b.dim()));
  }
  const Eigen::VectorXd forward = whitened_spectrum(a, b);
  const Eigen::VectorXd backward = whitened_spectrum(b, a);
  const Eigen::Index n = forward.size();
  std::vector<double> logs(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double f = forward[i];
    const double r = backward[n - 1 - i];
    logs[static_cast<std::size_t>(i)] =
        f >= r ? std::log(std::max(f, kEigenvalueFloor)) : -std::log(std::max(r, kEigenvalueFloor));
  }
  std::sort(logs.begin(), logs.end());
  return logs;
}

}  // namespace

Eigen::VectorXd generalized_eigenvalues(const SpdMatrix& a, const SpdMatrix& b) {
  const std::vector<double> logs = log_generalized_eigenvalues(a, b);
  Eigen::VectorXd out(static_cast<Eigen::Index>(logs.size()));
  for (std::size_t i = 0; i < logs.size(); ++i) out[static_cast<Eigen::Index>(i)] = std::exp(logs[i]);
  return out;
}

double riemannian_distance(const SpdMatrix& a, const SpdMatrix& b) {
  std::vector<double> squares;
  for (double l : log_generalized_eigenvalues(a, b)) squares.push_back(l * l);
  // Summing in sorted order makes d(A, B) and d(B, A) bit-identical.
  std::sort(squares.begin(), squares.end());
  return std::sqrt(std::accumulate(squares.begin(), squares.end(), 0.0));
}

double riemannian_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return riemannian_distance(SpdMatrix(a), SpdMatrix(b));
}

PreparedDescriptor prepare(const MultiscaleDescriptor& d) {
  PreparedDescriptor p;
  p.scales = d.scales;
  p.matrices.reserve(d.matrices.size());
  for (const auto& m : d.matrices) p.matrices.emplace_back(m.matrix);
  return p;
}

std::vector<double> per_scale_distances(const PreparedDescriptor& a, const PreparedDescriptor& b) {
  check_scales(a.scales, b.scales);
  std::vector<double> out;
  out.reserve(a.matrices.size());
  for (std::size_t i = 0; i < a.matrices.size(); ++i) {
    out.push_back(riemannian_distance(a.matrices[i], b.matrices[i]));
  }
  return out;
}

std::vector<double> per_scale_distances(const MultiscaleDescriptor& a, const MultiscaleDescriptor& b) {
  check_scales(a.scales, b.scales);
  return per_scale_distances(prepare(a), prepare(b));
}

double multiscale_distance(const PreparedDescriptor& a, const PreparedDescriptor& b) {
  const auto d = per_scale_distances(a, b);
  return std::accumulate(d.begin(), d.end(), 0.0);
}

double multiscale_distance(const MultiscaleDescriptor& a, const MultiscaleDescriptor& b) {
  const auto d = per_scale_distances(a, b);
  return std::accumulate(d.begin(), d.end(), 0.0);
}

}  // namespace sled
