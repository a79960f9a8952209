#pragma once

// Statistical and linear-algebra kernels shared by every filter. All functions
// are templated on the Eigen scalar type and accept Eigen expressions.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "gmf/errors.hpp"
#include "gmf/rng.hpp"
#include "gmf/types.hpp"

namespace gmf {

inline constexpr double kDefaultBandwidthExponent = -0.2;

/// Relative tolerance on the minimum eigenvalue used by the Loewner tests.
inline constexpr double kLoewnerTolerance = 1e-10;

/// Maximum diagonal jitter (relative to the trace) added before giving up on a
/// Cholesky factorization.
inline constexpr double kCholeskyJitter = 1e-9;

/// Absolute covariance floor substituted for degenerate (all-zero) covariances.
inline constexpr double kCovarianceFloor = 1e-9;

/// Kernel-density bandwidth h = N^exponent.
template <typename Scalar = double>
Scalar bandwidth(std::size_t num_samples, Scalar exponent = Scalar(kDefaultBandwidthExponent)) {
  if (num_samples == 0) {
    throw DomainError("bandwidth: num_samples must be >= 1");
  }
  return std::pow(static_cast<Scalar>(num_samples), exponent);
}

/// Unbiased sample covariance of the columns of `samples` (one sample per column).
template <typename Derived>
MatrixX<typename Derived::Scalar> sample_covariance(const Eigen::MatrixBase<Derived>& samples) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index count = samples.cols();
  if (count < 2) {
    throw DegenerateInputError("sample_covariance: need at least 2 samples, got " + std::to_string(count));
  }
  const VectorX<Scalar> mean = samples.rowwise().mean();
  const MatrixX<Scalar> centered = samples.colwise() - mean;
  MatrixX<Scalar> cov = (centered * centered.transpose()) / static_cast<Scalar>(count - 1);
  return (cov + cov.transpose()) / Scalar(2);
}

/// Stacks a list of equally sized vectors into a matrix, one per column.
template <typename Scalar>
MatrixX<Scalar> stack_columns(std::span<const VectorX<Scalar>> samples) {
  if (samples.empty()) {
    return MatrixX<Scalar>();
  }
  const Eigen::Index dim = samples.front().size();
  MatrixX<Scalar> out(dim, static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].size() != dim) {
      throw ShapeError("sample " + std::to_string(i) + " has dimension " + std::to_string(samples[i].size()) +
                       ", expected " + std::to_string(dim));
    }
    out.col(static_cast<Eigen::Index>(i)) = samples[i];
  }
  return out;
}

template <typename Scalar>
MatrixX<Scalar> sample_covariance(std::span<const VectorX<Scalar>> samples) {
  if (samples.size() < 2) {
    throw DegenerateInputError("sample_covariance: need at least 2 samples, got " + std::to_string(samples.size()));
  }
  return sample_covariance(stack_columns(samples));
}

template <typename Scalar>
MatrixX<Scalar> sample_covariance(const std::vector<VectorX<Scalar>>& samples) {
  return sample_covariance(std::span<const VectorX<Scalar>>(samples));
}

/// Sample covariance shrunk by the squared bandwidth of `num_samples`:
/// h^2 * cov(samples).
template <typename Derived>
MatrixX<typename Derived::Scalar> scaled_sample_covariance(
    const Eigen::MatrixBase<Derived>& samples, std::size_t num_samples,
    typename Derived::Scalar exponent = typename Derived::Scalar(kDefaultBandwidthExponent)) {
  using Scalar = typename Derived::Scalar;
  const Scalar h = bandwidth<Scalar>(num_samples, exponent);
  return (h * h) * sample_covariance(samples);
}

template <typename Scalar>
MatrixX<Scalar> scaled_sample_covariance(const std::vector<VectorX<Scalar>>& samples, std::size_t num_samples,
                                         Scalar exponent = Scalar(kDefaultBandwidthExponent)) {
  const Scalar h = bandwidth<Scalar>(num_samples, exponent);
  return (h * h) * sample_covariance(samples);
}

template <typename Derived>
typename Derived::Scalar min_eigenvalue(const Eigen::MatrixBase<Derived>& symmetric) {
  using Scalar = typename Derived::Scalar;
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(symmetric.eval(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

/// True iff `candidate` is not dominated by `bound` in the Loewner order, i.e.
/// bound - candidate has an eigenvalue below -1e-10 * |trace(bound)|.
template <typename DerivedA, typename DerivedB>
bool psd_exceeds(const Eigen::MatrixBase<DerivedA>& candidate, const Eigen::MatrixBase<DerivedB>& bound) {
  using Scalar = typename DerivedB::Scalar;
  if (candidate.rows() != bound.rows() || candidate.cols() != bound.cols() || bound.rows() != bound.cols()) {
    throw ShapeError("psd_exceeds: dimension mismatch");
  }
  const Scalar tol = Scalar(kLoewnerTolerance) * std::abs(bound.trace());
  MatrixX<Scalar> gap = bound - candidate;
  // A successful Cholesky of gap + tol*I certifies min eig > -tol and a failed
  // one of gap + 2*tol*I certifies min eig < -tol; rounding in the
  // factorization is far below tol. The eigen solve only settles the band
  // in between.
  if (tol > Scalar(0)) {
    MatrixX<Scalar> shifted = gap;
    shifted.diagonal().array() += tol;
    if (Eigen::LLT<MatrixX<Scalar>>(shifted).info() == Eigen::Success) {
      return false;
    }
    shifted.diagonal().array() += tol;
    if (Eigen::LLT<MatrixX<Scalar>>(shifted).info() != Eigen::Success) {
      return true;
    }
  }
  return min_eigenvalue(gap) < -tol;
}

/// Lower-triangular factor L with L L^T = cov. Falls back to adding at most
/// 1e-9 * trace on the diagonal for semidefinite input; an all-zero matrix
/// yields a zero factor.
template <typename Derived>
MatrixX<typename Derived::Scalar> cholesky_factor(const Eigen::MatrixBase<Derived>& cov) {
  using Scalar = typename Derived::Scalar;
  if (cov.rows() != cov.cols()) {
    throw ShapeError("cholesky_factor: matrix is not square");
  }
  if (!cov.allFinite()) {
    throw NumericalError("cholesky_factor: non-finite covariance");
  }
  if (cov.isZero(Scalar(0))) {
    return MatrixX<Scalar>::Zero(cov.rows(), cov.cols());
  }
  Eigen::LLT<MatrixX<Scalar>> llt(cov.eval());
  if (llt.info() == Eigen::Success) {
    return llt.matrixL();
  }
  MatrixX<Scalar> jittered = cov;
  jittered.diagonal().array() += Scalar(kCholeskyJitter) * std::abs(cov.trace());
  llt.compute(jittered);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("cholesky_factor: matrix is indefinite beyond jitter tolerance");
  }
  return llt.matrixL();
}

/// mean + L u with u ~ N(0, I) drawn from `rng`, for a precomputed factor L.
template <typename DerivedM, typename DerivedL>
VectorX<typename DerivedM::Scalar> mvn_sample_factored(const Eigen::MatrixBase<DerivedM>& mean,
                                                       const Eigen::MatrixBase<DerivedL>& factor, RngStream& rng) {
  using Scalar = typename DerivedM::Scalar;
  VectorX<Scalar> u(mean.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    u[i] = static_cast<Scalar>(rng.normal());
  }
  return mean + factor.template triangularView<Eigen::Lower>() * u;
}

template <typename DerivedM, typename DerivedC>
VectorX<typename DerivedM::Scalar> mvn_sample(const Eigen::MatrixBase<DerivedM>& mean,
                                              const Eigen::MatrixBase<DerivedC>& cov, RngStream& rng) {
  if (cov.rows() != mean.size()) {
    throw ShapeError("mvn_sample: covariance does not match mean dimension");
  }
  return mvn_sample_factored(mean, cholesky_factor(cov), rng);
}

/// Replaces an all-zero (or numerically vanishing) covariance by the absolute floor.
template <typename Scalar>
MatrixX<Scalar> covariance_floor(Eigen::Index dim) {
  return MatrixX<Scalar>::Identity(dim, dim) * Scalar(kCovarianceFloor);
}

/// 1 / sum(w^2) for normalized, non-negative weights.
template <typename Derived>
typename Derived::Scalar effective_sample_size(const Eigen::MatrixBase<Derived>& weights) {
  using Scalar = typename Derived::Scalar;
  if (weights.size() == 0) {
    throw ContractError("effective_sample_size: empty weight vector");
  }
  if ((weights.array() < Scalar(0)).any()) {
    throw ContractError("effective_sample_size: negative weight");
  }
  if (std::abs(weights.sum() - Scalar(1)) > Scalar(1e-9)) {
    throw ContractError("effective_sample_size: weights are not normalized");
  }
  return Scalar(1) / weights.squaredNorm();
}

/// Converts log-weights to normalized weights with max-shift. Returns false
/// (and leaves uniform weights) when every log-weight is -inf or NaN.
template <typename Scalar>
bool normalize_log_weights(std::span<const Scalar> log_weights, VectorX<Scalar>& weights) {
  const auto n = static_cast<Eigen::Index>(log_weights.size());
  weights.resize(n);
  Scalar max_log = -std::numeric_limits<Scalar>::infinity();
  for (Scalar lw : log_weights) {
    if (std::isfinite(lw) && lw > max_log) {
      max_log = lw;
    }
  }
  if (!std::isfinite(max_log)) {
    weights.setConstant(Scalar(1) / static_cast<Scalar>(n));
    return false;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar lw = log_weights[static_cast<std::size_t>(i)];
    weights[i] = std::isnan(lw) ? Scalar(0) : std::exp(lw - max_log);
  }
  weights /= weights.sum();
  return true;
}

/// Systematic resampling: `count` ancestor indices drawn proportionally to
/// `weights` with a single uniform offset. Output is sorted ascending.
template <typename Derived>
std::vector<std::size_t> systematic_resample(const Eigen::MatrixBase<Derived>& weights, std::size_t count,
                                             RngStream& rng) {
  using Scalar = typename Derived::Scalar;
  std::vector<std::size_t> indices(count);
  if (count == 0) {
    return indices;
  }
  const Scalar total = weights.sum();
  if (!(total > Scalar(0))) {
    throw ContractError("systematic_resample: weights sum to zero");
  }
  const Scalar step = Scalar(1) / static_cast<Scalar>(count);
  const Scalar offset = static_cast<Scalar>(rng.uniform()) * step;
  const auto last = static_cast<std::size_t>(weights.size() - 1);
  std::size_t source = 0;
  Scalar cumulative = weights[0] / total;
  for (std::size_t j = 0; j < count; ++j) {
    const Scalar position = offset + static_cast<Scalar>(j) * step;
    while (position >= cumulative && source < last) {
      ++source;
      cumulative += weights[static_cast<Eigen::Index>(source)] / total;
    }
    indices[j] = source;
  }
  return indices;
}

}  // namespace gmf
