#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "gmf/errors.hpp"
#include "gmf/types.hpp"

namespace gmf {

template <typename Scalar>
struct GaussianComponent {
  VectorX<Scalar> mean;
  MatrixX<Scalar> cov;
  Scalar weight = Scalar(0);
};

/// Weighted sum of Gaussian components. The weights are kept normalized by
/// every filter operation; `normalize()` restores the invariant after manual
/// edits.
template <typename Scalar>
class GaussianMixture {
 public:
  using Component = GaussianComponent<Scalar>;

  GaussianMixture() = default;
  explicit GaussianMixture(std::vector<Component> components) : components_(std::move(components)) {}

  [[nodiscard]] std::size_t size() const noexcept { return components_.size(); }
  [[nodiscard]] bool empty() const noexcept { return components_.empty(); }
  [[nodiscard]] Eigen::Index dim() const noexcept { return empty() ? 0 : components_.front().mean.size(); }

  Component& operator[](std::size_t i) { return components_[i]; }
  const Component& operator[](std::size_t i) const { return components_[i]; }

  auto begin() noexcept { return components_.begin(); }
  auto end() noexcept { return components_.end(); }
  auto begin() const noexcept { return components_.begin(); }
  auto end() const noexcept { return components_.end(); }

  void push_back(Component c) { components_.push_back(std::move(c)); }
  void reserve(std::size_t n) { components_.reserve(n); }

  [[nodiscard]] std::vector<Component>& components() noexcept { return components_; }
  [[nodiscard]] const std::vector<Component>& components() const noexcept { return components_; }

  [[nodiscard]] VectorX<Scalar> weights() const {
    VectorX<Scalar> w(static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < size(); ++i) {
      w[static_cast<Eigen::Index>(i)] = components_[i].weight;
    }
    return w;
  }

  void set_weights(const VectorX<Scalar>& w) {
    if (static_cast<std::size_t>(w.size()) != size()) {
      throw ShapeError("set_weights: expected " + std::to_string(size()) + " weights");
    }
    for (std::size_t i = 0; i < size(); ++i) {
      components_[i].weight = w[static_cast<Eigen::Index>(i)];
    }
  }

  /// Means as the columns of a matrix.
  [[nodiscard]] MatrixX<Scalar> means() const {
    MatrixX<Scalar> m(dim(), static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < size(); ++i) {
      m.col(static_cast<Eigen::Index>(i)) = components_[i].mean;
    }
    return m;
  }

  /// Rescales weights to sum to one. Returns false if they sum to zero.
  bool normalize() {
    Scalar total = Scalar(0);
    for (const auto& c : components_) {
      total += c.weight;
    }
    if (!(total > Scalar(0))) {
      return false;
    }
    for (auto& c : components_) {
      c.weight /= total;
    }
    return true;
  }

 private:
  std::vector<Component> components_;
};

template <typename Scalar>
struct MixtureMoments {
  VectorX<Scalar> mean;
  MatrixX<Scalar> cov;
};

/// Mixture mean and covariance by the law of total variance.
template <typename Scalar>
MixtureMoments<Scalar> mixture_moments(const GaussianMixture<Scalar>& mix) {
  if (mix.empty()) {
    throw DegenerateInputError("mixture_moments: empty mixture");
  }
  const Eigen::Index n = mix.dim();
  MixtureMoments<Scalar> out{VectorX<Scalar>::Zero(n), MatrixX<Scalar>::Zero(n, n)};
  for (const auto& c : mix) {
    out.mean += c.weight * c.mean;
  }
  for (const auto& c : mix) {
    const VectorX<Scalar> d = c.mean - out.mean;
    out.cov += c.weight * (c.cov + d * d.transpose());
  }
  return out;
}

using GaussianComponentd = GaussianComponent<double>;
using GaussianMixtured = GaussianMixture<double>;

/// Snapshot CSV: header `weight,m0..,c00..` then one row per component with
/// row-major covariance entries.
void write_mixture_csv(std::ostream& out, const GaussianMixtured& mix);
GaussianMixtured read_mixture_csv(std::istream& in);

/// Binary snapshot, little-endian:
///   char[4] "GMFS", u32 version (1), u32 dim, u64 count,
///   then per component: f64 weight, f64[dim] mean, f64[dim*dim] row-major cov.
void write_mixture_binary(std::ostream& out, const GaussianMixtured& mix);
GaussianMixtured read_mixture_binary(std::istream& in);

}  // namespace gmf
