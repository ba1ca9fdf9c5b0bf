// SPDX-License-Identifier: Apache-2.0
//
// Interpolating B-spline curve S(u) = sum_i c_i B_i(u) in Dim dimensions.
// Odd degrees place interior knots on the data sites (not-a-knot for cubics),
// even degrees on midpoints between sites. Parameters are stored relative to
// the first site so large absolute timestamps keep full precision.

#pragma once

#include <algorithm>
#include <cassert>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace unlidar {

template <typename Scalar, int Dim>
class BSpline {
 public:
  using Point = Eigen::Matrix<Scalar, Dim, 1>;
  using Coefficients = Eigen::Matrix<Scalar, Eigen::Dynamic, Dim>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  BSpline() = default;

  /// Interpolates `values.row(j)` at strictly increasing `sites(j)`.
  /// Degree is min(max_degree, n - 1). Returns false when the collocation
  /// system cannot be factorized.
  template <typename SitesDerived, typename ValuesDerived>
  bool interpolate(const Eigen::MatrixBase<SitesDerived>& sites, const Eigen::MatrixBase<ValuesDerived>& values,
                   int max_degree = 3) {
    const Eigen::Index n = sites.size();
    assert(n >= 2 && values.rows() == n && values.cols() == Dim);
    degree_ = static_cast<int>(std::min<Eigen::Index>(max_degree, n - 1));
    origin_ = sites(0);
    span_ = sites(n - 1) - origin_;

    Vector u(n);
    for (Eigen::Index j = 0; j < n; ++j) u(j) = sites(j) - origin_;
    u(n - 1) = span_;

    build_knots(u);

    Eigen::SparseMatrix<Scalar> A(n, n);
    std::vector<Eigen::Triplet<Scalar>> trip;
    trip.reserve(static_cast<std::size_t>(n * (degree_ + 1)));
    std::vector<Scalar> basis(static_cast<std::size_t>(degree_ + 1));
    for (Eigen::Index j = 0; j < n; ++j) {
      const Eigen::Index s = find_span(u(j));
      basis_functions(s, u(j), basis);
      for (int r = 0; r <= degree_; ++r) {
        if (basis[static_cast<std::size_t>(r)] != Scalar(0)) {
          trip.emplace_back(j, s - degree_ + r, basis[static_cast<std::size_t>(r)]);
        }
      }
    }
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<Scalar>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) return false;
    coeffs_ = lu.solve(values.template cast<Scalar>());
    return lu.info() == Eigen::Success;
  }

  Point operator()(Scalar t) const { return evaluate(t - origin_); }

  int degree() const noexcept { return degree_; }
  Scalar domain_min() const noexcept { return origin_; }
  Scalar domain_max() const noexcept { return origin_ + span_; }
  /// Knots relative to domain_min().
  const Vector& knots() const noexcept { return knots_; }
  const Coefficients& coefficients() const noexcept { return coeffs_; }

 private:
  template <typename V>
  void build_knots(const V& u) {
    const Eigen::Index n = u.size();
    const int k = degree_;
    knots_.resize(n + k + 1);
    Eigen::Index w = 0;
    for (int r = 0; r <= k; ++r) knots_(w++) = u(0);
    if (k % 2 == 1) {
      for (Eigen::Index j = (k + 1) / 2; j <= n - 1 - (k + 1) / 2; ++j) knots_(w++) = u(j);
    } else {
      for (Eigen::Index j = k / 2; j <= n - 2 - k / 2; ++j) knots_(w++) = (u(j) + u(j + 1)) / Scalar(2);
    }
    for (int r = 0; r <= k; ++r) knots_(w++) = u(n - 1);
    assert(w == knots_.size());
  }

  // Index s with knots[s] <= u < knots[s+1]; the right end maps to the last
  // non-degenerate span.
  Eigen::Index find_span(Scalar u) const {
    const Eigen::Index n = coeffs_count();
    if (u >= knots_(n)) return n - 1;
    if (u <= knots_(degree_)) return degree_;
    const auto* begin = knots_.data();
    const auto* it = std::upper_bound(begin + degree_, begin + n + 1, u);
    return static_cast<Eigen::Index>(it - begin) - 1;
  }

  Eigen::Index coeffs_count() const { return knots_.size() - degree_ - 1; }

  void basis_functions(Eigen::Index s, Scalar u, std::vector<Scalar>& N) const {
    const int k = degree_;
    std::vector<Scalar> left(static_cast<std::size_t>(k + 1)), right(static_cast<std::size_t>(k + 1));
    N[0] = Scalar(1);
    for (int j = 1; j <= k; ++j) {
      left[static_cast<std::size_t>(j)] = u - knots_(s + 1 - j);
      right[static_cast<std::size_t>(j)] = knots_(s + j) - u;
      Scalar saved = 0;
      for (int r = 0; r < j; ++r) {
        const Scalar denom = right[static_cast<std::size_t>(r + 1)] + left[static_cast<std::size_t>(j - r)];
        const Scalar tmp = N[static_cast<std::size_t>(r)] / denom;
        N[static_cast<std::size_t>(r)] = saved + right[static_cast<std::size_t>(r + 1)] * tmp;
        saved = left[static_cast<std::size_t>(j - r)] * tmp;
      }
      N[static_cast<std::size_t>(j)] = saved;
    }
  }

  Point evaluate(Scalar u) const {
    const Eigen::Index s = find_span(u);
    std::vector<Scalar> N(static_cast<std::size_t>(degree_ + 1));
    basis_functions(s, u, N);
    Point p = Point::Zero();
    for (int r = 0; r <= degree_; ++r) {
      p += N[static_cast<std::size_t>(r)] * coeffs_.row(s - degree_ + r).transpose();
    }
    return p;
  }

  int degree_ = 0;
  Scalar origin_ = 0;
  Scalar span_ = 0;
  Vector knots_;
  Coefficients coeffs_;
};

}  // namespace unlidar
