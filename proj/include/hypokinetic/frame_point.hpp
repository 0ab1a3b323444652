#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "hypokinetic/jet.hpp"
#include "hypokinetic/manifold.hpp"

namespace hypo {

/// A point of the orthonormal frame bundle, generic over the scalar so
/// that jets can flow through all geometric operations.
///
/// Flat models: x holds the n chart coordinates (universal cover for the
/// torus), e is the n x n matrix whose rows e^0..e^{n-1} are the frame
/// vectors in chart coordinates (an orthogonal matrix).
///
/// Sphere2: x holds the ambient R^3 position with |x| = r and e is 2 x 3
/// with rows e^0, e^1 tangent at x.  The rows (x/r, e^0, e^1) form a
/// rotation matrix, so vertical and geodesic motions are exact
/// one-parameter group rotations.
template <class S>
struct FramePointT {
  Eigen::Matrix<S, Eigen::Dynamic, 1> x;
  Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> e;
};

using FramePoint = FramePointT<double>;

template <class T>
FramePointT<T> lift(const FramePoint& p) {
  FramePointT<T> q;
  q.x = p.x.template cast<T>();
  q.e = p.e.template cast<T>();
  return q;
}

template <class T, class S>
FramePointT<T> lift(const FramePointT<S>& p) {
  FramePointT<T> q;
  q.x.resize(p.x.size());
  q.e.resize(p.e.rows(), p.e.cols());
  for (Eigen::Index i = 0; i < p.x.size(); ++i) q.x[i] = T(p.x[i]);
  for (Eigen::Index i = 0; i < p.e.rows(); ++i)
    for (Eigen::Index j = 0; j < p.e.cols(); ++j) q.e(i, j) = T(p.e(i, j));
  return q;
}

/// Gram-Schmidt on the rows, in row order (preserves the e^0 direction).
/// Throws if a pivot collapses below `min_pivot`.
Eigen::MatrixXd gram_schmidt_rows(const Eigen::MatrixXd& rows, double min_pivot = 1e-12);

/// max_{i,j} |g(e^i, e^j) - delta_ij|; for Sphere2 the defect of the full
/// 3x3 matrix (x/r, e^0, e^1).
double orthonormality_defect(const ModelManifold& m, const FramePoint& p);

/// x uniform on the chart region (unit cube / full torus / Haar on the
/// rotation group); frame by Gram-Schmidt of a Gaussian matrix,
/// resampled internally while |det| < 1e-9.
FramePoint random_frame_point(const ModelManifold& m, std::mt19937_64& rng);

/// Deterministic convenience: fresh generator from `seed`.
FramePoint random_frame_point(const ModelManifold& m, std::uint64_t seed);

/// Reduces flat-torus coordinates to [0, L); identity elsewhere.
Eigen::VectorXd reduce_coordinates(const ModelManifold& m, const Eigen::VectorXd& x);

}  // namespace hypo
