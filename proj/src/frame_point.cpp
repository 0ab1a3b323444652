#include "hypokinetic/frame_point.hpp"

#include <cmath>

namespace hypo {

Eigen::MatrixXd gram_schmidt_rows(const Eigen::MatrixXd& rows, double min_pivot) {
  Eigen::MatrixXd q = rows;
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    for (int pass = 0; pass < 2; ++pass)  // re-orthogonalization pass tightens the defect
      for (Eigen::Index j = 0; j < i; ++j) q.row(i) -= q.row(i).dot(q.row(j)) * q.row(j);
    const double norm = q.row(i).norm();
    if (norm < min_pivot) throw std::runtime_error("gram_schmidt: degenerate row");
    q.row(i) /= norm;
  }
  return q;
}

double orthonormality_defect(const ModelManifold& m, const FramePoint& p) {
  Eigen::MatrixXd full;
  if (m.flat()) {
    full = p.e;
  } else {
    full.resize(3, 3);
    full.row(0) = p.x.transpose() / m.radius();
    full.row(1) = p.e.row(0);
    full.row(2) = p.e.row(1);
  }
  const Eigen::MatrixXd gram = full * full.transpose();
  return (gram - Eigen::MatrixXd::Identity(full.rows(), full.rows())).cwiseAbs().maxCoeff();
}

FramePoint random_frame_point(const ModelManifold& m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  FramePoint p;
  if (m.flat()) {
    const int n = m.n();
    const double side = m.kind() == ModelManifold::Kind::FlatTorus ? m.side_length() : 1.0;
    p.x.resize(n);
    for (int k = 0; k < n; ++k) p.x[k] = side * unif(rng);
    while (true) {
      Eigen::MatrixXd raw(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) raw(i, j) = gauss(rng);
      if (std::abs(raw.determinant()) < 1e-9) continue;  // resample degenerate draws
      p.e = gram_schmidt_rows(raw);
      break;
    }
    return p;
  }
  // Haar-uniform rotation via a uniform unit quaternion; rows (u, e0, e1).
  double q0, q1, q2, q3, norm;
  do {
    q0 = gauss(rng); q1 = gauss(rng); q2 = gauss(rng); q3 = gauss(rng);
    norm = std::sqrt(q0 * q0 + q1 * q1 + q2 * q2 + q3 * q3);
  } while (norm < 1e-9);
  q0 /= norm; q1 /= norm; q2 /= norm; q3 /= norm;
  Eigen::Matrix3d R;
  R << 1 - 2 * (q2 * q2 + q3 * q3), 2 * (q1 * q2 - q0 * q3), 2 * (q1 * q3 + q0 * q2),
       2 * (q1 * q2 + q0 * q3), 1 - 2 * (q1 * q1 + q3 * q3), 2 * (q2 * q3 - q0 * q1),
       2 * (q1 * q3 - q0 * q2), 2 * (q2 * q3 + q0 * q1), 1 - 2 * (q1 * q1 + q2 * q2);
  p.x = m.radius() * R.row(0).transpose();
  p.e.resize(2, 3);
  p.e.row(0) = R.row(1);
  p.e.row(1) = R.row(2);
  return p;
}

FramePoint random_frame_point(const ModelManifold& m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_frame_point(m, rng);
}

Eigen::VectorXd reduce_coordinates(const ModelManifold& m, const Eigen::VectorXd& x) {
  if (m.kind() != ModelManifold::Kind::FlatTorus) return x;
  Eigen::VectorXd r = x;
  const double L = m.side_length();
  for (Eigen::Index k = 0; k < r.size(); ++k) {
    r[k] = std::fmod(r[k], L);
    if (r[k] < 0) r[k] += L;
  }
  return r;
}

}  // namespace hypo
