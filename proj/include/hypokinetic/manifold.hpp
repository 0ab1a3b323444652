#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hypo {

/// Base-manifold descriptor for the model spaces the laboratory supports.
/// All three have explicit charts, Christoffel symbols and curvature, so
/// every geometric quantity downstream can be evaluated in closed form.
class ModelManifold {
 public:
  enum class Kind { Euclidean, FlatTorus, Sphere2 };

  static ModelManifold euclidean(int n) {
    require(n >= 2, "Euclidean: n >= 2 required");
    return ModelManifold(Kind::Euclidean, n, 0.0, 0.0);
  }
  static ModelManifold flat_torus(int n, double side_length) {
    require(n >= 2, "FlatTorus: n >= 2 required");
    require(side_length > 0.0, "FlatTorus: side_length > 0 required");
    return ModelManifold(Kind::FlatTorus, n, side_length, 0.0);
  }
  static ModelManifold sphere2(double radius) {
    require(radius > 0.0, "Sphere2: radius > 0 required");
    return ModelManifold(Kind::Sphere2, 2, 0.0, radius);
  }

  /// Parses "euclidean:N", "flat-torus:N:L", "sphere2:R".
  static ModelManifold parse(const std::string& spec);

  Kind kind() const { return kind_; }
  int n() const { return n_; }
  double side_length() const { return side_length_; }
  double radius() const { return radius_; }
  bool flat() const { return kind_ != Kind::Sphere2; }

  /// Dimension of the stored base-point coordinates: chart coordinates
  /// for the flat models, ambient R^3 coordinates for the sphere.
  int xdim() const { return kind_ == Kind::Sphere2 ? 3 : n_; }

  /// M = sup |<u, R(v,w)h>| over unit vectors; the sectional-curvature
  /// magnitude 1/r^2 for the sphere, zero for the flat models.
  double curvature_bound() const {
    return kind_ == Kind::Sphere2 ? 1.0 / (radius_ * radius_) : 0.0;
  }

  std::string describe() const;

  friend bool operator==(const ModelManifold& a, const ModelManifold& b) {
    return a.kind_ == b.kind_ && a.n_ == b.n_ && a.side_length_ == b.side_length_ &&
           a.radius_ == b.radius_;
  }

 private:
  ModelManifold(Kind k, int n, double side, double radius)
      : kind_(k), n_(n), side_length_(side), radius_(radius) {}
  static void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
  }

  Kind kind_;
  int n_;
  double side_length_;
  double radius_;
};

/// Chart metric g_ij(x).  Flat models use the global flat chart (identity
/// metric); Sphere2 uses spherical coordinates (theta, phi) with
/// g = diag(r^2, r^2 sin^2 theta).  Exposed so tests can difference it.
Eigen::MatrixXd chart_metric(const ModelManifold& m, const Eigen::VectorXd& chart_x);

/// Christoffel symbols of the Levi-Civita connection in the chart above,
/// as n matrices G[l](i,j), symmetric in (i,j).  The Sphere2 chart
/// excludes its singular locus sin(theta) = 0.
std::vector<Eigen::MatrixXd> christoffel(const ModelManifold& m, const Eigen::VectorXd& chart_x);

}  // namespace hypo
