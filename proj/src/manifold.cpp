#include "hypokinetic/manifold.hpp"

#include <cmath>
#include <sstream>

namespace hypo {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) out.push_back(tok);
  return out;
}

}  // namespace

ModelManifold ModelManifold::parse(const std::string& spec) {
  auto parts = split(spec, ':');
  if (parts.empty()) throw std::invalid_argument("manifold: empty spec");
  const std::string& kind = parts[0];
  try {
    if (kind == "euclidean") {
      if (parts.size() != 2) throw std::invalid_argument("");
      return euclidean(std::stoi(parts[1]));
    }
    if (kind == "flat-torus") {
      if (parts.size() != 3) throw std::invalid_argument("");
      return flat_torus(std::stoi(parts[1]), std::stod(parts[2]));
    }
    if (kind == "sphere2") {
      if (parts.size() != 2) throw std::invalid_argument("");
      return sphere2(std::stod(parts[1]));
    }
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("manifold: bad spec '" + spec +
                                "' (expected euclidean:N, flat-torus:N:L or sphere2:R)");
  }
  throw std::invalid_argument("manifold: unknown kind '" + kind + "'");
}

std::string ModelManifold::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Euclidean: os << "euclidean:" << n_; break;
    case Kind::FlatTorus: os << "flat-torus:" << n_ << ":" << side_length_; break;
    case Kind::Sphere2: os << "sphere2:" << radius_; break;
  }
  return os.str();
}

Eigen::MatrixXd chart_metric(const ModelManifold& m, const Eigen::VectorXd& chart_x) {
  if (m.flat()) return Eigen::MatrixXd::Identity(m.n(), m.n());
  if (chart_x.size() != 2) throw std::invalid_argument("sphere chart: expected (theta, phi)");
  const double r = m.radius(), st = std::sin(chart_x[0]);
  Eigen::MatrixXd g(2, 2);
  g << r * r, 0.0, 0.0, r * r * st * st;
  return g;
}

std::vector<Eigen::MatrixXd> christoffel(const ModelManifold& m, const Eigen::VectorXd& chart_x) {
  if (m.flat()) {
    if (chart_x.size() != m.n()) throw std::invalid_argument("christoffel: bad chart point");
    return std::vector<Eigen::MatrixXd>(m.n(), Eigen::MatrixXd::Zero(m.n(), m.n()));
  }
  if (chart_x.size() != 2) throw std::invalid_argument("sphere chart: expected (theta, phi)");
  const double theta = chart_x[0];
  const double st = std::sin(theta), ct = std::cos(theta);
  if (std::abs(st) < 1e-6)
    throw std::domain_error("sphere chart: singular locus sin(theta) = 0");
  std::vector<Eigen::MatrixXd> G(2, Eigen::MatrixXd::Zero(2, 2));
  G[0](1, 1) = -st * ct;       // Gamma^theta_{phi phi}
  G[1](0, 1) = ct / st;        // Gamma^phi_{theta phi}
  G[1](1, 0) = ct / st;
  return G;
}

}  // namespace hypo
