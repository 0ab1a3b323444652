#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hypokinetic/test_function.hpp"

namespace hypo {

/// Ensemble simulation setup.  dt * max(sigma^2, kappa) <= 0.5 is a
/// stability guard on the splitting step.
struct SimConfig {
  ModelManifold manifold = ModelManifold::flat_torus(2, 1.0);
  double sigma = 1.0;
  double kappa = 1.0;
  double dt = 1e-3;
  double horizon = 1.0;
  int paths = 1;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, TestFunction>> observables;

  enum class InitialLaw { Point, Uniform };
  InitialLaw initial_law = InitialLaw::Uniform;
  FramePoint initial_point;  // used when initial_law == Point

  bool record_terminal = false;
  bool record_msd = false;  // Euclidean only: E|x_t - x_0|^2 series

  void validate() const;  // throws std::invalid_argument
};

struct EnsembleStats {
  Eigen::VectorXd times;  // output grid, dt_out = max(dt, horizon/512)
  std::vector<std::string> names;
  Eigen::MatrixXd mean;     // (#times) x (#observables)
  Eigen::MatrixXd stderr_;  // sample std / sqrt(paths)
  std::optional<Eigen::VectorXd> msd;
  std::optional<Eigen::VectorXd> msd_stderr;
  std::vector<FramePoint> terminal;  // present when record_terminal
};

/// One Strang step: half vertical substep (spherical Brownian increment
/// of variance sigma^2 dt / 2 on the fiber), exact geodesic substep of
/// length kappa dt, half vertical substep.  The state is advanced in the
/// universal cover for the torus.
FramePoint step(const ModelManifold& m, FramePoint state, double dt, double sigma, double kappa,
                std::mt19937_64& rng);

/// Runs `paths` independent trajectories with per-path counter-derived
/// seeds; the result is a pure function of the config, independent of
/// the worker count (HYPOKINETIC_THREADS caps it).
EnsembleStats simulate(const SimConfig& config);

struct FitPolicy {
  double half_fraction = 0.5;  // window starts when |mean| first drops below this x initial
  double noise_multiple = 3.0;
  int min_points = 10;
  int bootstrap = 400;
  std::uint64_t bootstrap_seed = 17;
};

struct DecayFit {
  double rate;
  double ci_low, ci_high;
  double t_begin, t_end;
  int points;
};

/// Least-squares fit of log|mean| vs t on the admissible window (from
/// the half-amplitude time to the last point above the noise floor,
/// using only points with |mean| > noise_multiple * stderr).  Throws
/// std::runtime_error when fewer than min_points qualify.
DecayFit estimate_decay_rate(const Eigen::VectorXd& times, const Eigen::VectorXd& mean,
                             const Eigen::VectorXd& stderr_, const FitPolicy& policy = {});

struct DiffusivityEstimate {
  double D_hat;     // slope of E|x_t|^2 vs t on the window
  double D_theory;  // 4 kappa^2 / ((n-1) sigma^2)
  double t_begin, t_end;
};

/// Slope of the mean-squared displacement on [t_begin, t_end]; requires a
/// Euclidean run with msd recorded and a window starting at least five
/// velocity-relaxation times 2/((n-1) sigma^2) in.
DiffusivityEstimate estimate_diffusivity(const EnsembleStats& stats, const ModelManifold& m,
                                         double sigma, double kappa, double t_begin, double t_end);

// ---- small statistics helpers (simulator tests and CLI reports) ---------

/// Kolmogorov-Smirnov p-value of `samples` against the uniform law on
/// [lo, hi] (asymptotic Kolmogorov distribution).
double ks_uniform_pvalue(std::vector<double> samples, double lo, double hi);

/// Chi-squared uniformity p-value with `bins` equal cells on [lo, hi].
double chi2_uniform_pvalue(const std::vector<double>& samples, double lo, double hi, int bins);

/// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

}  // namespace hypo
