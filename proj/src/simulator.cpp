#include "hypokinetic/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace hypo {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t path_seed(std::uint64_t master, int path) {
  return splitmix64(master ^ splitmix64(0x706174685eedULL + static_cast<std::uint64_t>(path)));
}

int worker_count(int blocks) {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("HYPOKINETIC_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) hw = std::min(hw, cap);
  }
  return std::max(1, std::min(hw, blocks));
}

/// Completes the frame rows 1..n-1 around a fresh e^0, warm-started from
/// the previous frame (only e^0 enters the flat dynamics).
void recomplete_frame(Eigen::MatrixXd& e) {
  const Eigen::Index n = e.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index j = 0; j < i; ++j) e.row(i) -= e.row(i).dot(e.row(j)) * e.row(j);
    double norm = e.row(i).norm();
    if (norm < 1e-9) {  // previous row collapsed onto the span; reseed it
      e.row(i).setZero();
      e(i, i % e.cols()) = 1.0;
      for (Eigen::Index j = 0; j < i; ++j) e.row(i) -= e.row(i).dot(e.row(j)) * e.row(j);
      norm = e.row(i).norm();
    }
    e.row(i) /= norm;
  }
}

void vertical_half_step(const ModelManifold& m, FramePoint& st, double sigma, double dt,
                        std::mt19937_64& rng, std::normal_distribution<double>& gauss) {
  const double sd = sigma * std::sqrt(0.5 * dt);
  if (m.flat() && m.n() == 2) {
    const double beta = sd * gauss(rng);
    const double c = std::cos(beta), s = std::sin(beta);
    const Eigen::RowVector2d r0 = st.e.row(0), r1 = st.e.row(1);
    st.e.row(0) = c * r0 + s * r1;
    st.e.row(1) = c * r1 - s * r0;
    return;
  }
  if (!m.flat()) {  // exact fiber rotation of the group element
    const double beta = sd * gauss(rng);
    const double c = std::cos(beta), s = std::sin(beta);
    const Eigen::RowVector3d a = st.e.row(0), b = st.e.row(1);
    st.e.row(0) = c * a + s * b;
    st.e.row(1) = c * b - s * a;
    return;
  }
  // n >= 3: tangential Gaussian increment + sphere exponential map
  const int n = m.n();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  for (int j = 1; j < n; ++j) v += (sd * gauss(rng)) * st.e.row(j).transpose();
  const double alpha = v.norm();
  if (alpha > 0.0) {
    const Eigen::VectorXd dir = v / alpha;
    st.e.row(0) = (std::cos(alpha) * st.e.row(0).transpose() + std::sin(alpha) * dir).transpose();
    recomplete_frame(st.e);
  }
}

void geodesic_step(const ModelManifold& m, FramePoint& st, double length) {
  if (m.flat()) {
    st.x += length * st.e.row(0).transpose();
    return;
  }
  const double r = m.radius();
  const double ang = length / r;
  const double c = std::cos(ang), s = std::sin(ang);
  const Eigen::Vector3d u = st.x / r;
  const Eigen::Vector3d a = st.e.row(0).transpose();
  st.x = r * (c * u + s * a);
  st.e.row(0) = (c * a - s * u).transpose();
}

}  // namespace

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("sim: dt > 0 required");
  if (!(horizon > 0.0) || dt > horizon) throw std::invalid_argument("sim: dt <= horizon required");
  if (paths < 1) throw std::invalid_argument("sim: paths >= 1 required");
  if (sigma < 0.0 || kappa < 0.0) throw std::invalid_argument("sim: sigma, kappa >= 0 required");
  if (dt * std::max(sigma * sigma, kappa) > 0.5)
    throw std::invalid_argument("sim: stability guard dt*max(sigma^2, kappa) <= 0.5 violated");
  if (record_msd && manifold.kind() != ModelManifold::Kind::Euclidean)
    throw std::invalid_argument("sim: msd series is Euclidean-only");
  if (initial_law == InitialLaw::Point) {
    if (initial_point.x.size() != manifold.xdim())
      throw std::invalid_argument("sim: initial point does not match the manifold");
  }
}

FramePoint step(const ModelManifold& m, FramePoint state, double dt, double sigma, double kappa,
                std::mt19937_64& rng) {
  if (dt * std::max(sigma * sigma, kappa) > 0.5)
    throw std::invalid_argument("step: stability guard violated");
  std::normal_distribution<double> gauss(0.0, 1.0);
  vertical_half_step(m, state, sigma, dt, rng, gauss);
  geodesic_step(m, state, kappa * dt);
  vertical_half_step(m, state, sigma, dt, rng, gauss);
  return state;
}

EnsembleStats simulate(const SimConfig& config) {
  config.validate();
  const ModelManifold& m = config.manifold;
  const long steps = std::lround(config.horizon / config.dt);
  const long out_every = std::max(1L, std::lround(config.horizon / (512.0 * config.dt)));
  const long n_rec = steps / out_every + 1;
  const int n_obs = static_cast<int>(config.observables.size());
  const bool msd = config.record_msd;

  EnsembleStats stats;
  stats.times.resize(n_rec);
  for (long r = 0; r < n_rec; ++r) stats.times[r] = static_cast<double>(r * out_every) * config.dt;
  for (const auto& [name, fn] : config.observables) stats.names.push_back(name);

  const int block_size = 64;
  const int n_blocks = (config.paths + block_size - 1) / block_size;
  struct Block {
    Eigen::MatrixXd sum, sumsq;        // (n_rec) x (n_obs [+1 msd])
  };
  std::vector<Block> blocks(n_blocks);
  std::vector<FramePoint> terminal(config.record_terminal ? config.paths : 0);

  const int cols = n_obs + (msd ? 1 : 0);
  auto run_block = [&](int bi) {
    Block& blk = blocks[bi];
    blk.sum = Eigen::MatrixXd::Zero(n_rec, cols);
    blk.sumsq = Eigen::MatrixXd::Zero(n_rec, cols);
    const int lo = bi * block_size;
    const int hi = std::min(config.paths, lo + block_size);
    for (int path = lo; path < hi; ++path) {
      std::mt19937_64 rng(path_seed(config.seed, path));
      std::normal_distribution<double> gauss(0.0, 1.0);
      FramePoint st = config.initial_law == SimConfig::InitialLaw::Point
                          ? config.initial_point
                          : random_frame_point(m, rng);
      const Eigen::VectorXd x0 = st.x;
      long next_rec = 0;
      for (long k = 0; k <= steps; ++k) {
        if (k == next_rec * out_every) {
          FramePoint obs_pt = st;
          if (m.kind() == ModelManifold::Kind::FlatTorus)
            obs_pt.x = reduce_coordinates(m, st.x);
          for (int o = 0; o < n_obs; ++o) {
            const double v = config.observables[o].second.eval(obs_pt);
            blk.sum(next_rec, o) += v;
            blk.sumsq(next_rec, o) += v * v;
          }
          if (msd) {
            const double v = (st.x - x0).squaredNorm();
            blk.sum(next_rec, n_obs) += v;
            blk.sumsq(next_rec, n_obs) += v * v;
          }
          ++next_rec;
        }
        if (k < steps) {
          vertical_half_step(m, st, config.sigma, config.dt, rng, gauss);
          geodesic_step(m, st, config.kappa * config.dt);
          vertical_half_step(m, st, config.sigma, config.dt, rng, gauss);
        }
      }
      if (config.record_terminal) {
        FramePoint t = st;
        t.x = reduce_coordinates(m, t.x);
        terminal[path] = std::move(t);
      }
    }
  };

  const int workers = worker_count(n_blocks);
  if (workers == 1) {
    for (int bi = 0; bi < n_blocks; ++bi) run_block(bi);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        int bi;
        while ((bi = next.fetch_add(1)) < n_blocks) run_block(bi);
      });
    for (auto& t : pool) t.join();
  }

  // deterministic reduction in block order
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n_rec, cols);
  Eigen::MatrixXd sumsq = Eigen::MatrixXd::Zero(n_rec, cols);
  for (const Block& blk : blocks) {
    sum += blk.sum;
    sumsq += blk.sumsq;
  }
  const double N = config.paths;
  Eigen::MatrixXd mean = sum / N;
  Eigen::MatrixXd se(n_rec, cols);
  for (long r = 0; r < n_rec; ++r)
    for (int o = 0; o < cols; ++o) {
      const double var = std::max(0.0, sumsq(r, o) / N - mean(r, o) * mean(r, o));
      se(r, o) = N > 1 ? std::sqrt(var / (N - 1.0)) : 0.0;
    }
  stats.mean = mean.leftCols(n_obs);
  stats.stderr_ = se.leftCols(n_obs);
  if (msd) {
    stats.msd = mean.col(n_obs);
    stats.msd_stderr = se.col(n_obs);
  }
  if (config.record_terminal) stats.terminal = std::move(terminal);
  return stats;
}

DecayFit estimate_decay_rate(const Eigen::VectorXd& times, const Eigen::VectorXd& mean,
                             const Eigen::VectorXd& stderr_, const FitPolicy& policy) {
  const Eigen::Index n = times.size();
  if (mean.size() != n || stderr_.size() != n)
    throw std::invalid_argument("estimate_decay_rate: size mismatch");
  if (n < 2) throw std::runtime_error("estimate_decay_rate: insufficient signal (short series)");
  const double initial = std::abs(mean[0]);
  Eigen::Index start = -1;
  for (Eigen::Index i = 1; i < n; ++i)
    if (std::abs(mean[i]) <= policy.half_fraction * initial) {
      start = i;
      break;
    }
  if (start < 0)
    throw std::runtime_error("estimate_decay_rate: insufficient signal (no decay past half)");
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = start; i < n; ++i)
    if (std::abs(mean[i]) > policy.noise_multiple * stderr_[i] && mean[i] != 0.0)
      idx.push_back(i);
  if (static_cast<int>(idx.size()) < policy.min_points)
    throw std::runtime_error("estimate_decay_rate: insufficient signal (window too small)");

  auto fit_slope = [&](const std::vector<Eigen::Index>& pts) {
    double st = 0, sy = 0, stt = 0, sty = 0;
    const double k = pts.size();
    for (Eigen::Index i : pts) {
      const double t = times[i], y = std::log(std::abs(mean[i]));
      st += t;
      sy += y;
      stt += t * t;
      sty += t * y;
    }
    const double denom = k * stt - st * st;
    return (k * sty - st * sy) / denom;
  };

  DecayFit fit;
  fit.rate = -fit_slope(idx);
  fit.t_begin = times[idx.front()];
  fit.t_end = times[idx.back()];
  fit.points = static_cast<int>(idx.size());

  std::mt19937_64 rng(policy.bootstrap_seed);
  std::uniform_int_distribution<std::size_t> pick(0, idx.size() - 1);
  std::vector<double> rates;
  rates.reserve(policy.bootstrap);
  std::vector<Eigen::Index> sample(idx.size());
  for (int bsi = 0; bsi < policy.bootstrap; ++bsi) {
    bool distinct = false;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      sample[j] = idx[pick(rng)];
      if (times[sample[j]] != times[sample[0]]) distinct = true;
    }
    rates.push_back(distinct ? -fit_slope(sample) : fit.rate);
  }
  std::sort(rates.begin(), rates.end());
  fit.ci_low = rates[static_cast<std::size_t>(0.025 * (rates.size() - 1))];
  fit.ci_high = rates[static_cast<std::size_t>(0.975 * (rates.size() - 1))];
  return fit;
}

DiffusivityEstimate estimate_diffusivity(const EnsembleStats& stats, const ModelManifold& m,
                                         double sigma, double kappa, double t_begin,
                                         double t_end) {
  if (m.kind() != ModelManifold::Kind::Euclidean)
    throw std::invalid_argument("estimate_diffusivity: Euclidean manifold required");
  if (!stats.msd) throw std::invalid_argument("estimate_diffusivity: msd series missing");
  const double relax = 2.0 / ((m.n() - 1.0) * sigma * sigma);
  if (t_begin < 5.0 * relax - 1e-12)
    throw std::invalid_argument("estimate_diffusivity: window starts before 5 relaxation times");
  double st = 0, sy = 0, stt = 0, sty = 0;
  int k = 0;
  for (Eigen::Index i = 0; i < stats.times.size(); ++i) {
    const double t = stats.times[i];
    if (t < t_begin || t > t_end) continue;
    const double y = (*stats.msd)[i];
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    ++k;
  }
  if (k < 2) throw std::invalid_argument("estimate_diffusivity: too few points in window");
  DiffusivityEstimate est;
  est.D_hat = (k * sty - st * sy) / (k * stt - st * st);
  est.D_theory = 4.0 * kappa * kappa / ((m.n() - 1.0) * sigma * sigma);
  est.t_begin = t_begin;
  est.t_end = t_end;
  return est;
}

}  // namespace hypo
