#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hypokinetic/simulator.hpp"

namespace hypo {

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) {
    // lower series, Q = 1 - P
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  // continued fraction (modified Lentz)
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double ks_uniform_pvalue(std::vector<double> samples, double lo, double hi) {
  if (samples.empty() || hi <= lo) throw std::invalid_argument("ks: bad inputs");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double dmax = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = (samples[i] - lo) / (hi - lo);
    dmax = std::max(dmax, std::abs(f - (i + 1) / n));
    dmax = std::max(dmax, std::abs(f - i / n));
  }
  const double lam = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * dmax;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lam * lam);
    p += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

double chi2_uniform_pvalue(const std::vector<double>& samples, double lo, double hi, int bins) {
  if (samples.empty() || bins < 2 || hi <= lo) throw std::invalid_argument("chi2: bad inputs");
  std::vector<double> count(bins, 0.0);
  for (double s : samples) {
    int b = static_cast<int>((s - lo) / (hi - lo) * bins);
    b = std::clamp(b, 0, bins - 1);
    count[b] += 1.0;
  }
  const double expected = static_cast<double>(samples.size()) / bins;
  double stat = 0.0;
  for (double c : count) stat += (c - expected) * (c - expected) / expected;
  return gamma_q(0.5 * (bins - 1), 0.5 * stat);
}

}  // namespace hypo
