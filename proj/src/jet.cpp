#include "hypokinetic/jet.hpp"

namespace hypo::detail {

namespace {

MonomialTable build_table(int dims, int order) {
  MonomialTable tab;
  tab.dims = dims;
  tab.order = order;
  // enumerate multi-indices by (degree, lex)
  for (int deg = 0; deg <= order; ++deg) {
    MultiIndex a{};
    // iterate compositions of `deg` into `dims` parts, lexicographically
    std::vector<int> idx(dims, 0);
    while (true) {
      int sum = 0;
      for (int v : idx) sum += v;
      if (sum == deg) {
        MultiIndex m{};
        for (int i = 0; i < dims; ++i) m[i] = static_cast<std::uint8_t>(idx[i]);
        tab.alpha.push_back(m);
        tab.degree.push_back(deg);
      }
      // odometer over [0, deg]^dims
      int pos = dims - 1;
      while (pos >= 0) {
        if (++idx[pos] <= deg) break;
        idx[pos--] = 0;
      }
      if (pos < 0) break;
    }
    (void)a;
  }
  const int n = static_cast<int>(tab.alpha.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (tab.degree[i] + tab.degree[j] > order) continue;
      MultiIndex s{};
      for (int k = 0; k < dims; ++k)
        s[k] = static_cast<std::uint8_t>(tab.alpha[i][k] + tab.alpha[j][k]);
      tab.product.push_back({i, j, tab.find(s)});
    }
  }
  return tab;
}

struct TableCache {
  MonomialTable tables[kMaxJetDims][kMaxJetOrder];
  TableCache() {
    for (int d = 1; d <= kMaxJetDims; ++d)
      for (int o = 1; o <= kMaxJetOrder; ++o) tables[d - 1][o - 1] = build_table(d, o);
  }
};

}  // namespace

const MonomialTable& monomial_table(int dims, int order) {
  if (dims < 1 || dims > kMaxJetDims || order < 1 || order > kMaxJetOrder)
    throw std::invalid_argument("jet: unsupported dims/order");
  static const TableCache cache;  // thread-safe one-time init
  return cache.tables[dims - 1][order - 1];
}

}  // namespace hypo::detail
