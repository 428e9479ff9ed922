#pragma once

// Brute-force reference for the detection statistic, used only by tests.
// Variances use the pairwise form sum_{i<j} (x_i - x_j)^2 / (n (n - 1)),
// which equals the unbiased sample variance without going through the mean.

#include <cmath>
#include <cstdint>
#include <vector>

namespace pestego::testing {

struct OracleStat {
  long double mean_c, mean_d, var_c, var_d, sigma, q;
};

inline long double oracle_mean(const std::vector<int>& v) {
  long double s = 0;
  for (int x : v) s += x;
  return s / v.size();
}

inline long double oracle_var(const std::vector<int>& v) {
  long double s = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) s += static_cast<long double>(v[i] - v[j]) * (v[i] - v[j]);
  return s / (static_cast<long double>(v.size()) * (v.size() - 1));
}

inline OracleStat oracle_statistic(const std::vector<int>& block, const std::vector<int>& pattern) {
  std::vector<int> c, d;
  for (std::size_t i = 0; i < block.size(); ++i) (pattern[i] ? c : d).push_back(block[i]);
  OracleStat o{};
  o.mean_c = oracle_mean(c);
  o.mean_d = oracle_mean(d);
  o.var_c = oracle_var(c);
  o.var_d = oracle_var(d);
  o.sigma = std::sqrt((o.var_c + o.var_d) / (block.size() / 2.0L));
  o.q = o.sigma > 0 ? (o.mean_c - o.mean_d) / o.sigma : 0;
  return o;
}

}  // namespace pestego::testing
