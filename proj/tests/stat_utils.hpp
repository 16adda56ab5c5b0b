// Statistical oracles used by the tests: chi-square and KS p-values,
// a large-sample Welch test, and a permutation test for mutual information.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "bfpp/rng.hpp"

namespace statu {

// Regularized upper incomplete gamma Q(a, x), series + continued fraction.
inline double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) return 1.0;
  if (x == 0.0) return 1.0;
  const double gln = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
  }
  double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - gln) * h;
}

inline double chi2_pvalue(double stat, int dof) { return gamma_q(0.5 * dof, 0.5 * stat); }

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Asymptotic Kolmogorov tail probability.
inline double ks_pvalue(double d, double n_eff) {
  const double rn = std::sqrt(n_eff);
  const double lam = (rn + 0.12 + 0.11 / rn) * d;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j)
    sum += 2.0 * (j % 2 == 1 ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lam * lam);
  return std::min(std::max(sum, 0.0), 1.0);
}

inline double ks_test_one_sample(std::span<const double> xs,
                                 const std::function<double(double)>& cdf) {
  std::vector<double> s(xs.begin(), xs.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return ks_pvalue(d, n);
}

inline double ks_test_two_sample(std::span<const double> a, std::span<const double> b) {
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  double d = 0.0;
  size_t i = 0, j = 0;
  while (i < sa.size() && j < sb.size()) {
    const double x = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] <= x) ++i;
    while (j < sb.size() && sb[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / sa.size() -
                             static_cast<double>(j) / sb.size()));
  }
  const double ne = static_cast<double>(sa.size()) * sb.size() / (sa.size() + sb.size());
  return ks_pvalue(d, ne);
}

// One-sided p-value for mean(a) > mean(b), normal approximation (large n).
inline double welch_pvalue_greater(std::span<const double> a, std::span<const double> b) {
  auto mean_var = [](std::span<const double> xs) {
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    double v = 0.0;
    for (double x : xs) v += (x - m) * (x - m);
    v /= static_cast<double>(xs.size() - 1);
    return std::pair<double, double>{m, v};
  };
  const auto [ma, va] = mean_var(a);
  const auto [mb, vb] = mean_var(b);
  const double t = (ma - mb) / std::sqrt(va / a.size() + vb / b.size());
  return 1.0 - normal_cdf(t);
}

// Mutual information between a discrete label and a quantile-binned value.
inline double mutual_information(std::span<const int> labels, std::span<const double> values,
                                 int num_labels, int bins) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  auto bin_of = [&sorted, bins](double v) {
    const size_t r = std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin();
    return std::min<int>(static_cast<int>(r * bins / sorted.size()), bins - 1);
  };
  std::vector<double> joint(static_cast<size_t>(num_labels) * bins, 0.0);
  std::vector<double> pl(num_labels, 0.0), pb(bins, 0.0);
  const double n = static_cast<double>(labels.size());
  for (size_t i = 0; i < labels.size(); ++i) {
    const int b = bin_of(values[i]);
    joint[labels[i] * bins + b] += 1.0 / n;
    pl[labels[i]] += 1.0 / n;
    pb[b] += 1.0 / n;
  }
  double mi = 0.0;
  for (int l = 0; l < num_labels; ++l)
    for (int b = 0; b < bins; ++b) {
      const double p = joint[l * bins + b];
      if (p > 0.0) mi += p * std::log(p / (pl[l] * pb[b]));
    }
  return mi;
}

// Permutation p-value for MI > 0.
inline double mi_permutation_pvalue(std::span<const int> labels, std::span<const double> values,
                                    int num_labels, int bins, int permutations, bfpp::Rng& rng) {
  const double observed = mutual_information(labels, values, num_labels, bins);
  std::vector<int> perm(labels.begin(), labels.end());
  int exceed = 0;
  for (int p = 0; p < permutations; ++p) {
    for (size_t i = perm.size(); i > 1; --i)
      std::swap(perm[i - 1], perm[rng.next_u64() % i]);
    if (mutual_information(perm, values, num_labels, bins) >= observed) ++exceed;
  }
  return static_cast<double>(exceed + 1) / static_cast<double>(permutations + 1);
}

}  // namespace statu
