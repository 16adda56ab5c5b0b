#include "bfpp/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace bfpp {

LowerTriangularFactor cholesky(const SymmetricMatrix& a) {
  const int n = a.dim();
  std::vector<double> packed(a.packed().begin(), a.packed().end());
  cholesky_packed_inplace<double>(packed, n);
  return LowerTriangularFactor(n, std::move(packed));
}

std::vector<double> sample_mvn(Rng& rng, std::span<const double> mean,
                               const LowerTriangularFactor& factor) {
  const int n = factor.dim();
  if (static_cast<int>(mean.size()) != n)
    throw DimensionMismatch("sample_mvn: mean/factor dims disagree");
  std::vector<double> z(n);
  for (int i = 0; i < n; ++i) z[i] = rng.normal();
  std::vector<double> out(mean.begin(), mean.end());
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j <= i; ++j) s += factor.at(i, j) * z[j];
    out[i] += s;
  }
  return out;
}

double log_mvn_pdf(std::span<const double> x, std::span<const double> mean,
                   const LowerTriangularFactor& factor) {
  const int n = factor.dim();
  if (static_cast<int>(x.size()) != n || static_cast<int>(mean.size()) != n)
    throw DimensionMismatch("log_mvn_pdf: dims disagree");
  std::vector<double> u(n);
  for (int i = 0; i < n; ++i) u[i] = x[i] - mean[i];
  forward_subst_packed<double>(factor.packed(), u, n);
  double quad = 0.0;
  for (double v : u) quad += v * v;
  return -0.5 * n * kLn2Pi - factor.log_det() - 0.5 * quad;
}

double logsumexp(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;  // all -inf
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

std::vector<double> log_softmax(std::span<const double> v) {
  const double lse = logsumexp(v);
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] - lse;
  return out;
}

std::vector<double> softmax(std::span<const double> v) {
  std::vector<double> out = log_softmax(v);
  for (double& x : out) x = std::exp(x);
  return out;
}

std::vector<double> finite_diff_grad(const std::function<double(std::span<const double>)>& f,
                                     std::span<const double> p, double h) {
  std::vector<double> work(p.begin(), p.end());
  std::vector<double> grad(p.size());
  for (size_t i = 0; i < p.size(); ++i) {
    const double orig = work[i];
    work[i] = orig + h;
    const double fp = f(work);
    work[i] = orig - h;
    const double fm = f(work);
    work[i] = orig;
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

}  // namespace bfpp
