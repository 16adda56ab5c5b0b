#include <doctest.h>

#include <cmath>
#include <vector>

#include "bfpp/linalg.hpp"
#include "bfpp/rng.hpp"

using namespace bfpp;

namespace {

SymmetricMatrix random_pd(int dim, Rng& rng) {
  // B'B + I is positive definite by construction.
  std::vector<double> b(static_cast<size_t>(dim) * dim);
  for (double& x : b) x = rng.normal();
  SymmetricMatrix a(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j <= i; ++j) {
      double s = i == j ? 1.0 : 0.0;
      for (int k = 0; k < dim; ++k) s += b[k * dim + i] * b[k * dim + j];
      a.set(i, j, s);
    }
  return a;
}

double rel_frobenius_residual(const SymmetricMatrix& a, const LowerTriangularFactor& l) {
  double num = 0.0, den = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) {
      double llt = 0.0;
      for (int k = 0; k < a.dim(); ++k) llt += l.at(i, k) * l.at(j, k);
      num += (llt - a.at(i, j)) * (llt - a.at(i, j));
      den += a.at(i, j) * a.at(i, j);
    }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("cholesky of the identity") {
  const LowerTriangularFactor l = cholesky(SymmetricMatrix::identity(3));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j <= i; ++j) CHECK(l.at(i, j) == (i == j ? 1.0 : 0.0));
}

TEST_CASE("cholesky of a diagonal matrix") {
  SymmetricMatrix a(2);
  a.set(0, 0, 4.0);
  a.set(1, 1, 9.0);
  const LowerTriangularFactor l = cholesky(a);
  CHECK(l.at(0, 0) == 2.0);
  CHECK(l.at(1, 1) == 3.0);
  CHECK(l.at(1, 0) == 0.0);
}

TEST_CASE("cholesky round-trip on random PD matrices") {
  Rng rng(1);
  for (int dim : {1, 2, 3, 5, 8, 12}) {
    for (int rep = 0; rep < 20; ++rep) {
      const SymmetricMatrix a = random_pd(dim, rng);
      const LowerTriangularFactor l = cholesky(a);
      CHECK(rel_frobenius_residual(a, l) < 1e-10);
    }
  }
}

TEST_CASE("cholesky rejects non-PD input") {
  SymmetricMatrix a(2);
  a.set(0, 0, 1.0);
  a.set(1, 1, 1.0);
  a.set(1, 0, 2.0);  // determinant -3
  CHECK_THROWS_AS(cholesky(a), NotPositiveDefinite);
}

TEST_CASE("sample_mvn with a zero factor returns the mean exactly") {
  Rng rng(2);
  LowerTriangularFactor zero(3);
  const std::vector<double> mean = {1.0, -2.0, 0.5};
  const std::vector<double> x = sample_mvn(rng, mean, zero);
  for (int i = 0; i < 3; ++i) CHECK(x[i] == mean[i]);
}

TEST_CASE("sample_mvn empirical mean and covariance") {
  Rng rng(3);
  const SymmetricMatrix a = random_pd(3, rng);
  const LowerTriangularFactor l = cholesky(a);
  const std::vector<double> mean = {0.3, -0.7, 1.1};
  const int n = 100000;
  std::vector<double> sum(3, 0.0);
  std::vector<double> cov(9, 0.0);
  for (int s = 0; s < n; ++s) {
    const std::vector<double> x = sample_mvn(rng, mean, l);
    for (int i = 0; i < 3; ++i) sum[i] += x[i];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) cov[i * 3 + j] += (x[i] - mean[i]) * (x[j] - mean[j]);
  }
  // mean within 4 standard errors per coordinate
  for (int i = 0; i < 3; ++i) {
    const double se = std::sqrt(a.at(i, i) / n);
    CHECK(std::abs(sum[i] / n - mean[i]) < 4.0 * se);
  }
  // covariance within 5% Frobenius of L L'
  double num = 0.0, den = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double diff = cov[i * 3 + j] / n - a.at(i, j);
      num += diff * diff;
      den += a.at(i, j) * a.at(i, j);
    }
  CHECK(std::sqrt(num / den) < 0.05);
}

TEST_CASE("log_mvn_pdf closed-form cases") {
  LowerTriangularFactor id1(1);
  id1.set(0, 0, 1.0);
  const std::vector<double> zero = {0.0};
  CHECK(log_mvn_pdf(zero, zero, id1) == doctest::Approx(-0.5 * std::log(2.0 * M_PI)).epsilon(1e-14));

  // variance 4, residual 2: -0.5 ln(8 pi) - 0.5
  LowerTriangularFactor sd2(1);
  sd2.set(0, 0, 2.0);
  const std::vector<double> x = {2.0};
  CHECK(log_mvn_pdf(x, zero, sd2) ==
        doctest::Approx(-0.5 * std::log(8.0 * M_PI) - 0.5).epsilon(1e-14));
}

TEST_CASE("log_mvn_pdf agrees with the dense quadratic-form oracle") {
  Rng rng(4);
  for (int rep = 0; rep < 50; ++rep) {
    const int dim = 4;
    const SymmetricMatrix a = random_pd(dim, rng);
    const LowerTriangularFactor l = cholesky(a);
    std::vector<double> x(dim), mean(dim);
    for (double& v : x) v = rng.normal() * 2.0;
    for (double& v : mean) v = rng.normal();

    // dense route: solve via explicit inverse of L, logdet from the diagonal
    std::vector<double> linv(static_cast<size_t>(dim) * dim, 0.0);
    for (int j = 0; j < dim; ++j) {
      linv[j * dim + j] = 1.0 / l.at(j, j);
      for (int i = j + 1; i < dim; ++i) {
        double s = 0.0;
        for (int k = j; k < i; ++k) s += l.at(i, k) * linv[k * dim + j];
        linv[i * dim + j] = -s / l.at(i, i);
      }
    }
    double quad = 0.0, logdet = 0.0;
    for (int i = 0; i < dim; ++i) {
      double u = 0.0;
      for (int j = 0; j <= i; ++j) u += linv[i * dim + j] * (x[j] - mean[j]);
      quad += u * u;
      logdet += std::log(l.at(i, i));
    }
    const double expected = -0.5 * dim * std::log(2.0 * M_PI) - logdet - 0.5 * quad;
    CHECK(log_mvn_pdf(x, mean, l) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("log_mvn_pdf integrates to one on a 1-D grid") {
  LowerTriangularFactor sd(1);
  sd.set(0, 0, 1.7);
  const std::vector<double> mean = {0.4};
  const double sigma = 1.7;
  const int n = 200000;
  const double lo = mean[0] - 10.0 * sigma, hi = mean[0] + 10.0 * sigma;
  const double h = (hi - lo) / n;
  double total = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + i * h;
    const std::vector<double> xv = {x};
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    total += w * std::exp(log_mvn_pdf(xv, mean, sd));
  }
  CHECK(std::abs(total * h - 1.0) < 1e-6);
}

TEST_CASE("log_softmax closed forms and stability") {
  const std::vector<double> sym = {0.0, 0.0};
  const std::vector<double> ls = log_softmax(sym);
  CHECK(ls[0] == doctest::Approx(std::log(0.5)).epsilon(1e-15));
  CHECK(ls[1] == doctest::Approx(std::log(0.5)).epsilon(1e-15));

  const std::vector<double> big = {1000.0, 0.0};
  const std::vector<double> lb = log_softmax(big);
  CHECK(std::isfinite(lb[0]));
  CHECK(lb[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(lb[1] == doctest::Approx(-1000.0).epsilon(1e-12));
}

TEST_CASE("log_softmax normalization and shift invariance on random vectors") {
  Rng rng(5);
  for (int rep = 0; rep < 1000; ++rep) {
    const int dim = 2 + static_cast<int>(rng.next_u64() % 1023);
    std::vector<double> v(dim);
    for (double& x : v) x = rng.normal() * 10.0;
    const std::vector<double> ls = log_softmax(v);
    double sum = 0.0;
    for (double x : ls) sum += std::exp(x);
    REQUIRE(std::abs(sum - 1.0) < 1e-12);

    std::vector<double> shifted = v;
    const double c = rng.normal() * 100.0;
    for (double& x : shifted) x += c;
    const std::vector<double> ls2 = log_softmax(shifted);
    for (int i = 0; i < dim; ++i) REQUIRE(std::abs(ls[i] - ls2[i]) < 1e-9);
  }
}

TEST_CASE("finite differences on simple functions") {
  const auto quadratic = [](std::span<const double> p) {
    double s = 0.0;
    for (double x : p) s += x * x;
    return s;
  };
  const std::vector<double> p = {1.0, 2.0};
  const std::vector<double> g = finite_diff_grad(quadratic, p);
  CHECK(g[0] == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(g[1] == doctest::Approx(4.0).epsilon(1e-7));

  const auto linear = [](std::span<const double> p) {
    double s = 0.0;
    for (double x : p) s += x;
    return s;
  };
  const std::vector<double> g2 = finite_diff_grad(linear, std::vector<double>{3.0, -1.0, 0.0});
  for (double x : g2) CHECK(x == doctest::Approx(1.0).epsilon(1e-9));
}
