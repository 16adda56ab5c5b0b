#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "bfpp/errors.hpp"
#include "bfpp/rng.hpp"

namespace bfpp {

inline constexpr double kLn2Pi = 1.8378770664093454835606594728112;

inline double value_of(double x) { return x; }

// Packed lower-triangular storage: element (i,j), j <= i, lives at i*(i+1)/2 + j.
inline int packed_index(int i, int j) { return i * (i + 1) / 2 + j; }

// Symmetric matrix with each off-diagonal entry stored once and mirrored on read.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(int dim)
      : dim_(dim), lower_(static_cast<size_t>(dim) * (dim + 1) / 2, 0.0) {
    if (dim < 1) throw DimensionMismatch("SymmetricMatrix: dim must be >= 1");
  }

  static SymmetricMatrix identity(int dim) {
    SymmetricMatrix m(dim);
    for (int i = 0; i < dim; ++i) m.set(i, i, 1.0);
    return m;
  }

  int dim() const { return dim_; }

  double at(int i, int j) const {
    return i >= j ? lower_[packed_index(i, j)] : lower_[packed_index(j, i)];
  }
  void set(int i, int j, double v) {
    if (i >= j)
      lower_[packed_index(i, j)] = v;
    else
      lower_[packed_index(j, i)] = v;
  }

  std::span<const double> packed() const { return lower_; }

 private:
  int dim_;
  std::vector<double> lower_;
};

class LowerTriangularFactor {
 public:
  explicit LowerTriangularFactor(int dim)
      : dim_(dim), lower_(static_cast<size_t>(dim) * (dim + 1) / 2, 0.0) {
    if (dim < 1) throw DimensionMismatch("LowerTriangularFactor: dim must be >= 1");
  }
  LowerTriangularFactor(int dim, std::vector<double> packed_lower)
      : dim_(dim), lower_(std::move(packed_lower)) {
    if (lower_.size() != static_cast<size_t>(dim) * (dim + 1) / 2)
      throw DimensionMismatch("LowerTriangularFactor: packed size mismatch");
  }

  int dim() const { return dim_; }
  double at(int i, int j) const { return j > i ? 0.0 : lower_[packed_index(i, j)]; }
  void set(int i, int j, double v) {
    if (j > i) throw DimensionMismatch("LowerTriangularFactor: upper entry");
    lower_[packed_index(i, j)] = v;
  }
  std::span<const double> packed() const { return lower_; }
  double log_det() const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += std::log(lower_[packed_index(i, i)]);
    return s;
  }

 private:
  int dim_;
  std::vector<double> lower_;
};

// Pivot at or below this is treated as non-PD; the cross-covariance bound
// ||c||^2 -> M drives the joint covariance toward exactly this singularity.
inline constexpr double kCholeskyPivotTol = 1e-12;

// In-place Cholesky of a packed lower triangle. Works for plain doubles and
// for AD tape variables (anything with value_of / sqrt / arithmetic).
template <class T>
void cholesky_packed_inplace(std::span<T> a, int n) {
  using std::sqrt;
  for (int j = 0; j < n; ++j) {
    T s = a[packed_index(j, j)];
    for (int k = 0; k < j; ++k) {
      const T& l = a[packed_index(j, k)];
      s = s - l * l;
    }
    if (value_of(s) <= kCholeskyPivotTol)
      throw NotPositiveDefinite("cholesky: pivot <= tolerance at column " + std::to_string(j));
    T d = sqrt(s);
    a[packed_index(j, j)] = d;
    for (int i = j + 1; i < n; ++i) {
      T s2 = a[packed_index(i, j)];
      for (int k = 0; k < j; ++k) s2 = s2 - a[packed_index(i, k)] * a[packed_index(j, k)];
      a[packed_index(i, j)] = s2 / d;
    }
  }
}

// Solves L u = rhs by forward substitution; rhs is overwritten with u.
template <class T>
void forward_subst_packed(std::span<const T> L, std::span<T> rhs, int n) {
  for (int i = 0; i < n; ++i) {
    T s = rhs[i];
    for (int j = 0; j < i; ++j) s = s - L[packed_index(i, j)] * rhs[j];
    rhs[i] = s / L[packed_index(i, i)];
  }
}

LowerTriangularFactor cholesky(const SymmetricMatrix& a);

// mean + L z with z i.i.d. standard normal, drawn in index order.
std::vector<double> sample_mvn(Rng& rng, std::span<const double> mean,
                               const LowerTriangularFactor& factor);

// Exact multivariate normal log-density through the triangular factor.
double log_mvn_pdf(std::span<const double> x, std::span<const double> mean,
                   const LowerTriangularFactor& factor);

double logsumexp(std::span<const double> v);
std::vector<double> log_softmax(std::span<const double> v);
std::vector<double> softmax(std::span<const double> v);

// Central differences (f(p+h e_i) - f(p-h e_i)) / 2h.
std::vector<double> finite_diff_grad(const std::function<double(std::span<const double>)>& f,
                                     std::span<const double> p, double h = 1e-5);

}  // namespace bfpp
