#include "textexplain/linalg.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace textexplain {

std::vector<double> SolveSpd(const SquareMatrix& a, std::span<const double> b) {
  const size_t n = a.size();
  if (b.size() != n) throw std::invalid_argument("SolveSpd: dimension mismatch");

  double max_diag = 0.0;
  for (size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));
  const double tol = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * max_diag;

  // Lower-triangular factor, A = L L^T.
  SquareMatrix l(n);
  for (size_t j = 0; j < n; ++j) {
    double diag = a(j, j);
    for (size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > tol)) {
      throw SingularSystemError("matrix is singular or not positive definite");
    }
    l(j, j) = std::sqrt(diag);
    for (size_t i = j + 1; i < n; ++i) {
      double v = a(i, j);
      for (size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / l(j, j);
    }
  }

  std::vector<double> y(n);
  for (size_t i = 0; i < n; ++i) {
    double v = b[i];
    for (size_t k = 0; k < i; ++k) v -= l(i, k) * y[k];
    y[i] = v / l(i, i);
  }
  std::vector<double> x(n);
  for (size_t i = n; i-- > 0;) {
    double v = y[i];
    for (size_t k = i + 1; k < n; ++k) v -= l(k, i) * x[k];
    x[i] = v / l(i, i);
  }
  return x;
}

}  // namespace textexplain
