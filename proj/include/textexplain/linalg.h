// Small dense linear algebra used by the surrogate fits.

#ifndef TEXTEXPLAIN_LINALG_H_
#define TEXTEXPLAIN_LINALG_H_

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace textexplain {

class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Row-major square matrix.
class SquareMatrix {
 public:
  explicit SquareMatrix(size_t n) : n_(n), data_(n * n, 0.0) {}

  size_t size() const { return n_; }
  double& operator()(size_t r, size_t c) { return data_[r * n_ + c]; }
  double operator()(size_t r, size_t c) const { return data_[r * n_ + c]; }

 private:
  size_t n_;
  std::vector<double> data_;
};

// Solves A x = b for symmetric positive definite A by Cholesky
// factorization. Throws SingularSystemError when A is not numerically
// positive definite.
std::vector<double> SolveSpd(const SquareMatrix& a, std::span<const double> b);

}  // namespace textexplain

#endif  // TEXTEXPLAIN_LINALG_H_
