#include "isic/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "isic/errors.hpp"
#include "isic/flops.hpp"

namespace isic {

namespace {

void require(bool condition, const char* message) {
  if (!condition) throw InvalidArgument(message);
}

}  // namespace

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexVector ComplexMatrix::column(std::size_t j) const {
  ComplexVector c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

HermitianMatrix HermitianMatrix::identity(std::size_t n) {
  HermitianMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1.0);
  return m;
}

HermitianMatrix HermitianMatrix::from_diagonal(std::span<const double> diagonal) {
  HermitianMatrix m(diagonal.size());
  for (std::size_t i = 0; i < diagonal.size(); ++i) m.set(i, i, diagonal[i]);
  return m;
}

ComplexMatrix HermitianMatrix::to_dense() const {
  ComplexMatrix m(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) m(i, j) = (*this)(i, j);
  return m;
}

double HermitianMatrix::max_asymmetry() const noexcept {
  double worst = 0.0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i; j < n_; ++j)
      worst = std::max(worst, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
  return worst;
}

double DiagonalVariance::clamp(double value) noexcept {
  if (!(value >= kMin)) return kMin;  // also maps NaN to the floor
  return std::min(value, 1.0);
}

double DiagonalVariance::set(std::size_t i, double value) noexcept {
  v_[i] = clamp(value);
  return v_[i];
}

HermitianMatrix gram(const ComplexMatrix& h) {
  require(h.rows() > 0 && h.cols() > 0, "gram: empty matrix");
  const std::size_t m = h.rows();
  const std::size_t n = h.cols();
  HermitianMatrix w(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      Complex acc = 0.0;
      for (std::size_t k = 0; k < m; ++k) acc += std::conj(h(k, i)) * h(k, j);
      w.set(i, j, acc);
    }
  }
  const std::uint64_t entries = n * (n + 1) / 2;
  flops::count(entries * m, entries * (m - 1));
  return w;
}

HermitianMatrix hermitian_inverse(const HermitianMatrix& a, double ridge) {
  const std::size_t n = a.size();
  require(n > 0, "hermitian_inverse: empty matrix");

  // Lower Cholesky factor of A + ridge*I, row-major, lower triangle only.
  std::vector<Complex> l(n * n);
  auto at = [n](std::vector<Complex>& m, std::size_t i, std::size_t j) -> Complex& { return m[i * n + j]; };
  std::uint64_t cmul = 0, cadd = 0, rmul = 0;

  for (std::size_t j = 0; j < n; ++j) {
    double d = a.diagonal(j) + ridge;
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(at(l, j, k));
    rmul += j;
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw SingularMatrix("hermitian_inverse: non-positive Cholesky pivot at index " + std::to_string(j));
    }
    const double ljj = std::sqrt(d);
    at(l, j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      Complex s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= at(l, i, k) * std::conj(at(l, j, k));
      at(l, i, j) = s / ljj;
      cmul += j;
      cadd += j;
      rmul += 1;
    }
  }

  // L^-1, lower triangular.
  std::vector<Complex> li(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    at(li, j, j) = 1.0 / at(l, j, j).real();
    for (std::size_t i = j + 1; i < n; ++i) {
      Complex s = 0.0;
      for (std::size_t k = j; k < i; ++k) s += at(l, i, k) * at(li, k, j);
      at(li, i, j) = -s / at(l, i, i).real();
      cmul += i - j;
      cadd += i - j - 1;
      rmul += 1;
    }
  }

  // (A + ridge*I)^-1 = L^-H L^-1, upper triangle then mirrored.
  HermitianMatrix inv(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      Complex s = 0.0;
      for (std::size_t k = j; k < n; ++k) s += std::conj(at(li, k, i)) * at(li, k, j);
      inv.set(i, j, s);
      cmul += n - j;
      cadd += n - j - 1;
    }
  }
  flops::count(cmul, cadd, rmul);
  return inv;
}

void rank1_update(HermitianMatrix& a, double c, std::span<const Complex> q) {
  require(q.size() == a.size(), "rank1_update: length mismatch");
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Complex ci = c * q[i];
    for (std::size_t j = i; j < n; ++j) a.set(i, j, a(i, j) + ci * std::conj(q[j]));
  }
  const std::uint64_t entries = n * (n + 1) / 2;
  flops::count(entries, entries, n);
}

void rank1_update_excluding(HermitianMatrix& a, double c, std::span<const Complex> q, std::size_t skip) {
  require(q.size() == a.size(), "rank1_update_excluding: length mismatch");
  require(skip < a.size(), "rank1_update_excluding: index out of range");
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i == skip) continue;
    const Complex ci = c * q[i];
    for (std::size_t j = i; j < n; ++j) {
      if (j == skip) continue;
      a.set(i, j, a(i, j) + ci * std::conj(q[j]));
    }
  }
  const std::uint64_t entries = (n - 1) * n / 2;
  flops::count(entries, entries, n - 1);
}

ComplexVector matvec(const ComplexMatrix& a, std::span<const Complex> x, Op op) {
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  if (op == Op::None) {
    require(x.size() == cols, "matvec: dimension mismatch");
    ComplexVector y(rows);
    for (std::size_t i = 0; i < rows; ++i) {
      Complex acc = 0.0;
      const auto r = a.row(i);
      for (std::size_t j = 0; j < cols; ++j) acc += r[j] * x[j];
      y[i] = acc;
    }
    flops::count(rows * cols, rows * (cols - 1));
    return y;
  }
  require(x.size() == rows, "matvec: dimension mismatch");
  ComplexVector y(cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto r = a.row(i);
    for (std::size_t j = 0; j < cols; ++j) y[j] += std::conj(r[j]) * x[i];
  }
  flops::count(rows * cols, (rows - 1) * cols);
  return y;
}

ComplexVector matvec(const HermitianMatrix& a, std::span<const Complex> x) {
  const std::size_t n = a.size();
  require(x.size() == n, "matvec: dimension mismatch");
  ComplexVector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    Complex acc = 0.0;
    const auto r = a.row(i);
    for (std::size_t j = 0; j < n; ++j) acc += r[j] * x[j];
    y[i] = acc;
  }
  flops::count(n * n, n * (n - 1));
  return y;
}

Complex dot(std::span<const Complex> a, std::span<const Complex> b) {
  require(a.size() == b.size(), "dot: length mismatch");
  Complex acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  flops::count(a.size(), a.empty() ? 0 : a.size() - 1);
  return acc;
}

ComplexVector residual(std::span<const Complex> y, const ComplexMatrix& a, std::span<const Complex> x) {
  require(y.size() == a.rows() && x.size() == a.cols(), "residual: dimension mismatch");
  ComplexVector r(y);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto row = a.row(i);
    Complex acc = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) acc += row[j] * x[j];
    r[i] -= acc;
  }
  flops::count(a.rows() * a.cols(), a.rows() * a.cols());
  return r;
}

void subtract_outer(ComplexMatrix& a, std::span<const Complex> x, std::span<const Complex> y) {
  require(x.size() == a.rows() && y.size() == a.cols(), "subtract_outer: dimension mismatch");
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto row = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) row[j] -= x[i] * y[j];
  }
  flops::count(a.rows() * a.cols(), a.rows() * a.cols());
}

}  // namespace isic
