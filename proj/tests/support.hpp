#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "isic/detectors.hpp"
#include "isic/linalg.hpp"

namespace isic::test {

inline ComplexMatrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& g) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  ComplexMatrix a(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) a(i, j) = {nd(g), nd(g)};
  return a;
}

inline ComplexVector random_vector(std::size_t n, std::mt19937_64& g) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  ComplexVector v(n);
  for (auto& x : v) x = {nd(g), nd(g)};
  return v;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
  return worst;
}

inline double max_abs(const ComplexMatrix& a) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) worst = std::max(worst, std::abs(a(i, j)));
  return worst;
}

/// max|a - b| / max(1, max|b|).
inline double rel_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  return max_abs_diff(a, b) / std::max(1.0, max_abs(b));
}

inline double rel_diff(const ComplexVector& a, const ComplexVector& b) {
  double diff = 0.0;
  double scale = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  return diff / scale;
}

inline ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k)
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
  return c;
}

/// Gauss-Jordan inverse with partial pivoting; independent of the Cholesky path.
inline ComplexMatrix dense_inverse(ComplexMatrix a) {
  const std::size_t n = a.rows();
  ComplexMatrix inv = ComplexMatrix::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a(r, c)) > std::abs(a(p, c))) p = r;
    for (std::size_t j = 0; j < n; ++j) {
      std::swap(a(c, j), a(p, j));
      std::swap(inv(c, j), inv(p, j));
    }
    const Complex d = a(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      a(c, j) /= d;
      inv(c, j) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const Complex f = a(r, c);
      for (std::size_t j = 0; j < n; ++j) {
        a(r, j) -= f * a(c, j);
        inv(r, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

/// (H-tilde^H H-tilde + sigma2 I)^-1 with H-tilde = H sqrt(V), by dense inversion.
inline ComplexMatrix q_definition(const ComplexMatrix& h, std::span<const double> v, double sigma2) {
  const std::size_t n = h.cols();
  ComplexMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Complex acc = 0.0;
      for (std::size_t k = 0; k < h.rows(); ++k) acc += std::conj(h(k, i)) * h(k, j);
      a(i, j) = std::sqrt(v[i] * v[j]) * acc + (i == j ? sigma2 : 0.0);
    }
  }
  return dense_inverse(a);
}

/// sqrt(V^-1) Q H-tilde^H (y - H x-bar).
inline ComplexVector t_definition(const ComplexMatrix& h, const ComplexVector& y, std::span<const Complex> soft,
                                  std::span<const double> v, double sigma2) {
  const std::size_t n = h.cols();
  const ComplexMatrix q = q_definition(h, v, sigma2);
  ComplexVector r(y);
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t j = 0; j < n; ++j) r[i] -= h(i, j) * soft[j];
  ComplexVector b(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < h.rows(); ++i) b[j] += std::conj(h(i, j)) * r[i];
    b[j] *= std::sqrt(v[j]);
  }
  ComplexVector t(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) t[i] += q(i, j) * b[j];
    t[i] /= std::sqrt(v[i]);
  }
  return t;
}

/// (W V + sigma2 I)^-1, W = H^H H.
inline ComplexMatrix g_definition(const ComplexMatrix& h, std::span<const double> v, double sigma2) {
  const std::size_t n = h.cols();
  ComplexMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Complex acc = 0.0;
      for (std::size_t k = 0; k < h.rows(); ++k) acc += std::conj(h(k, i)) * h(k, j);
      a(i, j) = acc * v[j] + (i == j ? sigma2 : 0.0);
    }
  }
  return dense_inverse(a);
}

inline ComplexMatrix to_dense(const HermitianMatrix& a) { return a.to_dense(); }

}  // namespace isic::test
