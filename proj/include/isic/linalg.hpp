#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace isic {

using Complex = std::complex<double>;

/// Fixed-length dense complex vector.
class ComplexVector {
 public:
  ComplexVector() = default;
  explicit ComplexVector(std::size_t n, Complex fill = {}) : data_(n, fill) {}
  ComplexVector(std::initializer_list<Complex> values) : data_(values) {}
  explicit ComplexVector(std::span<const Complex> values) : data_(values.begin(), values.end()) {}

  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

  Complex& operator[](std::size_t i) noexcept { return data_[i]; }
  const Complex& operator[](std::size_t i) const noexcept { return data_[i]; }

  [[nodiscard]] std::span<Complex> span() noexcept { return data_; }
  [[nodiscard]] std::span<const Complex> span() const noexcept { return data_; }
  operator std::span<const Complex>() const noexcept { return data_; }  // NOLINT

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  friend bool operator==(const ComplexVector&, const ComplexVector&) = default;

 private:
  std::vector<Complex> data_;
};

/// Dense row-major complex matrix (channel matrices, the non-Hermitian G).
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static ComplexMatrix identity(std::size_t n);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

  Complex& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  [[nodiscard]] std::span<Complex> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  [[nodiscard]] std::span<const Complex> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  [[nodiscard]] ComplexVector column(std::size_t j) const;

  /// Real-number slots needed to hold the matrix: two per entry.
  [[nodiscard]] std::size_t memory_units() const noexcept { return 2 * rows_ * cols_; }

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

/// Hermitian matrix with full storage. Every mutation writes both triangles
/// so A(i,j) == conj(A(j,i)) holds bit-exactly and the diagonal stays real.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(std::size_t n) : n_(n), data_(n * n) {}

  static HermitianMatrix identity(std::size_t n);
  static HermitianMatrix from_diagonal(std::span<const double> diagonal);

  [[nodiscard]] std::size_t size() const noexcept { return n_; }

  const Complex& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * n_ + j]; }
  [[nodiscard]] double diagonal(std::size_t i) const noexcept { return data_[i * (n_ + 1)].real(); }

  /// Sets A(i,j) = value and A(j,i) = conj(value). On the diagonal only the
  /// real part is kept.
  void set(std::size_t i, std::size_t j, Complex value) noexcept {
    if (i == j) {
      data_[i * (n_ + 1)] = value.real();
    } else {
      data_[i * n_ + j] = value;
      data_[j * n_ + i] = std::conj(value);
    }
  }

  [[nodiscard]] std::span<const Complex> row(std::size_t i) const noexcept { return {data_.data() + i * n_, n_}; }

  [[nodiscard]] ComplexMatrix to_dense() const;

  /// Largest |A(i,j) - conj(A(j,i))|, including imaginary parts on the diagonal.
  [[nodiscard]] double max_asymmetry() const noexcept;

  /// Logical real-number slots: n real diagonal entries plus n(n-1)/2 complex
  /// off-diagonal entries, i.e. n^2. Physical storage is larger (full layout).
  [[nodiscard]] std::size_t memory_units() const noexcept { return n_ * n_; }

  friend bool operator==(const HermitianMatrix&, const HermitianMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<Complex> data_;
};

/// Diagonal of residual interference variances, each entry kept in [kMin, 1].
class DiagonalVariance {
 public:
  static constexpr double kMin = 1e-12;

  DiagonalVariance() = default;
  explicit DiagonalVariance(std::size_t n) : v_(n, 1.0) {}

  [[nodiscard]] std::size_t size() const noexcept { return v_.size(); }
  double operator[](std::size_t i) const noexcept { return v_[i]; }

  /// Stores clamp(value, kMin, 1) and returns the stored value.
  double set(std::size_t i, double value) noexcept;

  [[nodiscard]] std::span<const double> values() const noexcept { return v_; }

  static double clamp(double value) noexcept;

 private:
  std::vector<double> v_;
};

enum class Op { None, ConjTranspose };

/// W = H^H H, upper triangle computed and mirrored.
HermitianMatrix gram(const ComplexMatrix& h);

/// (A + ridge*I)^-1 through a Cholesky factorization. Throws SingularMatrix
/// when a pivot is not strictly positive.
HermitianMatrix hermitian_inverse(const HermitianMatrix& a, double ridge);

/// A <- A + c*q*q^H.
void rank1_update(HermitianMatrix& a, double c, std::span<const Complex> q);

/// A <- A + c*q*q^H restricted to rows and columns != skip. Row/column
/// `skip` is left untouched and q[skip] is ignored.
void rank1_update_excluding(HermitianMatrix& a, double c, std::span<const Complex> q, std::size_t skip);

/// A*x or A^H*x.
ComplexVector matvec(const ComplexMatrix& a, std::span<const Complex> x, Op op = Op::None);
ComplexVector matvec(const HermitianMatrix& a, std::span<const Complex> x);

/// a^H b.
Complex dot(std::span<const Complex> a, std::span<const Complex> b);

/// y - A*x.
ComplexVector residual(std::span<const Complex> y, const ComplexMatrix& a, std::span<const Complex> x);

/// A <- A - x*y^T (no conjugation).
void subtract_outer(ComplexMatrix& a, std::span<const Complex> x, std::span<const Complex> y);

}  // namespace isic
