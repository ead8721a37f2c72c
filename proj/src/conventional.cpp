#include "isic/detectors.hpp"
#include "isic/errors.hpp"
#include "isic/flops.hpp"

namespace isic {

Estimate conventional_estimate(const ComplexMatrix& h, std::span<const Complex> y, std::span<const Complex> soft,
                               std::span<const double> variance, std::size_t n, double sigma2) {
  const std::size_t rows = h.rows();
  const std::size_t cols = h.cols();
  if (y.size() != rows || soft.size() != cols || variance.size() != cols || n >= cols) {
    throw InvalidArgument("conventional_estimate: dimension mismatch");
  }

  // Every soft decision but the n-th is cancelled.
  ComplexVector others(soft);
  others[n] = 0.0;
  const ComplexVector cancelled = residual(y, h, others.span());

  // Covariance H V H^H with v_n replaced by 1.
  HermitianMatrix cov(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = i; j < rows; ++j) {
      Complex acc = 0.0;
      for (std::size_t k = 0; k < cols; ++k) {
        const double vk = k == n ? 1.0 : variance[k];
        acc += h(i, k) * vk * std::conj(h(j, k));
      }
      cov.set(i, j, acc);
    }
  }
  const std::uint64_t entries = rows * (rows + 1) / 2;
  flops::count(entries * cols, entries * (cols - 1), entries * cols);

  const HermitianMatrix d = hermitian_inverse(cov, sigma2);
  const ComplexVector hn = h.column(n);
  const ComplexVector f = matvec(d, hn.span());
  return {dot(f.span(), cancelled.span()), dot(f.span(), hn.span()).real()};
}

ConventionalIsic::ConventionalIsic(const ComplexMatrix& h, const ComplexVector& y, DetectorConfig config)
    : IsicDetector(std::move(config)), h_(h), y_(y) {
  if (h_.rows() != config_.m || h_.cols() != config_.n || y_.size() != config_.m) {
    throw InvalidArgument("ConventionalIsic: dimension mismatch");
  }
}

Estimate ConventionalIsic::estimate(std::size_t n) {
  return conventional_estimate(h_, y_.span(), shared_.soft.span(), shared_.variance.values(), n, config_.sigma2);
}

std::size_t ConventionalIsic::matrix_memory_units() const noexcept {
  // H plus the M x M covariance inverse formed inside each procedure.
  return h_.memory_units() + config_.m * config_.m;
}

}  // namespace isic
