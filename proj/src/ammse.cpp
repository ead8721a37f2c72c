#include <cmath>

#include "isic/detectors.hpp"
#include "isic/errors.hpp"
#include "isic/flops.hpp"

namespace isic {

namespace {
constexpr double kDegenerate = 1e-14;
}

AmmseIsic::AmmseIsic(const ComplexMatrix& h, const ComplexVector& y, DetectorConfig config)
    : IsicDetector(std::move(config)), h_(h), y_(y) {
  if (h_.rows() != config_.m || h_.cols() != config_.n || y_.size() != config_.m) {
    throw InvalidArgument("AmmseIsic: dimension mismatch");
  }
  w_ = gram(h_);
  // V = I initially, so G = (W + sigma2 I)^-1 is still Hermitian here.
  g_ = hermitian_inverse(w_, config_.sigma2).to_dense();
}

void AmmseIsic::update_g(std::size_t j, double v_old, double v_new) {
  const std::size_t n = config_.n;
  ComplexVector wj(n);
  for (std::size_t i = 0; i < n; ++i) wj[i] = w_(i, j);

  ComplexVector z = matvec(g_, wj.span());
  const double dv = v_new - v_old;
  for (auto& zi : z) zi *= dv;
  flops::count(0, 0, n);

  const Complex denom = z[j] + 1.0;
  if (std::abs(denom) < kDegenerate) throw DegenerateUpdate("AmmseIsic: z(j) + 1 vanished");

  ComplexVector row(g_.row(j));
  for (auto& r : row) r /= denom;
  flops::count(n, 0);
  subtract_outer(g_, z.span(), row.span());
}

void AmmseIsic::flush() {
  if (pending_) {
    update_g(pending_->index, pending_->old_variance, shared_.variance[pending_->index]);
    pending_.reset();
  }
}

Estimate AmmseIsic::estimate(std::size_t n) {
  flush();

  const ComplexVector cancelled = residual(y_.span(), h_, shared_.soft.span());

  ComplexVector g_row(config_.n);
  for (std::size_t i = 0; i < config_.n; ++i) g_row[i] = std::conj(g_(n, i));
  const ComplexVector f = matvec(h_, g_row.span());

  const ComplexVector hn = h_.column(n);
  // f^H h_n = h_n^H D h_n is real for the Hermitian D.
  const double alpha = dot(f.span(), hn.span()).real();
  const double denom = (1.0 - shared_.variance[n]) * alpha + 1.0;
  if (std::abs(denom) < kDegenerate) throw DegenerateUpdate("AmmseIsic: beta denominator vanished");
  const double beta = 1.0 / denom;

  const Complex value = beta * dot(f.span(), cancelled.span()) + alpha * beta * shared_.soft[n];
  return {value, alpha * beta};
}

void AmmseIsic::on_commit(std::size_t n, Complex, double old_variance, Complex, double) {
  // A commit that was never followed by an estimate still owes its G update.
  flush();
  pending_ = Pending{n, old_variance};
}

std::size_t AmmseIsic::matrix_memory_units() const noexcept {
  return w_.memory_units() + g_.memory_units() + h_.memory_units();
}

}  // namespace isic
