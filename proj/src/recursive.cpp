#include <cmath>

#include "isic/detectors.hpp"
#include "isic/errors.hpp"
#include "isic/flops.hpp"

namespace isic {

namespace {
constexpr double kDegenerate = 1e-14;
}

RecursiveIsic::RecursiveIsic(const ComplexMatrix& h, const ComplexVector& y, DetectorConfig config)
    : IsicDetector(std::move(config)) {
  if (h.rows() != config_.m || h.cols() != config_.n || y.size() != config_.m) {
    throw InvalidArgument("RecursiveIsic: dimension mismatch");
  }
  // With V = I the equivalent channel is H itself.
  q_ = hermitian_inverse(gram(h), config_.sigma2);
  const ComplexVector hy = matvec(h, y.span(), Op::ConjTranspose);
  t_ = matvec(q_, hy.span());
  d_.resize(config_.n);
  for (std::size_t i = 0; i < config_.n; ++i) d_[i] = 1.0 - config_.sigma2 * q_.diagonal(i);
}

Estimate RecursiveIsic::estimate(std::size_t n) {
  const double s2 = config_.sigma2;
  const double omega = q_.diagonal(n);
  const double v = shared_.variance[n];
  // 1 + sigma2 omega (v - 1), written as a sum of non-negative terms.
  const double denom = d_[n] + s2 * omega * v;
  if (!(std::abs(denom) >= kDegenerate)) throw DegenerateUpdate("RecursiveIsic: estimate denominator vanished");
  const Complex value = (v * t_[n] + shared_.soft[n] * d_[n]) / denom;
  return {value, d_[n] / denom};
}

double RecursiveIsic::transition_denominator(std::size_t n, double v_old, double v_new) const {
  // v_new + sigma2 omega (v_old - v_new) == v_new d_n + sigma2 omega v_old.
  // The first form has no cancellation when the variance shrinks and is exact
  // for v_new == v_old; the second is used when it grows.
  const double s2 = config_.sigma2;
  const double omega = q_.diagonal(n);
  const double denom = v_new <= v_old ? v_new + s2 * omega * (v_old - v_new) : v_new * d_[n] + s2 * omega * v_old;
  if (!(std::abs(denom) >= kDegenerate)) throw DegenerateUpdate("RecursiveIsic: update denominator vanished");
  return denom;
}

void RecursiveIsic::update_symbol_estimates(std::size_t n, Complex x_old, double v_old, Complex x_new,
                                            double v_new) {
  const std::size_t size = config_.n;
  const double s2 = config_.sigma2;
  const double denom = transition_denominator(n, v_old, v_new);
  const Complex shift = x_new - x_old;

  const Complex gain = s2 * (shift + (v_new - v_old) * t_[n]) / denom;
  for (std::size_t i = 0; i < size; ++i) {
    if (i == n) continue;
    t_[i] += (std::sqrt(v_old / shared_.variance[i]) * gain) * q_(i, n);
  }
  flops::count(size - 1, size - 1, size - 1);

  t_[n] = (v_old / denom) * t_[n] - shift * (d_[n] / denom);
}

void RecursiveIsic::update_inverse(std::size_t n, double v_old, double v_new) {
  const std::size_t size = config_.n;
  const double s2 = config_.sigma2;
  const double denom = transition_denominator(n, v_old, v_new);
  const double ratio = v_old / denom;  // omega_new / omega_old
  const double omega = q_.diagonal(n) * ratio;
  if (!(omega > 0.0)) throw PositiveDefinitenessLost("RecursiveIsic: Q(n,n) is no longer positive");

  // (omega_new v_new - omega_old v_old) / (omega_old^2 v_old) == sigma2 (v_new - v_old) / denom.
  const double coeff = s2 * (v_new - v_old) / denom;

  ComplexVector column(size);
  for (std::size_t i = 0; i < size; ++i) column[i] = q_(i, n);
  rank1_update_excluding(q_, coeff, column.span(), n);
  for (std::size_t i = 0; i < size; ++i) {
    if (i != n) d_[i] -= s2 * coeff * std::norm(column[i]);
  }

  const double scale = ratio * std::sqrt(v_new / v_old);
  for (std::size_t i = 0; i < size; ++i) {
    if (i != n) q_.set(i, n, column[i] * scale);
  }
  flops::count(0, 0, size - 1);
  q_.set(n, n, omega);
  d_[n] *= v_new / denom;
}

void RecursiveIsic::on_commit(std::size_t n, Complex old_soft, double old_variance, Complex new_soft,
                              double new_variance) {
  update_symbol_estimates(n, old_soft, old_variance, new_soft, new_variance);
  update_inverse(n, old_variance, new_variance);
}

}  // namespace isic
