#include "isic/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "isic/errors.hpp"

namespace isic {

namespace {

std::uint32_t gray(std::uint32_t k) { return k ^ (k >> 1); }

}  // namespace

Constellation::Constellation(int order) {
  int axis_bits = 0;
  switch (order) {
    case 4: axis_bits = 1; break;
    case 16: axis_bits = 2; break;
    case 64: axis_bits = 3; break;
    default:
      throw InvalidArgument("unsupported constellation order " + std::to_string(order) +
                            " (supported: 4, 16, 64)");
  }
  bits_per_symbol_ = 2 * axis_bits;
  const std::uint32_t levels = 1u << axis_bits;
  // Mean of |a|^2 over the square grid with amplitudes +-1, +-3, ... is 2(L^2-1)/3.
  scale_ = 1.0 / std::sqrt(2.0 * (levels * levels - 1) / 3.0);

  points_.resize(static_cast<std::size_t>(order));
  for (std::uint32_t ki = 0; ki < levels; ++ki) {
    for (std::uint32_t kq = 0; kq < levels; ++kq) {
      const std::uint32_t lbl = (gray(ki) << axis_bits) | gray(kq);
      const double re = -static_cast<double>(levels - 1) + 2.0 * ki;
      const double im = -static_cast<double>(levels - 1) + 2.0 * kq;
      points_[lbl] = Complex(re * scale_, im * scale_);
    }
  }
}

const char* Constellation::name() const noexcept {
  switch (points_.size()) {
    case 4: return "4qam";
    case 16: return "16qam";
    default: return "64qam";
  }
}

Constellation build_constellation(int order) { return Constellation(order); }

void normalize_posterior(std::span<double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  for (double& w : weights) w /= total;
}

SoftStats soft_statistics(Complex estimate, double bias, const Constellation& c, std::span<double> posterior) {
  const double mu = std::clamp(bias, kMinBias, 1.0 - kMinBias);
  const double eta2 = std::max(mu * (1.0 - mu), kMinEta2);
  const auto pts = c.points();

  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    posterior[i] = -std::norm(estimate - mu * pts[i]) / eta2;
    top = std::max(top, posterior[i]);
  }
  for (std::size_t i = 0; i < pts.size(); ++i) posterior[i] = std::exp(posterior[i] - top);
  normalize_posterior(posterior.first(pts.size()));

  SoftStats s;
  Complex mean = 0.0;
  int best = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    mean += posterior[i] * pts[i];
    if (posterior[i] > posterior[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  double var = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) var += posterior[i] * std::norm(pts[i] - mean);

  s.soft_decision = mean;
  s.residual_variance = var;
  s.hard_index = best;
  return s;
}

SoftStats soft_statistics(Complex estimate, double bias, const Constellation& c) {
  std::vector<double> p(static_cast<std::size_t>(c.order()));
  SoftStats s = soft_statistics(estimate, bias, c, p);
  s.posterior = std::move(p);
  return s;
}

int nearest_scaled_point(Complex estimate, double bias, const Constellation& c) {
  const auto pts = c.points();
  int best = 0;
  double best_d = std::norm(estimate - bias * pts[0]);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double d = std::norm(estimate - bias * pts[i]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

ComplexVector symbols_from_bits(std::span<const std::uint8_t> bits, const Constellation& c) {
  const auto bps = static_cast<std::size_t>(c.bits_per_symbol());
  if (bits.size() % bps != 0) {
    throw InvalidArgument("symbols_from_bits: bit count " + std::to_string(bits.size()) +
                          " is not a multiple of " + std::to_string(bps));
  }
  ComplexVector out(bits.size() / bps);
  for (std::size_t s = 0; s < out.size(); ++s) {
    std::uint32_t lbl = 0;
    for (std::size_t b = 0; b < bps; ++b) lbl = (lbl << 1) | (bits[s * bps + b] & 1u);
    out[s] = c.point(static_cast<int>(lbl));
  }
  return out;
}

std::vector<std::uint8_t> bits_from_hard_indices(std::span<const int> indices, const Constellation& c) {
  const auto bps = static_cast<std::size_t>(c.bits_per_symbol());
  std::vector<std::uint8_t> bits(indices.size() * bps);
  for (std::size_t s = 0; s < indices.size(); ++s) {
    if (indices[s] < 0 || indices[s] >= c.order()) {
      throw InvalidArgument("bits_from_hard_indices: index out of range");
    }
    const std::uint32_t lbl = c.label(indices[s]);
    for (std::size_t b = 0; b < bps; ++b) bits[s * bps + b] = static_cast<std::uint8_t>((lbl >> (bps - 1 - b)) & 1u);
  }
  return bits;
}

}  // namespace isic
