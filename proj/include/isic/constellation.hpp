#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "isic/linalg.hpp"

namespace isic {

/// Square Gray-mapped QAM with unit average symbol energy.
///
/// Points are stored in label order: the bit label of point i is the
/// binary representation of i, most significant bit first. The upper half of
/// the label carries the in-phase Gray code, the lower half the quadrature
/// one; along each axis increasing amplitude follows the reflected binary code.
class Constellation {
 public:
  /// Throws InvalidArgument unless order is 4, 16 or 64.
  explicit Constellation(int order);

  [[nodiscard]] int order() const noexcept { return static_cast<int>(points_.size()); }
  [[nodiscard]] int bits_per_symbol() const noexcept { return bits_per_symbol_; }
  [[nodiscard]] double energy_scale() const noexcept { return scale_; }
  [[nodiscard]] std::span<const Complex> points() const noexcept { return points_; }
  [[nodiscard]] const Complex& point(int index) const noexcept { return points_[static_cast<std::size_t>(index)]; }
  [[nodiscard]] std::uint32_t label(int index) const noexcept { return static_cast<std::uint32_t>(index); }

  /// "4qam", "16qam", "64qam".
  [[nodiscard]] const char* name() const noexcept;

 private:
  int bits_per_symbol_ = 0;
  double scale_ = 0.0;
  std::vector<Complex> points_;
};

Constellation build_constellation(int order);

/// Floors applied by soft_statistics.
inline constexpr double kMinBias = 1e-12;
inline constexpr double kMinEta2 = 1e-30;

/// Posterior summary of one transmit symbol.
struct SoftStats {
  std::vector<double> posterior;  // P_n(x), indexed like Constellation::points()
  Complex soft_decision;          // posterior mean
  double residual_variance = 0;   // posterior variance
  int hard_index = 0;             // argmax posterior, ties to the lowest index
};

/// Gaussian-approximation posterior of a symbol given its filtered estimate
/// and filtering bias. The bias is clamped into [kMinBias, 1 - kMinBias] and
/// the effective noise variance mu*(1-mu) floored at kMinEta2; the exponents
/// are shifted by their maximum before exponentiation.
SoftStats soft_statistics(Complex estimate, double bias, const Constellation& c);

/// Allocation-free variant: writes the posterior into `posterior` (size
/// c.order()) and returns the remaining fields with an empty posterior vector.
SoftStats soft_statistics(Complex estimate, double bias, const Constellation& c, std::span<double> posterior);

/// Normalizes non-negative weights in place to sum to one. Scaling every
/// weight by a power of two leaves the result bit-identical.
void normalize_posterior(std::span<double> weights);

/// argmin_x |estimate - bias*x|^2, ties to the lowest index.
int nearest_scaled_point(Complex estimate, double bias, const Constellation& c);

/// Maps bits (one per byte, 0/1, MSB of each label first) to symbols.
ComplexVector symbols_from_bits(std::span<const std::uint8_t> bits, const Constellation& c);

/// Inverse of symbols_from_bits on constellation indices.
std::vector<std::uint8_t> bits_from_hard_indices(std::span<const int> indices, const Constellation& c);

}  // namespace isic
