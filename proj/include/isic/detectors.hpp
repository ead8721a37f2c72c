#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "isic/constellation.hpp"
#include "isic/linalg.hpp"

namespace isic {

enum class Scheme { Conventional, Ammse, Recursive, HdOsic };

/// "conv", "alg1", "alg2", "hdosic".
std::string_view scheme_name(Scheme s) noexcept;
std::optional<Scheme> parse_scheme(std::string_view name) noexcept;

struct DetectorConfig {
  std::size_t n = 1;       // transmit streams
  std::size_t m = 1;       // receive antennas
  int iterations = 3;      // ISIC iterations K
  Constellation constellation{4};
  double sigma2 = 1.0;     // noise variance per receive antenna

  /// Throws InvalidArgument on M < N, N == 0, K < 1 or sigma2 <= 0.
  void validate() const;
};

/// Output of one filtering step: the LMMSE-ISIC estimate and the filtering bias.
struct Estimate {
  Complex value;
  double bias = 0.0;
};

struct ProcedureTrace {
  int iteration = 0;
  std::size_t index = 0;
  Complex estimate;
  double bias = 0.0;
  Complex soft_decision;
  double variance = 0.0;
};

/// Soft decisions, residual variances and last posteriors shared by every ISIC scheme.
struct IsicSharedState {
  ComplexVector soft;            // x-bar, starts at 0
  DiagonalVariance variance;     // v, starts at 1
  std::vector<double> posterior; // order x N, row n holds P_n(x)
  std::vector<int> hard;         // argmax of each row of posterior

  IsicSharedState() = default;
  IsicSharedState(std::size_t n, int order)
      : soft(n), variance(n), posterior(n * static_cast<std::size_t>(order), 1.0 / order), hard(n, 0) {}
};

/// Common driver for the iterative soft interference cancellation schemes.
///
/// A procedure for symbol n is: estimate(n), soft statistics, then commit(n),
/// which hands the old and new (soft decision, variance) pair to the scheme
/// before the shared state is overwritten. The detection order is 0..N-1.
class IsicDetector {
 public:
  explicit IsicDetector(DetectorConfig config);
  virtual ~IsicDetector() = default;

  IsicDetector(const IsicDetector&) = default;
  IsicDetector& operator=(const IsicDetector&) = default;

  [[nodiscard]] const DetectorConfig& config() const noexcept { return config_; }
  [[nodiscard]] const IsicSharedState& state() const noexcept { return shared_; }

  virtual Estimate estimate(std::size_t n) = 0;

  /// Replaces (x-bar_n, v_n); the variance is clamped into [DiagonalVariance::kMin, 1].
  void commit(std::size_t n, Complex soft, double variance);

  ProcedureTrace procedure(std::size_t n);
  void iterate(std::vector<ProcedureTrace>* trace = nullptr);

  /// Runs config().iterations iterations and returns the final hard decisions.
  std::vector<int> run(std::vector<ProcedureTrace>* trace = nullptr);

  [[nodiscard]] const std::vector<int>& hard_decisions() const noexcept { return shared_.hard; }

  /// Real-number slots of the O(N^2) / O(MN) matrices held across an iteration.
  [[nodiscard]] virtual std::size_t matrix_memory_units() const noexcept = 0;

 protected:
  virtual void on_commit(std::size_t n, Complex old_soft, double old_variance, Complex new_soft,
                         double new_variance) = 0;

  DetectorConfig config_;
  IsicSharedState shared_;
  int iteration_ = 0;
};

/// Conventional LMMSE-ISIC for symbol n evaluated literally: cancels every
/// other soft decision, inverts the M x M covariance with v_n replaced by 1
/// and filters. Used as the reference for the low-complexity schemes.
Estimate conventional_estimate(const ComplexMatrix& h, std::span<const Complex> y, std::span<const Complex> soft,
                               std::span<const double> variance, std::size_t n, double sigma2);

class ConventionalIsic final : public IsicDetector {
 public:
  ConventionalIsic(const ComplexMatrix& h, const ComplexVector& y, DetectorConfig config);

  Estimate estimate(std::size_t n) override;
  [[nodiscard]] std::size_t matrix_memory_units() const noexcept override;

 protected:
  void on_commit(std::size_t, Complex, double, Complex, double) override {}

 private:
  ComplexMatrix h_;
  ComplexVector y_;
};

/// The AMMSE-based low-complexity scheme: keeps G = (W V + sigma2 I)^-1 with
/// W = H^H H and refreshes it by Sherman-Morrison-Woodbury after each
/// variance change. The update for symbol j is deferred to the start of the
/// next procedure.
class AmmseIsic final : public IsicDetector {
 public:
  AmmseIsic(const ComplexMatrix& h, const ComplexVector& y, DetectorConfig config);

  Estimate estimate(std::size_t n) override;

  /// G <- G - z (G[j,:]) / (z(j) + 1), z = (v_new - v_old) G W[:,j].
  void update_g(std::size_t j, double v_old, double v_new);

  [[nodiscard]] const ComplexMatrix& g() const noexcept { return g_; }
  [[nodiscard]] const HermitianMatrix& w() const noexcept { return w_; }
  [[nodiscard]] std::size_t matrix_memory_units() const noexcept override;

  /// Applies a deferred G update, if any, so g() matches the current variances.
  void flush();

 protected:
  void on_commit(std::size_t n, Complex, double old_variance, Complex, double) override;

 private:
  struct Pending {
    std::size_t index;
    double old_variance;
  };

  ComplexMatrix h_;
  ComplexVector y_;
  HermitianMatrix w_;
  ComplexMatrix g_;
  std::optional<Pending> pending_;
};

/// Recursive low-complexity scheme. Works only on the Hermitian inverse
/// Q = (H~^H H~ + sigma2 I)^-1 of the equivalent channel H~ = H sqrt(V) and the
/// symbol estimate vector t~ = sqrt(V^-1) Q H~^H (y - H x-bar); the channel
/// itself is not kept after construction.
///
/// Alongside Q the detector tracks d = 1 - sigma2 diag(Q). When a variance
/// saturates at its floor, Q(n,n) approaches 1/sigma2 and forming 1 - sigma2 Q(n,n)
/// by subtraction would lose every significant digit; d is updated
/// multiplicatively instead, and every denominator is assembled from
/// non-negative terms.
class RecursiveIsic final : public IsicDetector {
 public:
  RecursiveIsic(const ComplexMatrix& h, const ComplexVector& y, DetectorConfig config);

  /// Pure read of Q(n,n), t~(n), x-bar_n and v_n.
  Estimate estimate(std::size_t n) override;

  /// t~ update for a change of symbol n. Must run before update_inverse for
  /// the same change since it reads the pre-update column n of Q.
  void update_symbol_estimates(std::size_t n, Complex old_soft, double old_variance, Complex new_soft,
                               double new_variance);

  /// Q update for a change of v_n: rank-1 correction of the block without
  /// row/column n, rescaled column n, new diagonal entry.
  void update_inverse(std::size_t n, double old_variance, double new_variance);

  [[nodiscard]] const HermitianMatrix& inverse() const noexcept { return q_; }
  [[nodiscard]] const ComplexVector& symbol_estimates() const noexcept { return t_; }
  [[nodiscard]] std::span<const double> diagonal_complement() const noexcept { return d_; }
  [[nodiscard]] std::size_t matrix_memory_units() const noexcept override { return q_.memory_units(); }

 protected:
  void on_commit(std::size_t n, Complex old_soft, double old_variance, Complex new_soft,
                 double new_variance) override;

 private:
  [[nodiscard]] double transition_denominator(std::size_t n, double old_variance, double new_variance) const;

  HermitianMatrix q_;
  ComplexVector t_;
  std::vector<double> d_;
};

// ---- Recursive hard-decision ordered successive interference cancellation ----

/// Grows (H_{n-1}^H H_{n-1} + sigma2 I)^-1 by one column using the inverse of
/// a partitioned matrix: r = H_{n-1}^H h_n, gamma = h_n^H h_n + sigma2.
/// Throws SingularMatrix if the Schur complement is not positive.
HermitianMatrix expand_inverse(const HermitianMatrix& previous, std::span<const Complex> r, double gamma);

/// Removes column k from the inverse: Q_{n-1} = Q[-k,-k] - q q^H / Q(k,k).
/// Throws PositiveDefinitenessLost if Q(k,k) <= 0.
HermitianMatrix deflate_inverse(const HermitianMatrix& q, std::size_t k);

enum class LayerOrder {
  MaxSnr,   // pick the undetected layer with the smallest Q(k,k)
  Natural,  // lowest undetected index first
};

struct HdOsicStep {
  std::size_t index = 0;  // original layer index
  Complex estimate;
  double bias = 0.0;
  int decision = 0;
};

class RecursiveHdOsic {
 public:
  RecursiveHdOsic(const ComplexMatrix& h, const ComplexVector& y, DetectorConfig config,
                  LayerOrder order = LayerOrder::MaxSnr);

  /// Detects every layer; returns constellation indices by original layer index.
  std::vector<int> run(std::vector<HdOsicStep>* trace = nullptr);

  [[nodiscard]] const HermitianMatrix& inverse() const noexcept { return q_; }
  [[nodiscard]] std::size_t matrix_memory_units() const noexcept { return q_.memory_units(); }

 private:
  DetectorConfig config_;
  LayerOrder order_;
  HermitianMatrix q_;
  ComplexVector t_;
};

struct DetectionResult {
  std::vector<int> indices;  // hard decisions, constellation indices
  std::vector<ProcedureTrace> trace;
};

DetectionResult detect(Scheme scheme, const ComplexMatrix& h, const ComplexVector& y, const DetectorConfig& config,
                       bool keep_trace = false);

}  // namespace isic
