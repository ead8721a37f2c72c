#include <string>

#include "isic/detectors.hpp"
#include "isic/errors.hpp"

namespace isic {

std::string_view scheme_name(Scheme s) noexcept {
  switch (s) {
    case Scheme::Conventional: return "conv";
    case Scheme::Ammse: return "alg1";
    case Scheme::Recursive: return "alg2";
    case Scheme::HdOsic: return "hdosic";
  }
  return "?";
}

std::optional<Scheme> parse_scheme(std::string_view name) noexcept {
  for (Scheme s : {Scheme::Conventional, Scheme::Ammse, Scheme::Recursive, Scheme::HdOsic}) {
    if (scheme_name(s) == name) return s;
  }
  return std::nullopt;
}

void DetectorConfig::validate() const {
  if (n < 1) throw InvalidArgument("N must be >= 1");
  if (m < n) throw InvalidArgument("M must be >= N");
  if (iterations < 1) throw InvalidArgument("K must be >= 1");
  if (!(sigma2 > 0.0)) throw InvalidArgument("sigma2 must be > 0");
}

IsicDetector::IsicDetector(DetectorConfig config)
    : config_(std::move(config)), shared_(config_.n, config_.constellation.order()) {
  config_.validate();
}

void IsicDetector::commit(std::size_t n, Complex soft, double variance) {
  const Complex old_soft = shared_.soft[n];
  const double old_variance = shared_.variance[n];
  const double new_variance = DiagonalVariance::clamp(variance);
  on_commit(n, old_soft, old_variance, soft, new_variance);
  shared_.soft[n] = soft;
  shared_.variance.set(n, new_variance);
}

ProcedureTrace IsicDetector::procedure(std::size_t n) {
  const Estimate e = estimate(n);
  const auto order = static_cast<std::size_t>(config_.constellation.order());
  std::span<double> posterior(shared_.posterior.data() + n * order, order);
  const SoftStats s = soft_statistics(e.value, e.bias, config_.constellation, posterior);
  shared_.hard[n] = s.hard_index;
  commit(n, s.soft_decision, s.residual_variance);
  return {iteration_, n, e.value, e.bias, s.soft_decision, shared_.variance[n]};
}

void IsicDetector::iterate(std::vector<ProcedureTrace>* trace) {
  for (std::size_t n = 0; n < config_.n; ++n) {
    const ProcedureTrace t = procedure(n);
    if (trace) trace->push_back(t);
  }
  ++iteration_;
}

std::vector<int> IsicDetector::run(std::vector<ProcedureTrace>* trace) {
  for (int k = 0; k < config_.iterations; ++k) iterate(trace);
  return shared_.hard;
}

DetectionResult detect(Scheme scheme, const ComplexMatrix& h, const ComplexVector& y, const DetectorConfig& config,
                       bool keep_trace) {
  DetectionResult result;
  auto* trace = keep_trace ? &result.trace : nullptr;
  switch (scheme) {
    case Scheme::Conventional: result.indices = ConventionalIsic(h, y, config).run(trace); break;
    case Scheme::Ammse: result.indices = AmmseIsic(h, y, config).run(trace); break;
    case Scheme::Recursive: result.indices = RecursiveIsic(h, y, config).run(trace); break;
    case Scheme::HdOsic: result.indices = RecursiveHdOsic(h, y, config).run(); break;
  }
  return result;
}

}  // namespace isic
