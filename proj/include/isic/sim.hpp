#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "isic/constellation.hpp"
#include "isic/detectors.hpp"
#include "isic/flops.hpp"
#include "isic/linalg.hpp"

namespace isic {

/// Per-trial random stream. Normal deviates come from an explicit Box-Muller
/// step on 53-bit uniforms so draws do not depend on the standard library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }
  /// Uniform on (0, 1].
  double uniform();
  /// Circular complex Gaussian with E|z|^2 = 1.
  Complex complex_normal();

 private:
  std::mt19937_64 engine_;
};

/// Seed of the stream for trial `trial` under `master`.
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t trial) noexcept;

/// M x N matrix of i.i.d. unit-variance circular Gaussian entries.
ComplexMatrix gen_channel(std::size_t m, std::size_t n, Rng& rng);

/// Length-M vector of i.i.d. circular Gaussian entries with variance sigma2.
ComplexVector gen_noise(std::size_t m, double sigma2, Rng& rng);

/// sigma2 = N / 10^(snr_db/10): the receive SNR per antenna is N / sigma2 for
/// unit-energy symbols and unit-variance channel entries.
double snr_to_sigma2(double snr_db, std::size_t n) noexcept;

struct ChannelInstance {
  ComplexMatrix h;
  ComplexVector x;
  std::vector<std::uint8_t> bits;
  ComplexVector noise;  // unit variance; scaled by sqrt(sigma2) when forming y
  ComplexVector y;
  double sigma2 = 1.0;

  /// Recomputes y = H x + sqrt(sigma2) * noise for a new noise level.
  void set_sigma2(double s2);
};

/// Draws bits, symbols, channel and unit-variance noise, in that order, from
/// one stream, then forms y for `sigma2`.
ChannelInstance make_instance(std::size_t n, std::size_t m, const Constellation& c, double sigma2, Rng& rng);

struct TrialResult {
  std::uint64_t bits = 0;
  std::uint64_t bit_errors = 0;
  bool failed = false;
  std::string error;  // message of the detector exception when failed
};

/// One detection on a prepared instance. A detector exception marks the trial
/// failed and bills every bit as an error rather than propagating.
TrialResult run_trial(Scheme scheme, const ChannelInstance& instance, const DetectorConfig& config);

/// Instance built from stream_seed(master_seed, trial), then run_trial.
TrialResult run_trial(Scheme scheme, std::size_t n, std::size_t m, int iterations, const Constellation& c,
                      double snr_db, std::uint64_t master_seed, std::uint64_t trial);

struct BerRecord {
  std::string scheme;
  std::size_t n = 0;
  std::size_t m = 0;
  int order = 4;
  int iterations = 0;
  double snr_db = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t bits = 0;
  std::uint64_t bit_errors = 0;
  double ber = 0.0;
  std::uint64_t failures = 0;
  double flops_init = 0.0;
  double flops_per_iter = 0.0;

  friend bool operator==(const BerRecord&, const BerRecord&) = default;
};

struct SweepConfig {
  std::vector<Scheme> schemes;
  std::size_t n = 16;
  std::size_t m = 16;
  int order = 4;
  int iterations = 3;
  std::vector<double> snr_db;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Every trial draws one instance from its own stream and reuses it across
/// SNR points (only the noise scale changes) and schemes. Counts are reduced
/// in trial order, so the records do not depend on the thread count.
/// Records are ordered by scheme as given, then by SNR.
std::vector<BerRecord> run_sweep(const SweepConfig& config);

struct FlopReport {
  flops::FlopCounter init;
  flops::FlopCounter per_iteration;  // average over the K iterations, rounded down
  double per_iteration_flops = 0.0;  // exact average in flops
};

/// Runs the instrumented detector once on a random instance at 10 dB. For
/// hdosic the single detection pass is reported as one iteration.
FlopReport count_flops(Scheme scheme, std::size_t n, std::size_t m, int iterations, int order,
                       std::uint64_t seed = 1);

struct MemoryReport {
  Scheme scheme = Scheme::Recursive;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t matrix_units = 0;  // read off the detector's matrices
  std::size_t expected = 0;      // closed form
};

/// Closed-form matrix memory: conv 2MN + M^2, alg1 3N^2 + 2MN, alg2 and hdosic N^2.
std::size_t expected_memory_units(Scheme scheme, std::size_t n, std::size_t m) noexcept;

/// Builds the detector and audits its held matrices against the closed form.
/// Throws InternalConsistencyError on a mismatch.
MemoryReport report_memory(Scheme scheme, std::size_t n, std::size_t m);

}  // namespace isic
