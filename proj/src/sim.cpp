#include "isic/sim.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <thread>

#include "isic/errors.hpp"

namespace isic {

namespace {

std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::unique_ptr<IsicDetector> make_isic(Scheme scheme, const ComplexMatrix& h, const ComplexVector& y,
                                        const DetectorConfig& config) {
  switch (scheme) {
    case Scheme::Conventional: return std::make_unique<ConventionalIsic>(h, y, config);
    case Scheme::Ammse: return std::make_unique<AmmseIsic>(h, y, config);
    case Scheme::Recursive: return std::make_unique<RecursiveIsic>(h, y, config);
    case Scheme::HdOsic: break;
  }
  return nullptr;
}

}  // namespace

double Rng::uniform() {
  return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
}

Complex Rng::complex_normal() {
  // Box-Muller with radius sqrt(-ln u) so each component has variance 1/2.
  const double r = std::sqrt(-std::log(uniform()));
  const double phase = 2.0 * std::numbers::pi * uniform();
  return {r * std::cos(phase), r * std::sin(phase)};
}

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t trial) noexcept {
  return splitmix64(splitmix64(master) ^ splitmix64(trial + 0x632be59bd9b4e019ULL));
}

ComplexMatrix gen_channel(std::size_t m, std::size_t n, Rng& rng) {
  ComplexMatrix h(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) h(i, j) = rng.complex_normal();
  return h;
}

ComplexVector gen_noise(std::size_t m, double sigma2, Rng& rng) {
  if (!(sigma2 > 0.0)) throw InvalidArgument("gen_noise: sigma2 must be > 0");
  const double scale = std::sqrt(sigma2);
  ComplexVector w(m);
  for (auto& wi : w) wi = scale * rng.complex_normal();
  return w;
}

double snr_to_sigma2(double snr_db, std::size_t n) noexcept {
  return static_cast<double>(n) / std::pow(10.0, snr_db / 10.0);
}

void ChannelInstance::set_sigma2(double s2) {
  sigma2 = s2;
  const double scale = std::sqrt(s2);
  y = ComplexVector(h.rows());
  for (std::size_t i = 0; i < h.rows(); ++i) {
    Complex acc = 0.0;
    const auto row = h.row(i);
    for (std::size_t j = 0; j < h.cols(); ++j) acc += row[j] * x[j];
    y[i] = acc + scale * noise[i];
  }
}

ChannelInstance make_instance(std::size_t n, std::size_t m, const Constellation& c, double sigma2, Rng& rng) {
  ChannelInstance inst;
  const auto bps = static_cast<std::size_t>(c.bits_per_symbol());
  inst.bits.resize(n * bps);
  for (auto& b : inst.bits) b = static_cast<std::uint8_t>(rng.bits() >> 63);
  inst.x = symbols_from_bits(inst.bits, c);
  inst.h = gen_channel(m, n, rng);
  inst.noise = gen_noise(m, 1.0, rng);
  inst.set_sigma2(sigma2);
  return inst;
}

TrialResult run_trial(Scheme scheme, const ChannelInstance& instance, const DetectorConfig& config) {
  TrialResult result;
  result.bits = instance.bits.size();
  try {
    const DetectionResult d = detect(scheme, instance.h, instance.y, config);
    const auto decided = bits_from_hard_indices(d.indices, config.constellation);
    for (std::size_t i = 0; i < decided.size(); ++i) result.bit_errors += decided[i] != instance.bits[i];
  } catch (const NumericalError& e) {
    result.failed = true;
    result.error = e.what();
    result.bit_errors = result.bits;
  }
  return result;
}

TrialResult run_trial(Scheme scheme, std::size_t n, std::size_t m, int iterations, const Constellation& c,
                      double snr_db, std::uint64_t master_seed, std::uint64_t trial) {
  Rng rng(stream_seed(master_seed, trial));
  const double s2 = snr_to_sigma2(snr_db, n);
  const ChannelInstance inst = make_instance(n, m, c, s2, rng);
  return run_trial(scheme, inst, DetectorConfig{n, m, iterations, c, s2});
}

std::vector<BerRecord> run_sweep(const SweepConfig& config) {
  if (config.trials < 1) throw InvalidArgument("trials must be >= 1");
  if (config.schemes.empty()) throw InvalidArgument("no schemes requested");
  if (config.snr_db.empty()) throw InvalidArgument("empty SNR grid");
  const Constellation c(config.order);
  {
    DetectorConfig probe{config.n, config.m, config.iterations, c, 1.0};
    probe.validate();
  }

  const std::size_t cells = config.schemes.size() * config.snr_db.size();
  struct Tally {
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    std::uint64_t failures = 0;
  };

  unsigned threads = config.threads != 0 ? config.threads : std::thread::hardware_concurrency();
  if (threads == 0) threads = 1;
  if (threads > config.trials) threads = static_cast<unsigned>(config.trials);

  std::vector<double> sigma2(config.snr_db.size());
  for (std::size_t s = 0; s < sigma2.size(); ++s) sigma2[s] = snr_to_sigma2(config.snr_db[s], config.n);

  // Worker w owns trials w, w + T, w + 2T, ... and its own tallies.
  std::vector<std::vector<Tally>> partial(threads, std::vector<Tally>(cells));
  auto work = [&](unsigned w) {
    auto& tally = partial[w];
    for (std::uint64_t t = w; t < config.trials; t += threads) {
      Rng rng(stream_seed(config.seed, t));
      ChannelInstance inst = make_instance(config.n, config.m, c, sigma2[0], rng);
      for (std::size_t s = 0; s < sigma2.size(); ++s) {
        if (s != 0) inst.set_sigma2(sigma2[s]);
        const DetectorConfig dc{config.n, config.m, config.iterations, c, sigma2[s]};
        for (std::size_t k = 0; k < config.schemes.size(); ++k) {
          const TrialResult r = run_trial(config.schemes[k], inst, dc);
          Tally& cell = tally[k * sigma2.size() + s];
          cell.bits += r.bits;
          cell.errors += r.bit_errors;
          cell.failures += r.failed;
        }
      }
    }
  };

  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }

  std::vector<BerRecord> records;
  records.reserve(cells);
  for (std::size_t k = 0; k < config.schemes.size(); ++k) {
    for (std::size_t s = 0; s < config.snr_db.size(); ++s) {
      Tally total;
      for (const auto& p : partial) {
        total.bits += p[k * sigma2.size() + s].bits;
        total.errors += p[k * sigma2.size() + s].errors;
        total.failures += p[k * sigma2.size() + s].failures;
      }
      BerRecord rec;
      rec.scheme = std::string(scheme_name(config.schemes[k]));
      rec.n = config.n;
      rec.m = config.m;
      rec.order = config.order;
      rec.iterations = config.iterations;
      rec.snr_db = config.snr_db[s];
      rec.trials = config.trials;
      rec.bits = total.bits;
      rec.bit_errors = total.errors;
      rec.ber = total.bits ? static_cast<double>(total.errors) / static_cast<double>(total.bits) : 0.0;
      rec.failures = total.failures;
      records.push_back(std::move(rec));
    }
  }
  return records;
}

FlopReport count_flops(Scheme scheme, std::size_t n, std::size_t m, int iterations, int order, std::uint64_t seed) {
  const Constellation c(order);
  Rng rng(stream_seed(seed, 0));
  const double s2 = snr_to_sigma2(10.0, n);
  const ChannelInstance inst = make_instance(n, m, c, s2, rng);
  const DetectorConfig config{n, m, iterations, c, s2};
  config.validate();

  FlopReport report;
  flops::FlopCounter total;
  int passes = iterations;
  if (scheme == Scheme::HdOsic) {
    std::unique_ptr<RecursiveHdOsic> det;
    {
      flops::Scope scope(report.init);
      det = std::make_unique<RecursiveHdOsic>(inst.h, inst.y, config);
    }
    flops::Scope scope(total);
    det->run();
    passes = 1;
  } else {
    std::unique_ptr<IsicDetector> det;
    {
      flops::Scope scope(report.init);
      det = make_isic(scheme, inst.h, inst.y, config);
    }
    for (int k = 0; k < iterations; ++k) {
      flops::FlopCounter pass;
      {
        flops::Scope scope(pass);
        det->iterate();
      }
      total += pass;
    }
  }
  const auto p = static_cast<std::uint64_t>(passes);
  report.per_iteration = {total.cmul / p, total.cadd / p, total.rmul / p};
  report.per_iteration_flops = static_cast<double>(total.flops()) / static_cast<double>(passes);
  return report;
}

std::size_t expected_memory_units(Scheme scheme, std::size_t n, std::size_t m) noexcept {
  switch (scheme) {
    case Scheme::Conventional: return 2 * m * n + m * m;
    case Scheme::Ammse: return 3 * n * n + 2 * m * n;
    case Scheme::Recursive:
    case Scheme::HdOsic: return n * n;
  }
  return 0;
}

MemoryReport report_memory(Scheme scheme, std::size_t n, std::size_t m) {
  const Constellation c(4);
  Rng rng(stream_seed(1, 0));
  const double s2 = snr_to_sigma2(10.0, n);
  const ChannelInstance inst = make_instance(n, m, c, s2, rng);
  const DetectorConfig config{n, m, 1, c, s2};
  config.validate();

  MemoryReport report{scheme, n, m, 0, expected_memory_units(scheme, n, m)};
  if (scheme == Scheme::HdOsic) {
    report.matrix_units = RecursiveHdOsic(inst.h, inst.y, config).matrix_memory_units();
  } else {
    report.matrix_units = make_isic(scheme, inst.h, inst.y, config)->matrix_memory_units();
  }
  if (report.matrix_units != report.expected) {
    throw InternalConsistencyError("memory audit mismatch for " + std::string(scheme_name(scheme)) + ": held " +
                                   std::to_string(report.matrix_units) + ", expected " +
                                   std::to_string(report.expected));
  }
  return report;
}

}  // namespace isic
