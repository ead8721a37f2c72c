#include "isic/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "isic/errors.hpp"

namespace isic::cli {

namespace {

constexpr const char* kHeader = "scheme,N,M,mod,K,snr_db,trials,bits,bit_errors,ber,flops_init,flops_per_iter";
constexpr const char* kConvention = "# snr_convention=N/sigma2";

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) parts.push_back(item);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

double parse_real(const std::string& text, const char* what) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw InvalidArgument(std::string("invalid ") + what + " '" + text + "'");
  }
  return value;
}

template <typename T>
T parse_integer(const std::string& text, const char* what) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw InvalidArgument(std::string("invalid ") + what + " '" + text + "'");
  }
  return value;
}

std::vector<Scheme> parse_schemes(const std::string& text) {
  std::vector<Scheme> schemes;
  for (const auto& name : split(text, ',')) {
    const auto s = parse_scheme(name);
    if (!s) throw InvalidArgument("--scheme: unknown scheme '" + name + "' (expected conv, alg1, alg2, hdosic)");
    if (std::find(schemes.begin(), schemes.end(), *s) == schemes.end()) schemes.push_back(*s);
  }
  if (schemes.empty()) throw InvalidArgument("--scheme: no scheme given");
  return schemes;
}

std::vector<std::pair<std::size_t, std::size_t>> parse_sizes(const std::string& text) {
  std::vector<std::pair<std::size_t, std::size_t>> sizes;
  for (const auto& item : split(text, ',')) {
    const auto x = item.find('x');
    const auto n = parse_integer<std::size_t>(item.substr(0, x), "--flop-sizes entry");
    const auto m = x == std::string::npos ? n : parse_integer<std::size_t>(item.substr(x + 1), "--flop-sizes entry");
    if (n < 1) throw InvalidArgument("--flop-sizes: N must be >= 1");
    if (m < n) throw InvalidArgument("--flop-sizes: M must be >= N in '" + item + "'");
    sizes.emplace_back(n, m);
  }
  if (sizes.empty()) throw InvalidArgument("--flop-sizes: no size given");
  return sizes;
}

std::string modulation_name(int order) { return std::to_string(order) + "qam"; }

}  // namespace

int parse_modulation(const std::string& text) {
  std::string digits = text;
  if (digits.size() > 3 && digits.compare(digits.size() - 3, 3, "qam") == 0) digits.resize(digits.size() - 3);
  int order = 0;
  const char* end = digits.data() + digits.size();
  const auto [ptr, ec] = std::from_chars(digits.data(), end, order);
  if (digits.empty() || ec != std::errc() || ptr != end) {
    throw InvalidArgument("--mod: cannot parse '" + text + "' (supported: 4qam, 16qam, 64qam)");
  }
  if (order != 4 && order != 16 && order != 64) {
    throw InvalidArgument("--mod: unsupported constellation order " + std::to_string(order) +
                          " (supported: 4, 16, 64)");
  }
  return order;
}

std::vector<double> snr_grid(double start, double step, double stop) {
  if (!(step > 0.0)) throw InvalidArgument("--snr: step must be > 0");
  if (stop < start) throw InvalidArgument("--snr: empty SNR grid (stop < start)");
  const double span = (stop - start) / step;
  const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = start + static_cast<double>(i) * step;
  return grid;
}

std::vector<double> parse_snr_grid(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() == 1) return {parse_real(parts[0], "--snr value")};
  if (parts.size() != 3) throw InvalidArgument("--snr: expected start:step:stop, got '" + text + "'");
  return snr_grid(parse_real(parts[0], "--snr start"), parse_real(parts[1], "--snr step"),
                  parse_real(parts[2], "--snr stop"));
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

ParseResult parse_args(int argc, const char* const* argv) {
  ParseResult result;
  ExperimentConfig cfg;
  std::string mod = "4qam";
  std::string snr = "0:2:20";
  std::string schemes = "alg1,alg2";
  std::string sizes;
  std::string plot;
  long long n = static_cast<long long>(cfg.n);
  long long m = static_cast<long long>(cfg.m);
  long long trials = static_cast<long long>(cfg.trials);

  CLI::App app{"Monte-Carlo BER and complexity study of LMMSE-ISIC MIMO detectors", "isic_sim"};
  app.set_version_flag("--version", kVersion);
  app.add_option("--n", n, "transmit streams N")->capture_default_str();
  app.add_option("--m", m, "receive antennas M (>= N)")->capture_default_str();
  app.add_option("--mod", mod, "constellation: 4qam, 16qam or 64qam")->capture_default_str();
  app.add_option("--iters", cfg.iterations, "ISIC iterations K")->capture_default_str();
  app.add_option("--snr", snr, "SNR grid in dB, start:step:stop (stop inclusive)")->capture_default_str();
  app.add_option("--trials", trials, "channel realizations per SNR point")->capture_default_str();
  app.add_option("--seed", cfg.seed, "master seed")->capture_default_str();
  app.add_option("--scheme", schemes, "comma-separated subset of conv, alg1, alg2, hdosic")->capture_default_str();
  app.add_option("--out", cfg.out_path, "CSV output path, - for stdout")->capture_default_str();
  app.add_option("--plot", plot, "write <base>_ber.svg and <base>_flops.svg");
  app.add_flag("--count-flops", cfg.count_flops, "fill the flop columns of BER records");
  app.add_option("--flop-sizes", sizes,
                 "flop-count mode: comma-separated N or NxM sizes (M defaults to N); skips the BER sweep");
  app.footer("Environment: ISIC_THREADS sets the worker thread count (default: available cores).\n"
             "SNR convention: sigma2 = N / 10^(snr/10).\n"
             "Exit codes: 0 success, 1 I/O failure, 2 usage error.");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream out, err;
    const int code = app.exit(e, out, err);
    result.exit_code = code == 0 ? kExitOk : kExitUsage;
    result.message = code == 0 ? out.str() : err.str();
    if (result.message.empty()) result.message = e.what();
    return result;
  }

  try {
    if (n < 1) throw InvalidArgument("--n: N must be >= 1");
    if (m < n) throw InvalidArgument("M must be >= N (got N=" + std::to_string(n) + ", M=" + std::to_string(m) + ")");
    if (cfg.iterations < 1) throw InvalidArgument("--iters: K must be >= 1");
    if (trials < 1) throw InvalidArgument("--trials: must be >= 1");
    cfg.n = static_cast<std::size_t>(n);
    cfg.m = static_cast<std::size_t>(m);
    cfg.trials = static_cast<std::uint64_t>(trials);
    cfg.order = parse_modulation(mod);
    const auto grid = parse_snr_grid(snr);
    if (const auto parts = split(snr, ':'); parts.size() == 3) {
      cfg.snr_start = parse_real(parts[0], "--snr start");
      cfg.snr_step = parse_real(parts[1], "--snr step");
      cfg.snr_stop = parse_real(parts[2], "--snr stop");
    } else {
      cfg.snr_start = cfg.snr_stop = grid.front();
      cfg.snr_step = 1.0;
    }
    cfg.schemes = parse_schemes(schemes);
    if (!sizes.empty()) cfg.flop_sizes = parse_sizes(sizes);
    if (!plot.empty()) cfg.plot_path = plot;
    if (cfg.out_path.empty()) throw InvalidArgument("--out: empty path");
  } catch (const InvalidArgument& e) {
    result.exit_code = kExitUsage;
    result.message = std::string("error: ") + e.what() + "\nRun with --help for more information.\n";
    return result;
  }
  result.config = cfg;
  return result;
}

void write_csv(std::vector<BerRecord> records, std::ostream& out) {
  std::stable_sort(records.begin(), records.end(), [](const BerRecord& a, const BerRecord& b) {
    if (a.scheme != b.scheme) return a.scheme < b.scheme;
    return a.snr_db < b.snr_db;
  });
  out << kConvention << '\n' << kHeader << '\n';
  for (const auto& r : records) {
    out << r.scheme << ',' << r.n << ',' << r.m << ',' << modulation_name(r.order) << ',' << r.iterations << ','
        << format_double(r.snr_db) << ',' << r.trials << ',' << r.bits << ',' << r.bit_errors << ','
        << format_double(r.ber) << ',' << format_double(r.flops_init) << ',' << format_double(r.flops_per_iter)
        << '\n';
  }
}

void emit_csv(const std::vector<BerRecord>& records, const std::string& path) {
  if (path == "-") {
    write_csv(records, std::cout);
    std::cout.flush();
    if (!std::cout) throw IoError("failed writing CSV to stdout");
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  write_csv(records, file);
  file.close();
  if (!file) throw IoError("failed writing '" + path + "'");
}

std::vector<BerRecord> read_csv(std::istream& in) {
  std::vector<BerRecord> records;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != kHeader) throw InvalidArgument("read_csv: unexpected header '" + line + "'");
      header = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 12) throw InvalidArgument("read_csv: expected 12 fields in '" + line + "'");
    BerRecord r;
    r.scheme = f[0];
    r.n = parse_integer<std::size_t>(f[1], "N");
    r.m = parse_integer<std::size_t>(f[2], "M");
    r.order = parse_modulation(f[3]);
    r.iterations = parse_integer<int>(f[4], "K");
    r.snr_db = parse_real(f[5], "snr_db");
    r.trials = parse_integer<std::uint64_t>(f[6], "trials");
    r.bits = parse_integer<std::uint64_t>(f[7], "bits");
    r.bit_errors = parse_integer<std::uint64_t>(f[8], "bit_errors");
    r.ber = parse_real(f[9], "ber");
    r.flops_init = parse_real(f[10], "flops_init");
    r.flops_per_iter = parse_real(f[11], "flops_per_iter");
    records.push_back(std::move(r));
  }
  if (!header) throw InvalidArgument("read_csv: missing header");
  return records;
}

std::vector<BerRecord> run_experiment(const ExperimentConfig& config) {
  std::vector<BerRecord> records;
  if (!config.flop_sizes.empty()) {
    for (const auto& [n, m] : config.flop_sizes) {
      for (Scheme s : config.schemes) {
        const FlopReport f = count_flops(s, n, m, config.iterations, config.order, config.seed);
        BerRecord r;
        r.scheme = std::string(scheme_name(s));
        r.n = n;
        r.m = m;
        r.order = config.order;
        r.iterations = config.iterations;
        r.snr_db = 10.0;  // count_flops instance
        r.flops_init = static_cast<double>(f.init.flops());
        r.flops_per_iter = f.per_iteration_flops;
        records.push_back(std::move(r));
      }
    }
    return records;
  }

  SweepConfig sweep;
  sweep.schemes = config.schemes;
  sweep.n = config.n;
  sweep.m = config.m;
  sweep.order = config.order;
  sweep.iterations = config.iterations;
  sweep.snr_db = snr_grid(config.snr_start, config.snr_step, config.snr_stop);
  sweep.trials = config.trials;
  sweep.seed = config.seed;
  sweep.threads = config.threads;
  records = run_sweep(sweep);

  if (config.count_flops) {
    for (Scheme s : config.schemes) {
      const FlopReport f = count_flops(s, config.n, config.m, config.iterations, config.order, config.seed);
      for (auto& r : records) {
        if (r.scheme != scheme_name(s)) continue;
        r.flops_init = static_cast<double>(f.init.flops());
        r.flops_per_iter = f.per_iteration_flops;
      }
    }
  }
  return records;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  ParseResult parsed = parse_args(argc, argv);
  if (!parsed.config) {
    (parsed.exit_code == kExitOk ? out : err) << parsed.message;
    return parsed.exit_code;
  }
  ExperimentConfig& cfg = *parsed.config;

  if (const char* env = std::getenv("ISIC_THREADS"); env && *env) {
    try {
      const auto t = parse_integer<unsigned>(env, "ISIC_THREADS");
      if (t < 1) throw InvalidArgument("ISIC_THREADS must be >= 1");
      cfg.threads = t;
    } catch (const InvalidArgument& e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    }
  }

  std::vector<BerRecord> records;
  try {
    records = run_experiment(cfg);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  for (const auto& r : records) {
    if (r.failures > 0) {
      err << "warning: " << r.failures << " of " << r.trials << " trials failed for " << r.scheme << " at "
          << format_double(r.snr_db) << " dB (their bits are counted as errors)\n";
    }
  }

  try {
    emit_csv(records, cfg.out_path);
    if (cfg.plot_path) {
      const PlotOutcome plots = emit_plots(records, *cfg.plot_path);
      for (const auto& w : plots.warnings) err << "warning: " << w << '\n';
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace isic::cli
