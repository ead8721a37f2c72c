#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "isic/detectors.hpp"
#include "isic/sim.hpp"

namespace isic::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char* kVersion = "1.0.0";

struct ExperimentConfig {
  std::vector<Scheme> schemes{Scheme::Ammse, Scheme::Recursive};
  std::size_t n = 16;
  std::size_t m = 16;
  int order = 4;
  int iterations = 3;
  double snr_start = 0.0;
  double snr_step = 2.0;
  double snr_stop = 20.0;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  bool count_flops = false;
  // Non-empty switches to flop-count mode: one record per (scheme, size), no BER sweep.
  std::vector<std::pair<std::size_t, std::size_t>> flop_sizes;
  std::string out_path = "-";  // "-" is stdout
  std::optional<std::string> plot_path;
  unsigned threads = 0;
};

struct ParseResult {
  std::optional<ExperimentConfig> config;  // empty when the program should exit
  int exit_code = kExitOk;
  std::string message;  // help/version text, or the usage error
};

/// Parses and validates the command line. --help and --version produce
/// exit code 0 with the text in `message`; any other problem exit code 2.
ParseResult parse_args(int argc, const char* const* argv);

/// "4qam" -> 4 etc. Throws InvalidArgument listing the supported orders.
int parse_modulation(const std::string& text);

/// "start:step:stop", stop included when it lies on the grid within 1e-9.
/// Throws InvalidArgument on malformed text, step <= 0 or an empty grid.
std::vector<double> parse_snr_grid(const std::string& text);
std::vector<double> snr_grid(double start, double step, double stop);

/// 17 significant digits, enough for an exact round trip.
std::string format_double(double value);

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Comment line, header, then one row per record sorted stably by (scheme, snr_db).
void write_csv(std::vector<BerRecord> records, std::ostream& out);
/// Throws IoError when the file cannot be written; "-" writes to stdout.
void emit_csv(const std::vector<BerRecord>& records, const std::string& path);
/// Parses write_csv output. The failures field is not serialized and reads back as 0.
std::vector<BerRecord> read_csv(std::istream& in);

struct PlotOutcome {
  std::vector<std::string> written;
  std::vector<std::string> warnings;
};

/// Writes <base>_ber.svg when some curve has at least two SNR points with
/// non-zero BER, and <base>_flops.svg when flop counts cover at least two sizes.
/// Throws IoError when a file cannot be written.
PlotOutcome emit_plots(const std::vector<BerRecord>& records, const std::string& base);

std::string render_ber_svg(const std::vector<BerRecord>& records);
std::string render_flops_svg(const std::vector<BerRecord>& records);

/// Runs the configured experiment and returns its records.
std::vector<BerRecord> run_experiment(const ExperimentConfig& config);

/// Whole program: parse, run, write. Returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace isic::cli
