#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "isic/cli.hpp"

namespace isic::cli {

namespace {

struct Series {
  std::string label;
  std::string scheme;
  std::vector<std::pair<double, double>> points;  // (x, y), y > 0 on log axes
};

struct Panel {
  double x0, y0, width, height;  // plot area in SVG units
  double xmin, xmax;
  double ymin, ymax;  // log10 range when log_y
  bool log_y;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

const char* color_for(const std::string& scheme, std::size_t fallback) {
  if (scheme == "conv") return "#222222";
  if (scheme == "alg1") return "#1f77b4";
  if (scheme == "alg2") return "#ff7f0e";
  if (scheme == "hdosic") return "#2ca02c";
  static const char* extra[] = {"#9467bd", "#8c564b", "#e377c2", "#17becf"};
  return extra[fallback % 4];
}

double px(const Panel& p, double x) {
  const double span = p.xmax > p.xmin ? p.xmax - p.xmin : 1.0;
  return p.x0 + (x - p.xmin) / span * p.width;
}

double py(const Panel& p, double y) {
  const double v = p.log_y ? std::log10(y) : y;
  const double span = p.ymax > p.ymin ? p.ymax - p.ymin : 1.0;
  return p.y0 + p.height - (v - p.ymin) / span * p.height;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void draw_axes(std::ostringstream& svg, const Panel& p, const std::vector<double>& xticks, const std::string& title,
               const std::string& xlabel, const std::string& ylabel) {
  svg << "<rect x=\"" << num(p.x0) << "\" y=\"" << num(p.y0) << "\" width=\"" << num(p.width) << "\" height=\""
      << num(p.height) << "\" fill=\"none\" stroke=\"#000\"/>\n";
  for (double x : xticks) {
    const double X = px(p, x);
    svg << "<line x1=\"" << num(X) << "\" y1=\"" << num(p.y0) << "\" x2=\"" << num(X) << "\" y2=\""
        << num(p.y0 + p.height) << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << num(X) << "\" y=\"" << num(p.y0 + p.height + 16)
        << "\" text-anchor=\"middle\" font-size=\"11\">" << tick_label(x) << "</text>\n";
  }
  if (p.log_y) {
    for (int e = static_cast<int>(p.ymin); e <= static_cast<int>(p.ymax); ++e) {
      const double Y = py(p, std::pow(10.0, e));
      svg << "<line x1=\"" << num(p.x0) << "\" y1=\"" << num(Y) << "\" x2=\"" << num(p.x0 + p.width) << "\" y2=\""
          << num(Y) << "\" stroke=\"#ddd\"/>\n";
      svg << "<text x=\"" << num(p.x0 - 6) << "\" y=\"" << num(Y + 4)
          << "\" text-anchor=\"end\" font-size=\"11\">1e" << e << "</text>\n";
    }
  } else {
    const double step = std::max(1.0, std::ceil((p.ymax - p.ymin) / 6.0));
    for (double v = std::ceil(p.ymin); v <= p.ymax + 1e-9; v += step) {
      const double Y = py(p, v);
      svg << "<line x1=\"" << num(p.x0) << "\" y1=\"" << num(Y) << "\" x2=\"" << num(p.x0 + p.width) << "\" y2=\""
          << num(Y) << "\" stroke=\"#ddd\"/>\n";
      svg << "<text x=\"" << num(p.x0 - 6) << "\" y=\"" << num(Y + 4)
          << "\" text-anchor=\"end\" font-size=\"11\">" << tick_label(v) << "</text>\n";
    }
  }
  svg << "<text x=\"" << num(p.x0 + p.width / 2) << "\" y=\"" << num(p.y0 - 10)
      << "\" text-anchor=\"middle\" font-size=\"14\">" << escape(title) << "</text>\n";
  svg << "<text x=\"" << num(p.x0 + p.width / 2) << "\" y=\"" << num(p.y0 + p.height + 36)
      << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(xlabel) << "</text>\n";
  const double lx = p.x0 - 48;
  const double ly = p.y0 + p.height / 2;
  svg << "<text x=\"" << num(lx) << "\" y=\"" << num(ly) << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 "
      << num(lx) << ' ' << num(ly) << ")\">" << escape(ylabel) << "</text>\n";
}

void draw_series(std::ostringstream& svg, const Panel& p, const std::vector<Series>& series) {
  for (std::size_t i = 0; i < series.size(); ++i) {
    const Series& s = series[i];
    const char* color = color_for(s.scheme, i);
    // alg2 dashed and thinner so it stays visible on top of an identical alg1 curve.
    const bool dashed = s.scheme == "alg2";
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << (dashed ? "1.5" : "2.5") << "\""
        << (dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
    for (const auto& [x, y] : s.points) svg << num(px(p, x)) << ',' << num(py(p, y)) << ' ';
    svg << "\"/>\n";
    for (const auto& [x, y] : s.points) {
      svg << "<circle cx=\"" << num(px(p, x)) << "\" cy=\"" << num(py(p, y)) << "\" r=\"2.5\" fill=\"" << color
          << "\"/>\n";
    }
    const double ly = p.y0 + 14 + 16 * static_cast<double>(i);
    const double lx = p.x0 + p.width - 170;
    svg << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(lx + 24) << "\" y2=\""
        << num(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\""
        << (dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
    svg << "<text x=\"" << num(lx + 30) << "\" y=\"" << num(ly) << "\" font-size=\"11\">" << escape(s.label)
        << "</text>\n";
  }
}

Panel fit(double x0, double y0, double width, double height, const std::vector<Series>& series, bool log_y) {
  Panel p{x0, y0, width, height, 0, 0, 0, 0, log_y};
  bool first = true;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      const double v = log_y ? std::log10(y) : y;
      if (first) {
        p.xmin = p.xmax = x;
        p.ymin = p.ymax = v;
        first = false;
      }
      p.xmin = std::min(p.xmin, x);
      p.xmax = std::max(p.xmax, x);
      p.ymin = std::min(p.ymin, v);
      p.ymax = std::max(p.ymax, v);
    }
  }
  if (log_y) {
    p.ymin = std::floor(p.ymin);
    p.ymax = std::max(std::ceil(p.ymax), p.ymin + 1);
  } else {
    p.ymin = std::min(0.0, std::floor(p.ymin));
    p.ymax = std::ceil(p.ymax * 1.1);
  }
  return p;
}

std::vector<double> distinct_x(const std::vector<Series>& series) {
  std::vector<double> xs;
  for (const auto& s : series)
    for (const auto& pt : s.points) xs.push_back(pt.first);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

std::string open_svg(double width, double height) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         num(width) + "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(width) + ' ' + num(height) +
         "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
}

std::vector<Series> ber_series(const std::vector<BerRecord>& records) {
  using Key = std::tuple<std::string, std::size_t, std::size_t, int, int>;
  std::map<Key, Series> groups;
  for (const auto& r : records) {
    if (r.trials == 0 || !(r.ber > 0.0)) continue;
    Key key{r.scheme, r.n, r.m, r.order, r.iterations};
    Series& s = groups[key];
    if (s.label.empty()) {
      s.scheme = r.scheme;
      s.label = r.scheme + " K=" + std::to_string(r.iterations) + " " + std::to_string(r.n) + "x" +
                std::to_string(r.m) + " " + std::to_string(r.order) + "qam";
    }
    s.points.emplace_back(r.snr_db, r.ber);
  }
  std::vector<Series> out;
  for (auto& [key, s] : groups) {
    std::sort(s.points.begin(), s.points.end());
    if (s.points.size() >= 2) out.push_back(std::move(s));
  }
  return out;
}

struct FlopPoint {
  double init = 0;
  double per_iter = 0;
  int iterations = 0;
};

// scheme -> (N, M) -> counts
using FlopTable = std::map<std::string, std::map<std::pair<std::size_t, std::size_t>, FlopPoint>>;

FlopTable flop_table(const std::vector<BerRecord>& records) {
  FlopTable table;
  for (const auto& r : records) {
    if (!(r.flops_per_iter > 0.0)) continue;
    table[r.scheme][{r.n, r.m}] = {r.flops_init, r.flops_per_iter, r.iterations};
  }
  return table;
}

bool enough_sizes(const FlopTable& table) {
  for (const auto& [scheme, sizes] : table) {
    std::vector<std::size_t> ns;
    for (const auto& [nm, f] : sizes) ns.push_back(nm.first);
    std::sort(ns.begin(), ns.end());
    if (std::unique(ns.begin(), ns.end()) - ns.begin() >= 2) return true;
  }
  return false;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  file << content;
  file.close();
  if (!file) throw IoError("failed writing '" + path + "'");
}

}  // namespace

std::string render_ber_svg(const std::vector<BerRecord>& records) {
  const auto series = ber_series(records);
  if (series.empty()) return {};
  std::ostringstream svg;
  svg << open_svg(720, 480);
  const Panel p = fit(80, 40, 600, 380, series, true);
  draw_axes(svg, p, distinct_x(series), "Uncoded BER", "SNR (dB), sigma2 = N / 10^(SNR/10)", "BER");
  draw_series(svg, p, series);
  svg << "</svg>\n";
  return svg.str();
}

std::string render_flops_svg(const std::vector<BerRecord>& records) {
  const FlopTable table = flop_table(records);
  if (!enough_sizes(table)) return {};

  std::vector<Series> counts;
  for (const auto& [scheme, sizes] : table) {
    Series s{scheme + " per iteration", scheme, {}};
    for (const auto& [nm, f] : sizes) s.points.emplace_back(static_cast<double>(nm.first), f.per_iter);
    if (s.points.size() >= 2) counts.push_back(std::move(s));
  }

  std::vector<Series> speedup;
  const auto a1 = table.find("alg1");
  const auto a2 = table.find("alg2");
  if (a1 != table.end() && a2 != table.end()) {
    Series per{"alg1/alg2 per iteration", "alg1", {}};
    Series total{"alg1/alg2 incl. init", "alg2", {}};
    for (const auto& [nm, f1] : a1->second) {
      const auto it = a2->second.find(nm);
      if (it == a2->second.end()) continue;
      const FlopPoint& f2 = it->second;
      const double k = f1.iterations;
      per.points.emplace_back(static_cast<double>(nm.first), f1.per_iter / f2.per_iter);
      total.points.emplace_back(static_cast<double>(nm.first),
                                (f1.init + k * f1.per_iter) / (f2.init + k * f2.per_iter));
    }
    if (per.points.size() >= 2) {
      speedup.push_back(std::move(per));
      speedup.push_back(std::move(total));
    }
  }

  const double width = speedup.empty() ? 720 : 1400;
  std::ostringstream svg;
  svg << open_svg(width, 480);
  const Panel left = fit(90, 40, 590, 380, counts, true);
  draw_axes(svg, left, distinct_x(counts), "Number of flops", "N", "flops");
  draw_series(svg, left, counts);
  if (!speedup.empty()) {
    const Panel right = fit(790, 40, 590, 380, speedup, false);
    draw_axes(svg, right, distinct_x(speedup), "Speedup in flops", "N", "alg1 / alg2");
    draw_series(svg, right, speedup);
  }
  svg << "</svg>\n";
  return svg.str();
}

PlotOutcome emit_plots(const std::vector<BerRecord>& records, const std::string& base) {
  PlotOutcome outcome;
  const std::string ber = render_ber_svg(records);
  if (ber.empty()) {
    if (std::any_of(records.begin(), records.end(), [](const BerRecord& r) { return r.trials > 0; })) {
      outcome.warnings.push_back("BER plot skipped: no curve has two SNR points with non-zero BER");
    }
  } else {
    write_file(base + "_ber.svg", ber);
    outcome.written.push_back(base + "_ber.svg");
  }
  const std::string fl = render_flops_svg(records);
  if (fl.empty()) {
    if (std::any_of(records.begin(), records.end(), [](const BerRecord& r) { return r.flops_per_iter > 0.0; })) {
      outcome.warnings.push_back("flop plot skipped: flop counts cover fewer than two sizes");
    }
  } else {
    write_file(base + "_flops.svg", fl);
    outcome.written.push_back(base + "_flops.svg");
  }
  if (outcome.written.empty() && outcome.warnings.empty()) {
    outcome.warnings.push_back("no plot written: need at least two SNR points or two sizes");
  }
  return outcome;
}

}  // namespace isic::cli
