#include "cab/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "cab/numerics.hpp"

namespace cab::report {

namespace {

using experiments::SweepRecord;

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

template <typename T>
T parse_field(const std::string& s, std::size_t line_no) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError("csv line " + std::to_string(line_no) + ": bad field '" + s + "'");
  }
  return v;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

CsvMetadata metadata_for(const experiments::SweepConfig& config) {
  CsvMetadata meta;
  meta.preset = config.preset;
  meta.paper_trials = config.paper_trials;
  meta.trials_per_cell = config.trials_per_cell;
  meta.base_seed = config.base_seed;
  return meta;
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw std::runtime_error("format_number: conversion failed");
  return std::string(buf.data(), ptr);
}

void emit_csv(std::ostream& os, const std::vector<SweepRecord>& records, const CsvMetadata* meta) {
  if (meta != nullptr) {
    os << "# preset=" << meta->preset << '\n';
    os << "# paper_trials=" << meta->paper_trials << '\n';
    os << "# trials_per_cell=" << meta->trials_per_cell << '\n';
    os << "# base_seed=" << meta->base_seed << '\n';
  }
  os << kCsvHeader << '\n';
  for (const auto& r : records) {
    os << r.m << ',' << r.n << ',' << format_number(r.nu) << ',' << format_number(r.rho) << ',' << r.k1 << ','
       << r.k2 << ',' << experiments::to_string(r.method) << ',' << r.trials << ',' << r.successes << ','
       << format_number(r.success_frac()) << ',' << format_number(r.mean_solve_seconds) << ','
       << format_number(r.mean_iterations) << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const std::vector<SweepRecord>& records, const CsvMetadata* meta) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  emit_csv(os, records, meta);
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::vector<SweepRecord> parse_csv(std::istream& is) {
  std::vector<SweepRecord> out;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != kCsvHeader) throw FormatError("csv line " + std::to_string(line_no) + ": unexpected header");
      header = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 12) throw FormatError("csv line " + std::to_string(line_no) + ": expected 12 fields");
    SweepRecord r;
    r.m = parse_field<std::size_t>(f[0], line_no);
    r.n = parse_field<std::size_t>(f[1], line_no);
    r.nu = parse_field<double>(f[2], line_no);
    r.rho = parse_field<double>(f[3], line_no);
    r.k1 = parse_field<std::size_t>(f[4], line_no);
    r.k2 = parse_field<std::size_t>(f[5], line_no);
    try {
      r.method = experiments::method_from_string(f[6]);
    } catch (const std::invalid_argument& e) {
      throw FormatError("csv line " + std::to_string(line_no) + ": " + e.what());
    }
    r.trials = parse_field<std::size_t>(f[7], line_no);
    r.successes = parse_field<std::size_t>(f[8], line_no);
    r.mean_solve_seconds = parse_field<double>(f[10], line_no);
    r.mean_iterations = parse_field<double>(f[11], line_no);
    if (r.successes > r.trials) throw FormatError("csv line " + std::to_string(line_no) + ": successes > trials");
    out.push_back(r);
  }
  if (!header) throw FormatError("csv: missing header");
  return out;
}

std::vector<SweepRecord> read_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  try {
    return parse_csv(is);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string render_chart_svg(const std::vector<SweepRecord>& records, const ChartSpec& spec) {
  using Key = std::tuple<std::string, std::size_t, std::size_t, double>;
  std::map<Key, std::vector<std::pair<double, double>>> series;
  std::set<std::size_t> ms;
  std::set<std::size_t> ns;
  std::set<double> nus;
  std::set<std::string> methods;
  for (const auto& r : records) {
    if (r.trials == 0) continue;
    const std::string method(experiments::to_string(r.method));
    series[{method, r.m, r.n, r.nu}].emplace_back(r.rho, r.success_frac());
    ms.insert(r.m);
    ns.insert(r.n);
    nus.insert(r.nu);
    methods.insert(method);
  }

  constexpr double kLeft = 60.0;
  constexpr double kTop = 40.0;
  constexpr double kBottom = 50.0;
  constexpr double kLegend = 210.0;
  const double plot_w = std::max(spec.width - kLeft - kLegend, 100.0);
  const double plot_h = std::max(spec.height - kTop - kBottom, 100.0);
  const auto px = [&](double rho) { return kLeft + rho * plot_w; };
  const auto py = [&](double frac) { return kTop + (1.0 - frac) * plot_h; };
  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                            "#9467bd", "#8c564b", "#e377c2", "#17becf"};

  std::ostringstream os;
  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << xml_escape(spec.title) << "</text>\n";
  for (int i = 0; i <= 10; ++i) {
    const double v = i / 10.0;
    os << "<line x1=\"" << px(v) << "\" y1=\"" << kTop << "\" x2=\"" << px(v) << "\" y2=\"" << kTop + plot_h
       << "\" stroke=\"#e5e5e5\"/>\n";
    os << "<text x=\"" << px(v) << "\" y=\"" << kTop + plot_h + 16 << "\" text-anchor=\"middle\">" << v
       << "</text>\n";
    if (i % 2 == 0) {
      os << "<line x1=\"" << kLeft << "\" y1=\"" << py(v) << "\" x2=\"" << kLeft + plot_w << "\" y2=\"" << py(v)
         << "\" stroke=\"#e5e5e5\"/>\n";
      os << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">" << v << "</text>\n";
    }
  }
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\"" << plot_h
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << spec.height - 12
     << "\" text-anchor=\"middle\">error fraction rho</text>\n";
  os << "<text transform=\"translate(16," << kTop + plot_h / 2
     << ") rotate(-90)\" text-anchor=\"middle\">fraction of successes</text>\n";

  std::size_t idx = 0;
  for (auto& [key, pts] : series) {
    std::sort(pts.begin(), pts.end());
    const char* color = kColors[idx % std::size(kColors)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
    for (const auto& [x, y] : pts) os << px(x) << ',' << py(y) << ' ';
    os << "\"/>\n";
    for (const auto& [x, y] : pts) {
      os << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    }
    std::ostringstream label;
    const auto& [method, m, n, nu] = key;
    if (methods.size() > 1 || (ms.size() == 1 && ns.size() == 1 && nus.size() == 1)) label << method << ' ';
    if (ms.size() > 1) label << "m=" << m << ' ';
    if (ns.size() > 1) label << "n=" << n << ' ';
    if (nus.size() > 1) label << "nu=" << nu << ' ';
    std::string text = label.str();
    if (!text.empty()) text.pop_back();
    const double ly = kTop + 12 + 18.0 * static_cast<double>(idx);
    const double lx = kLeft + plot_w + 14;
    os << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 22 << "\" y2=\"" << ly - 4
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << lx + 28 << "\" y=\"" << ly << "\">" << xml_escape(text) << "</text>\n";
    ++idx;
  }
  os << "</svg>\n";
  return os.str();
}

void render_chart(const std::vector<SweepRecord>& records, const std::filesystem::path& path, const ChartSpec& spec) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << render_chart_svg(records, spec);
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace cab::report
