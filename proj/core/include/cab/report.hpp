#pragma once

// Sweep output: CSV with a fixed header and a standalone SVG chart of
// success fraction against rho.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cab/experiments.hpp"

namespace cab::report {

inline constexpr const char* kCsvHeader =
    "m,n,nu,rho,k1,k2,method,trials,successes,success_frac,mean_solve_seconds,mean_iterations";

/// Written as leading '#' comment lines when supplied.
struct CsvMetadata {
  std::string preset;
  std::size_t paper_trials = 0;
  std::size_t trials_per_cell = 0;
  std::uint64_t base_seed = 0;
};

CsvMetadata metadata_for(const experiments::SweepConfig& config);

/// Shortest round-trip decimal form.
std::string format_number(double v);

void emit_csv(std::ostream& os, const std::vector<experiments::SweepRecord>& records,
              const CsvMetadata* meta = nullptr);
void write_csv(const std::filesystem::path& path, const std::vector<experiments::SweepRecord>& records,
               const CsvMetadata* meta = nullptr);

/// Parses emit_csv output; '#' lines are skipped. Throws FormatError.
std::vector<experiments::SweepRecord> parse_csv(std::istream& is);
std::vector<experiments::SweepRecord> read_csv(const std::filesystem::path& path);

struct ChartSpec {
  std::string title;
  double width = 720.0;
  double height = 440.0;
};

/// One line per (method, m, n, nu) series, rho on x, success fraction on y.
/// Skipped cells (trials == 0) are omitted.
std::string render_chart_svg(const std::vector<experiments::SweepRecord>& records, const ChartSpec& spec);
void render_chart(const std::vector<experiments::SweepRecord>& records, const std::filesystem::path& path,
                  const ChartSpec& spec);

}  // namespace cab::report
