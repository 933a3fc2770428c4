#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mrjsim/requirements.hpp"

namespace mrjsim {

inline constexpr std::size_t kDefaultTraceRows = 1'000'000;
inline constexpr double kDefaultQuantile = 0.90;

struct TraceSpec {
  std::string path;
  // Header name, or a 0-based column index.
  std::string column = "0";
  std::size_t max_rows = kDefaultTraceRows;
  double quantile = kDefaultQuantile;
};

struct TraceData {
  std::vector<double> values;  // file order
  std::size_t rows_read = 0;
  std::size_t rejected = 0;    // rows with a value <= 0
  std::string column_name;
};

// Reads a headered file delimited by commas (when the header has one) or
// whitespace. Throws TraceError for a missing file, an unknown column or a
// cell that is not a number; the message names the 1-based data row.
TraceData load_trace(const TraceSpec& spec);
TraceData parse_trace(const std::string& text, const std::string& column, std::size_t max_rows = kDefaultTraceRows);

struct NormalizedTrace {
  std::vector<double> values;  // survivors divided by the scale, in input order
  double scale = 1.0;
  std::size_t dropped = 0;
  std::size_t original = 0;
};

// Nearest-rank quantile: the value at 1-based rank ceil(q n) of the sorted list.
double nearest_rank_quantile(std::vector<double> values, double q);

// Drops values above the q-quantile and divides the rest by it. Throws
// TraceError when the input is empty or nothing survives.
NormalizedTrace normalize_trace(const std::vector<double>& values, double quantile = kDefaultQuantile);

// Quantile implied by the optional quantile and drop-fraction settings
// (quantile = 1 - drop fraction). Throws ConfigError when they disagree or
// lie out of range.
double resolve_quantile(std::optional<double> quantile, std::optional<double> drop_frac);

struct TraceArrivals {
  std::vector<double> epochs;
  std::vector<Requirement> requirements;
};

// Poisson(lambda) arrival epochs carrying the values in order.
TraceArrivals trace_arrivals(const std::vector<double>& normalized, double lambda, std::uint64_t seed);

std::string format_drop_line(const NormalizedTrace& t);

}  // namespace mrjsim
