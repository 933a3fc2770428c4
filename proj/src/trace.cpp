#include "mrjsim/trace.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "mrjsim/error.hpp"

namespace mrjsim {

namespace {

std::vector<std::string_view> split(std::string_view line, bool comma) {
  std::vector<std::string_view> cells;
  if (comma) {
    std::size_t start = 0;
    while (true) {
      const auto pos = line.find(',', start);
      cells.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
  } else {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i == line.size()) break;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      cells.push_back(line.substr(i, j - i));
      i = j;
    }
  }
  return cells;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

bool blank(std::string_view s) { return trim(s).empty(); }

}  // namespace

TraceData parse_trace(const std::string& text, const std::string& column, std::size_t max_rows) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw TraceError("trace has no header line");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const bool comma = line.find(',') != std::string::npos;
  const auto header = split(line, comma);

  TraceData data;
  std::size_t col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i)
    if (trim(header[i]) == column) col = i;
  if (col == header.size()) {
    std::size_t idx = 0;
    const auto* end = column.data() + column.size();
    const auto [ptr, ec] = std::from_chars(column.data(), end, idx);
    if (ec != std::errc{} || ptr != end || idx >= header.size())
      throw TraceError("trace has no column \"" + column + "\"");
    col = idx;
  }
  data.column_name = std::string(trim(header[col]));

  std::size_t row = 0;
  while (data.rows_read < max_rows && std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (blank(line)) continue;
    ++row;
    const auto cells = split(line, comma);
    if (col >= cells.size()) throw TraceError("row " + std::to_string(row) + " has no column " + data.column_name);
    const auto cell = trim(cells[col]);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v))
      throw TraceError("row " + std::to_string(row) + ": \"" + std::string(cell) + "\" is not a number");
    ++data.rows_read;
    if (v <= 0.0) {
      ++data.rejected;
      continue;
    }
    data.values.push_back(v);
  }
  return data;
}

TraceData load_trace(const TraceSpec& spec) {
  std::ifstream f(spec.path, std::ios::binary);
  if (!f) throw TraceError("cannot open trace file " + spec.path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_trace(buf.str(), spec.column, spec.max_rows);
}

double nearest_rank_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw TraceError("quantile of an empty trace");
  if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("quantile must lie in (0, 1]");
  const auto n = values.size();
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, n);
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1), values.end());
  return values[rank - 1];
}

NormalizedTrace normalize_trace(const std::vector<double>& values, double quantile) {
  if (values.empty()) throw TraceError("the trace is empty");
  NormalizedTrace out;
  out.original = values.size();
  out.scale = nearest_rank_quantile(values, quantile);
  if (!(out.scale > 0.0)) throw TraceError("the trace quantile is not positive");
  for (double v : values) {
    if (v > out.scale) {
      ++out.dropped;
      continue;
    }
    const double x = v / out.scale;
    if (!(x > 0.0)) {
      ++out.dropped;
      continue;
    }
    out.values.push_back(x);
  }
  if (out.values.empty()) throw TraceError("no trace values survive normalization");
  return out;
}

double resolve_quantile(std::optional<double> quantile, std::optional<double> drop_frac) {
  if (drop_frac && !(*drop_frac >= 0.0 && *drop_frac < 1.0))
    throw ConfigError("drop-frac must lie in [0, 1)");
  if (quantile && !(*quantile > 0.0 && *quantile <= 1.0)) throw ConfigError("quantile must lie in (0, 1]");
  if (quantile && drop_frac && std::abs(*quantile - (1.0 - *drop_frac)) > 1e-12)
    throw ConfigError("quantile and drop-frac disagree: quantile must equal 1 - drop-frac");
  if (quantile) return *quantile;
  if (drop_frac) return 1.0 - *drop_frac;
  return kDefaultQuantile;
}

TraceArrivals trace_arrivals(const std::vector<double>& normalized, double lambda, std::uint64_t seed) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  Rng rng(seed);
  TraceArrivals out;
  double t = 0.0;
  for (double v : normalized) {
    t += exponential(rng, lambda);
    out.epochs.push_back(t);
    out.requirements.push_back(Requirement{v});
  }
  return out;
}

std::string format_drop_line(const NormalizedTrace& t) {
  char pct[32];
  std::snprintf(pct, sizeof pct, "%.1f", t.original ? 100.0 * static_cast<double>(t.dropped) / static_cast<double>(t.original) : 0.0);
  return "dropped " + std::to_string(t.dropped) + " of " + std::to_string(t.original) + " (" + pct + "%)";
}

}  // namespace mrjsim
