#include "mrjsim/experiment.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "mrjsim/dominance.hpp"
#include "mrjsim/error.hpp"
#include "mrjsim/text.hpp"

namespace mrjsim {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view s, std::string_view what) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ConfigError(std::string(what) + ": \"" + std::string(s) + "\" is not a number");
  return v;
}

std::vector<std::string> split_top(std::string_view text, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || (text[i] == sep && depth == 0)) {
      const auto item = trim(text.substr(start, i - start));
      if (!item.empty()) out.emplace_back(item);
      start = i + 1;
    } else if (text[i] == '(') {
      ++depth;
    } else if (text[i] == ')') {
      --depth;
    }
  }
  return out;
}

Dist1D parse_dist1d(std::string_view spec) {
  spec = trim(spec);
  std::string_view head = spec;
  std::vector<double> params;
  if (const auto open = spec.find('('); open != std::string_view::npos) {
    if (spec.back() != ')') throw ConfigError("distribution: unbalanced parentheses in \"" + std::string(spec) + "\"");
    head = trim(spec.substr(0, open));
    for (const auto& p : split_top(spec.substr(open + 1, spec.size() - open - 2), ','))
      params.push_back(parse_number(p, "distribution"));
  }
  auto want = [&](std::size_t lo, std::size_t hi) {
    if (params.size() < lo || params.size() > hi)
      throw ConfigError("distribution: wrong number of parameters for " + std::string(head));
  };
  try {
    if (head == "uniform") {
      want(0, 0);
      return Dist1D::uniform();
    }
    if (head == "truncnormal") {
      want(0, 2);
      return Dist1D::truncated_normal(params.size() > 0 ? params[0] : 0.5, params.size() > 1 ? params[1] : 1.0);
    }
    if (head == "lomax") {
      want(0, 2);
      return Dist1D::bounded_lomax(params.size() > 0 ? params[0] : 2.0, params.size() > 1 ? params[1] : 1.0);
    }
    if (head == "triangular") {
      want(0, 0);
      return Dist1D::triangular_decreasing();
    }
    if (head == "symtri") {
      want(2, 2);
      return Dist1D::symmetric_triangular(params[0], params[1]);
    }
    if (head == "pointmass") {
      want(1, 1);
      return Dist1D::point_mass(params[0]);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("distribution: ") + e.what());
  }
  throw ConfigError("distribution: unknown family \"" + std::string(head) + "\"");
}

std::string format_optional(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

std::vector<std::string> split_list(std::string_view text) { return split_top(text, ','); }

RequirementDist parse_distribution(std::string_view spec) {
  const auto parts = split_top(spec, '*');
  if (parts.empty()) throw ConfigError("distribution: empty specification");
  if (parts.size() > static_cast<std::size_t>(kMaxResources))
    throw ConfigError("distribution: at most " + std::to_string(kMaxResources) + " resources are supported");
  std::vector<Dist1D> coords;
  for (const auto& p : parts) coords.push_back(parse_dist1d(p));
  if (coords.size() == 1) return coords.front();
  return RequirementDist::product(std::move(coords));
}

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    auto key = std::string(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    for (char& c : key)
      if (c == '_') c = '-';
    out[key] = std::string(trim(line.substr(eq + 1)));
  }
  return out;
}

std::map<std::string, std::string> load_key_values(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_key_values(buf.str());
}

std::string PolicyEntry::label() const { return K > 0 ? name + ":" + std::to_string(K) : name; }

PolicyEntry parse_policy_entry(std::string_view text, int default_k) {
  text = trim(text);
  PolicyEntry e;
  const auto colon = text.find(':');
  e.name = std::string(trim(text.substr(0, colon)));
  if (colon != std::string_view::npos) {
    const auto ks = trim(text.substr(colon + 1));
    const auto [ptr, ec] = std::from_chars(ks.data(), ks.data() + ks.size(), e.K);
    if (ec != std::errc{} || ptr != ks.data() + ks.size())
      throw ConfigError("policies: bad K in \"" + std::string(text) + "\"");
  } else if (policy_needs_k(e.name)) {
    e.K = default_k;
  }
  return e;
}

std::vector<PolicyEntry> validate_experiment(const ExperimentConfig& c, const RequirementDist& dist) {
  if (c.policies.empty()) throw ConfigError("policies: at least one policy is required");
  if (c.lambdas.empty() == c.rhos.empty()) throw ConfigError("lambda/rho: give exactly one of the two load grids");
  for (double x : c.lambdas)
    if (!(x > 0.0)) throw ConfigError("lambda: values must be positive");
  for (double x : c.rhos)
    if (!(x > 0.0)) throw ConfigError("rho: values must be positive");
  if (c.lambda_star && !(*c.lambda_star > 0.0)) throw ConfigError("lambda-star: must be positive");
  if (!c.rhos.empty() && !c.lambda_star && !known_stability_boundary(dist))
    throw ConfigError("lambda-star: the stability boundary of " + dist.name() + " is unknown; supply lambda-star");
  if (c.jobs < 1) throw ConfigError("jobs: must be at least 1");
  if (!(c.theta > 0.0)) throw ConfigError("theta: must be positive");
  if (!(c.epsilon > 0.0)) throw ConfigError("epsilon: must be positive");
  std::vector<PolicyEntry> entries;
  for (const auto& p : c.policies) {
    auto e = parse_policy_entry(p, c.K);
    if (!is_known_policy(e.name)) throw ConfigError("policies: unknown policy \"" + e.name + "\"");
    if (policy_needs_k(e.name)) {
      if (e.K < 1) throw ConfigError("policies: " + e.name + " needs K (write " + e.name + ":K or set K)");
      if (e.name.starts_with("2b") && !is_power_of_two(e.K)) throw ConfigError("K must be a power of two");
      if (e.name.starts_with("xp") && e.K % 2 != 0) throw ConfigError("K must be even");
      if ((e.name.starts_with("2b") || e.name.starts_with("xp")) && dist.dimension() != 1)
        throw ConfigError("policies: " + e.name + " needs one resource");
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

namespace {

std::vector<ResultRow> run_grid(const ExperimentConfig& c, const RequirementDist& dist, const std::string& dist_label,
                                std::shared_ptr<const std::vector<Requirement>> requirements) {
  const auto entries = validate_experiment(c, dist);
  std::optional<double> lambda_star = c.lambda_star;
  if (!lambda_star) lambda_star = known_stability_boundary(dist);
  std::vector<double> lambdas = c.lambdas;
  std::vector<std::optional<double>> rhos;
  if (!c.rhos.empty()) {
    lambdas.clear();
    for (double r : c.rhos) {
      lambdas.push_back(r * *lambda_star);
      rhos.emplace_back(r);
    }
  } else {
    for (double l : lambdas) rhos.push_back(lambda_star ? std::optional<double>(l / *lambda_star) : std::nullopt);
  }

  std::vector<ResultRow> rows(entries.size() * lambdas.size());
  parallel_for(rows.size(), c.workers, [&](std::size_t idx) {
    const auto& e = entries[idx / lambdas.size()];
    const std::size_t i = idx % lambdas.size();
    auto& row = rows[idx];
    row.policy = e.label();
    row.distribution = dist_label;
    row.lambda = lambdas[i];
    row.rho = rhos[i];
    row.K = e.K;
    row.seed = c.seed + i;
    try {
      SimConfig s;
      s.arrival = ArrivalSpec(lambdas[i], dist);
      s.policy = PolicySpec{e.name, e.K, c.theta, c.epsilon};
      s.jobs = c.jobs;
      s.seed = row.seed;
      s.queue_cutoff = c.queue_cutoff;
      s.mrt_cutoff = c.mrt_cutoff;
      s.requirements = requirements;
      const auto r = run_simulation(s);
      row.n_jobs = r.completed;
      if (!std::isnan(r.mean_response_time)) row.mean_response_time = r.mean_response_time;
      row.max_queue_len = r.max_queue;
      row.unstable = r.unstable;
    } catch (const std::exception& ex) {
      row.unstable = true;
      row.mean_response_time.reset();
      row.error = ex.what();
    }
  });
  return rows;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& c) {
  const auto dist = parse_distribution(c.distribution);
  return run_grid(c, dist, dist.name(), nullptr);
}

std::vector<ResultRow> run_trace_experiment(const ExperimentConfig& c, const std::vector<double>& normalized,
                                            const std::string& column) {
  if (normalized.empty()) throw TraceError("no trace values survive normalization");
  auto reqs = std::make_shared<std::vector<Requirement>>();
  reqs->reserve(normalized.size());
  for (double v : normalized) reqs->push_back(Requirement{v});
  return run_grid(c, Dist1D::empirical(normalized), "trace:" + column, std::move(reqs));
}

std::string csv_header() {
  return "policy,distribution,lambda,rho,K,seed,n_jobs,mean_response_time,max_queue_len,unstable\n";
}

std::string format_csv_row(const ResultRow& r) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
      if (ch == '"') q += '"';
      q += ch;
    }
    return q + "\"";
  };
  return quote(r.policy) + "," + quote(r.distribution) + "," + format_double(r.lambda) + "," + format_optional(r.rho) +
         "," + (r.K > 0 ? std::to_string(r.K) : std::string()) + "," + std::to_string(r.seed) + "," +
         std::to_string(r.n_jobs) + "," + format_optional(r.mean_response_time) + "," +
         std::to_string(r.max_queue_len) + "," + (r.unstable ? "true" : "false") + "\n";
}

std::string format_csv(const std::vector<ResultRow>& rows) {
  std::string out = csv_header();
  for (const auto& r : rows) out += format_csv_row(r);
  return out;
}

}  // namespace mrjsim
