#include "mrjsim/discretization.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <set>
#include <stdexcept>

#include "mrjsim/error.hpp"

namespace mrjsim {

ServiceOption::ServiceOption(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end());
  for (const auto& [type, count] : entries) {
    if (count < 0) throw std::invalid_argument("service option counts must be nonnegative");
    if (count == 0) continue;
    if (!entries_.empty() && entries_.back().first == type)
      entries_.back().second += count;
    else
      entries_.emplace_back(type, count);
  }
}

ServiceOption ServiceOption::from_types(std::initializer_list<int> types_1based) {
  std::vector<Entry> e;
  for (int t : types_1based) {
    if (t < 1) throw std::invalid_argument("job types are 1-based");
    e.emplace_back(static_cast<std::size_t>(t - 1), 1);
  }
  return ServiceOption(std::move(e));
}

int ServiceOption::count(std::size_t type) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), type,
                             [](const Entry& e, std::size_t t) { return e.first < t; });
  return it != entries_.end() && it->first == type ? it->second : 0;
}

int ServiceOption::total_jobs() const {
  int n = 0;
  for (const auto& e : entries_) n += e.second;
  return n;
}

std::int64_t ServiceOption::weight(std::span<const std::int64_t> q) const {
  std::int64_t w = 0;
  for (const auto& [type, count] : entries_) w += q[type] * count;
  return w;
}

ServiceOption ServiceOption::operator+(const ServiceOption& other) const {
  std::vector<Entry> e = entries_;
  e.insert(e.end(), other.entries_.begin(), other.entries_.end());
  return ServiceOption(std::move(e));
}

std::strong_ordering ServiceOption::operator<=>(const ServiceOption& other) const {
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < entries_.size() || j < other.entries_.size()) {
    if (j == other.entries_.size() || (i < entries_.size() && entries_[i].first < other.entries_[j].first))
      return std::strong_ordering::greater;  // we have a positive count where the other has zero
    if (i == entries_.size() || other.entries_[j].first < entries_[i].first) return std::strong_ordering::less;
    if (entries_[i].second != other.entries_[j].second) return entries_[i].second <=> other.entries_[j].second;
    ++i;
    ++j;
  }
  return std::strong_ordering::equal;
}

bool is_feasible(const ServiceOption& option, const Grid& grid) {
  for (int l = 0; l < grid.dimension(); ++l) {
    std::int64_t used = 0;
    for (const auto& [type, count] : option.entries()) {
      if (type >= grid.num_types()) return false;
      used += static_cast<std::int64_t>(grid.coord(type, l)) * count;
    }
    if (used > grid.k(l)) return false;
  }
  return true;
}

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Full:
      return "full";
    case Provenance::TwoJob:
      return "2j";
    case Provenance::TwoBucket:
      return "2b";
    case Provenance::PairwiseExtreme:
      return "xp";
    case Provenance::Explicit:
      return "explicit";
  }
  return "explicit";
}

bool is_power_of_two(int k) { return k > 0 && (k & (k - 1)) == 0; }

namespace {

class Enumerator {
 public:
  Enumerator(const Grid& grid, std::size_t cap) : cap_(cap) {
    coords_.resize(grid.num_types());
    for (std::size_t t = 0; t < grid.num_types(); ++t) coords_[t] = grid.coords(t);
    remaining_.assign(grid.k().begin(), grid.k().end());
  }

  std::vector<ServiceOption> run() {
    dfs(0);
    return std::move(out_);
  }

 private:
  void dfs(std::size_t t) {
    if (t == coords_.size()) {
      if (out_.size() >= cap_) throw EnumerationTooLarge(cap_);
      out_.emplace_back(current_);
      return;
    }
    int max_count = std::numeric_limits<int>::max();
    for (std::size_t l = 0; l < remaining_.size(); ++l) max_count = std::min(max_count, remaining_[l] / coords_[t][l]);
    dfs(t + 1);
    for (int c = 1; c <= max_count; ++c) {
      for (std::size_t l = 0; l < remaining_.size(); ++l) remaining_[l] -= coords_[t][l];
      current_.emplace_back(t, c);
      dfs(t + 1);
      current_.pop_back();
    }
    for (std::size_t l = 0; l < remaining_.size(); ++l) remaining_[l] += max_count * coords_[t][l];
  }

  std::size_t cap_;
  std::vector<std::vector<int>> coords_;
  std::vector<int> remaining_;
  std::vector<ServiceOption::Entry> current_;
  std::vector<ServiceOption> out_;
};

void exact_dfs(int type, int remaining, int K, std::size_t cap, std::vector<ServiceOption::Entry>& current,
               std::vector<ServiceOption>& out) {
  if (remaining == 0) {
    // Later types all get count zero; this is the only completion.
    if (out.size() >= cap) throw EnumerationTooLarge(cap);
    out.emplace_back(current);
    return;
  }
  if (type > K || type > remaining) return;
  for (int c = 0; c * type <= remaining; ++c) {
    const int rest = remaining - c * type;
    // Types after this one can only fill `rest` when it is zero or at least type + 1.
    if (rest != 0 && rest < type + 1) continue;
    if (c > 0) current.emplace_back(static_cast<std::size_t>(type - 1), c);
    exact_dfs(type + 1, rest, K, cap, current, out);
    if (c > 0) current.pop_back();
  }
}

}  // namespace

CandidateSet enumerate_candidates(const Grid& grid, std::size_t cap) {
  return CandidateSet{grid, Enumerator(grid, cap).run(), Provenance::Full};
}

std::vector<ServiceOption> exact_usage_options(int K, int total, std::size_t cap) {
  if (total < 0 || total > K) throw std::invalid_argument("total usage must lie in 0..K");
  std::vector<ServiceOption> out;
  std::vector<ServiceOption::Entry> current;
  exact_dfs(1, total, K, cap, current, out);
  return out;
}

std::vector<std::size_t> boundary_types(const Grid& grid) {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < grid.num_types(); ++t)
    for (int l = 0; l < grid.dimension(); ++l)
      if (grid.coord(t, l) == grid.k(l)) {
        out.push_back(t);
        break;
      }
  return out;
}

CandidateSet efficient_set_2J(const Grid& grid) {
  CandidateSet set{grid, {}, Provenance::TwoJob};
  const int d = grid.dimension();
  const std::vector<int> K(grid.k().begin(), grid.k().end());

  for (std::size_t t : boundary_types(grid)) set.options.emplace_back(std::vector<ServiceOption::Entry>{{t, 1}});

  std::vector<ServiceOption> pairs;
  std::vector<int> partner(static_cast<std::size_t>(d));
  for (std::size_t t = 0; t < grid.num_types(); ++t) {
    const auto j = grid.coords(t);
    bool interior = true;
    for (int l = 0; l < d; ++l) interior = interior && j[static_cast<std::size_t>(l)] < K[static_cast<std::size_t>(l)];
    if (!interior) continue;
    for (int l = 0; l < d; ++l) partner[static_cast<std::size_t>(l)] = K[static_cast<std::size_t>(l)] - j[static_cast<std::size_t>(l)];
    // Representatives have first coordinate above K_1/2; when K_1 is even
    // the middle slice pairs with itself and the lexicographically larger
    // member represents the pair.
    const int twice_first = 2 * j[0];
    bool representative = twice_first > K[0];
    if (twice_first == K[0]) representative = !std::lexicographical_compare(j.begin(), j.end(), partner.begin(), partner.end());
    if (!representative) continue;
    const std::size_t p = grid.index(partner);
    pairs.emplace_back(std::vector<ServiceOption::Entry>{{t, 1}, {p, 1}});
  }
  if (d == 1) {
    // List M_1, ..., M_{(K-1)/2} by their small job, then the self pair.
    std::sort(pairs.begin(), pairs.end(), [](const ServiceOption& a, const ServiceOption& b) {
      const bool sa = a.entries().size() == 1;
      const bool sb = b.entries().size() == 1;
      if (sa != sb) return sb;
      return a.entries().front().first < b.entries().front().first;
    });
  }
  set.options.insert(set.options.end(), pairs.begin(), pairs.end());
  return set;
}

CandidateSet efficient_set_2B(const Grid& grid) {
  if (grid.dimension() != 1) throw std::invalid_argument("the 2-Bucket set is defined for one resource only");
  const int K = grid.k(0);
  if (!is_power_of_two(K)) throw std::invalid_argument("K must be a power of two");
  int L = 0;
  while ((1 << L) < K) ++L;
  CandidateSet set{grid, {}, Provenance::TwoBucket};
  for (int k = 1; k <= K; ++k) {
    int ell = 0;
    while ((1 << ell) < k) ++ell;
    const int copies = 1 << (L - ell);
    std::vector<ServiceOption::Entry> e{{static_cast<std::size_t>(k - 1), copies}};
    if (!is_power_of_two(k)) e.emplace_back(static_cast<std::size_t>((1 << ell) - k - 1), copies);
    set.options.emplace_back(std::move(e));
  }
  return set;
}

CandidateSet efficient_set_XP(const Grid& grid, std::size_t cap) {
  if (grid.dimension() != 1) throw std::invalid_argument("the XP set is defined for one resource only");
  const int K = grid.k(0);
  if (K % 2 != 0) throw std::invalid_argument("K must be even");
  const auto full = exact_usage_options(K, K, cap);
  const auto halves = exact_usage_options(K, K / 2, cap);
  std::set<ServiceOption> decomposable;
  for (std::size_t a = 0; a < halves.size(); ++a)
    for (std::size_t b = a + 1; b < halves.size(); ++b) decomposable.insert(halves[a] + halves[b]);
  CandidateSet set{grid, {}, Provenance::PairwiseExtreme};
  for (const auto& m : full)
    if (!decomposable.contains(m)) set.options.push_back(m);
  return set;
}

std::string format_option(const ServiceOption& option, const Grid& grid) {
  if (option.empty()) return "{}";
  std::string out;
  for (const auto& [type, count] : option.entries()) {
    if (!out.empty()) out += ' ';
    out += grid.type_label(type);
    out += ':';
    out += std::to_string(count);
  }
  return out;
}

namespace {

int parse_int(std::string_view s, std::string_view what) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw std::invalid_argument("bad " + std::string(what) + " '" + std::string(s) + "'");
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

ServiceOption parse_option(std::string_view line, const Grid& grid) {
  line = trim(line);
  if (line == "{}") return {};
  std::vector<ServiceOption::Entry> entries;
  while (!line.empty()) {
    const auto space = line.find(' ');
    const std::string_view token = line.substr(0, space);
    line = space == std::string_view::npos ? std::string_view{} : trim(line.substr(space + 1));
    const auto colon = token.rfind(':');
    if (colon == std::string_view::npos) throw std::invalid_argument("expected type:count, got '" + std::string(token) + "'");
    std::string_view type = token.substr(0, colon);
    const int count = parse_int(token.substr(colon + 1), "count");
    std::vector<int> coords;
    if (!type.empty() && type.front() == '(') {
      if (type.back() != ')') throw std::invalid_argument("unterminated type '" + std::string(type) + "'");
      type = type.substr(1, type.size() - 2);
      while (!type.empty()) {
        const auto comma = type.find(',');
        coords.push_back(parse_int(type.substr(0, comma), "type coordinate"));
        type = comma == std::string_view::npos ? std::string_view{} : type.substr(comma + 1);
      }
    } else {
      coords.push_back(parse_int(type, "type"));
    }
    entries.emplace_back(grid.index(coords), count);
  }
  return ServiceOption(std::move(entries));
}

std::string format_candidates(const CandidateSet& set) {
  std::string out;
  for (const auto& m : set.options) {
    out += format_option(m, set.grid);
    out += '\n';
  }
  return out;
}

std::vector<ServiceOption> parse_candidates(std::string_view text, const Grid& grid) {
  std::vector<ServiceOption> out;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty()) out.push_back(parse_option(line, grid));
  }
  return out;
}

}  // namespace mrjsim
