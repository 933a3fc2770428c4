#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mrjsim/grid.hpp"

namespace mrjsim {

inline constexpr std::size_t kDefaultEnumerationCap = 10'000'000;

// How many jobs of each type a schedule attempts to serve together. Stored
// sparsely as (type, count) pairs sorted by type with positive counts.
class ServiceOption {
 public:
  using Entry = std::pair<std::size_t, int>;

  ServiceOption() = default;
  // Entries may come in any order; repeated types are merged and zero
  // counts dropped. Negative counts throw std::invalid_argument.
  explicit ServiceOption(std::vector<Entry> entries);
  // Multiset form for d = 1: {2, 3} serves one type-2 and one type-3 job.
  static ServiceOption from_types(std::initializer_list<int> types_1based);

  std::span<const Entry> entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  int count(std::size_t type) const;
  int total_jobs() const;
  // <M, q>.
  std::int64_t weight(std::span<const std::int64_t> q) const;
  ServiceOption operator+(const ServiceOption& other) const;

  bool operator==(const ServiceOption& other) const = default;
  // Lexicographic order of the dense count vectors.
  std::strong_ordering operator<=>(const ServiceOption& other) const;

 private:
  std::vector<Entry> entries_;
};

bool is_feasible(const ServiceOption& option, const Grid& grid);

enum class Provenance { Full, TwoJob, TwoBucket, PairwiseExtreme, Explicit };

std::string_view provenance_name(Provenance p);

struct CandidateSet {
  Grid grid;
  std::vector<ServiceOption> options;
  Provenance provenance = Provenance::Explicit;
};

// Every feasible count vector including the empty option, in lexicographic
// order. Throws EnumerationTooLarge once more than `cap` options appear.
CandidateSet enumerate_candidates(const Grid& grid, std::size_t cap = kDefaultEnumerationCap);

// Options of a one-resource grid that use exactly `total` units of the
// K = grid.k(0) capacity, in lexicographic order.
std::vector<ServiceOption> exact_usage_options(int K, int total, std::size_t cap = kDefaultEnumerationCap);

CandidateSet efficient_set_2J(const Grid& grid);
// K must be a power of two and d = 1. Option k-1 is M_k.
CandidateSet efficient_set_2B(const Grid& grid);
// K must be even and d = 1.
CandidateSet efficient_set_XP(const Grid& grid, std::size_t cap = kDefaultEnumerationCap);

// Types in the boundary set: some coordinate equals K_l.
std::vector<std::size_t> boundary_types(const Grid& grid);

// Text form: one option per line, "type:count" pairs sorted by type and
// separated by single spaces; the empty option is "{}".
std::string format_option(const ServiceOption& option, const Grid& grid);
ServiceOption parse_option(std::string_view line, const Grid& grid);
std::string format_candidates(const CandidateSet& set);
std::vector<ServiceOption> parse_candidates(std::string_view text, const Grid& grid);

bool is_power_of_two(int k);

}  // namespace mrjsim
