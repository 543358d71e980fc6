// Exact conditional p-values for an arbitrary ranking of the reference set.
//
// For observed table s* with statistic value t, the critical set is every
// table of the reference set whose statistic is >= t, and the p-value is the
// hypergeometric probability of that set. Statistic values are doubles, so
// "equal to t" is decided by TieRule: after a descending sort, a table joins
// the current tie group when it is within tolerance of the value added to the
// group just before it. All members of a group share one p-value.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "exactpv/hypergeom.hpp"
#include "exactpv/ranking.hpp"
#include "exactpv/table.hpp"

namespace exactpv {

struct TieRule {
  double relative_eps = 1e-9;
  double absolute_eps = 1e-12;

  bool same_group(double a, double b) const noexcept;
};

struct TieGroup {
  double statistic = 0.0;  // largest member value
  double probability = 0.0;
  double cumulative_p = 0.0;  // this group plus every more extreme group
  std::uint64_t size = 0;
  std::uint64_t cumulative_size = 0;
};

// Tie groups of one reference set, most extreme first.
class AttainableDistribution {
 public:
  AttainableDistribution(Margins margins, std::string statistic, std::vector<TieGroup> groups);

  const Margins& margins() const noexcept { return margins_; }
  const std::string& statistic() const noexcept { return statistic_; }
  std::span<const TieGroup> groups() const noexcept { return groups_; }
  std::uint64_t reference_set_size() const noexcept;

  // Index of the group holding `value`, which must be the statistic of some
  // table in this reference set (evaluated by the same statistic). That is the
  // last group whose representative is >= value.
  std::size_t group_of(double value) const;

 private:
  Margins margins_;
  std::string statistic_;
  std::vector<TieGroup> groups_;
};

// One enumerated table with its score and tie group, in ranked order.
struct RankedTable {
  FreeCells cells;
  double statistic = 0.0;
  std::size_t group = 0;
};

// The reference set sorted by decreasing statistic (ties in value broken by
// lexicographic (i, j)), with tie groups assigned.
std::vector<RankedTable> rank_reference_set(const Margins& margins, const RankingStatistic& stat,
                                            const TieRule& ties = {});

AttainableDistribution attainable_distribution(const Margins& margins,
                                               const RankingStatistic& stat,
                                               const LogFactorialCache& cache,
                                               const TieRule& ties = {});

struct PValueResult {
  double p_value = 1.0;
  double observed_statistic = 0.0;
  std::uint64_t critical_set_size = 0;
  std::uint64_t reference_set_size = 0;
  std::uint64_t tie_group_size = 0;
};

// Reads the p-value of a table with statistic `observed` off a distribution.
// p-values that underflow double are reported as the smallest positive
// subnormal so that p stays in (0, 1].
PValueResult lookup_pvalue(const AttainableDistribution& dist, double observed);

std::vector<FreeCells> critical_set(const Table2x3& observed, const RankingStatistic& stat,
                                    const TieRule& ties = {});

PValueResult exact_pvalue(const Table2x3& observed, const RankingStatistic& stat,
                          const LogFactorialCache& cache, const TieRule& ties = {});
// Builds a log-factorial cache sized for this table.
PValueResult exact_pvalue(const Table2x3& observed, const RankingStatistic& stat,
                          const TieRule& ties = {});

struct ValidityReport {
  bool passed = false;
  // max over alpha of Pr(P <= alpha) - alpha; <= 0 for a valid test.
  double worst_excess = 0.0;
  double worst_alpha = 0.0;
  // max over attainable p of |Pr(P <= p) - p|.
  double worst_attainability_error = 0.0;
  std::size_t attainable_count = 0;
};

// Alpha levels always checked in addition to the attainable p-values.
inline constexpr double kValidityAlphaGrid[] = {1e-8, 1e-6, 1e-4, 0.001, 0.01, 0.05, 0.1, 0.5};

// Computes the p-value of every table in the reference set and checks
// Pr(P <= alpha) <= alpha + tolerance on the alpha grid and every attainable
// p-value, and Pr(P <= p) == p within tolerance for each attainable p.
ValidityReport validity_check(const Margins& margins, const RankingStatistic& stat,
                              const LogFactorialCache& cache, const TieRule& ties = {},
                              double tolerance = 1e-10);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::uint64_t draws = 0;
  std::uint64_t hits = 0;
};

// Permutation estimate of the exact p-value. Each draw assigns the case labels
// to a uniformly random subset of the n subjects (partial Fisher-Yates over
// the genotype multiset), driven by std::mt19937_64 seeded with `seed` and
// unbiased bounded integers by rejection, so a seed maps to the same stream on
// every conforming platform. A draw counts when its statistic v satisfies
// v >= t or ties.same_group(v, t).
MonteCarloEstimate monte_carlo_pvalue(const Table2x3& observed, const RankingStatistic& stat,
                                      std::uint64_t draws, std::uint64_t seed,
                                      const TieRule& ties = {});

}  // namespace exactpv
