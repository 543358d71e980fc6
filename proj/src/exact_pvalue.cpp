#include "exactpv/exact_pvalue.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "exactpv/summation.hpp"

namespace exactpv {

bool TieRule::same_group(double a, double b) const noexcept {
  const double diff = std::fabs(a - b);
  return diff <= std::max(relative_eps * std::max(std::fabs(a), std::fabs(b)), absolute_eps);
}

AttainableDistribution::AttainableDistribution(Margins margins, std::string statistic,
                                               std::vector<TieGroup> groups)
    : margins_(margins), statistic_(std::move(statistic)), groups_(std::move(groups)) {
  if (groups_.empty()) throw std::invalid_argument("attainable distribution has no groups");
}

std::uint64_t AttainableDistribution::reference_set_size() const noexcept {
  return groups_.back().cumulative_size;
}

std::size_t AttainableDistribution::group_of(double value) const {
  // Representatives strictly decrease, so the groups with representative >=
  // value form a prefix.
  const auto it = std::partition_point(groups_.begin(), groups_.end(),
                                       [value](const TieGroup& g) { return g.statistic >= value; });
  if (it == groups_.begin())
    throw std::invalid_argument("statistic value above every attainable value");
  return static_cast<std::size_t>(it - groups_.begin()) - 1;
}

std::vector<RankedTable> rank_reference_set(const Margins& margins, const RankingStatistic& stat,
                                            const TieRule& ties) {
  std::vector<RankedTable> ranked;
  ranked.reserve(reference_set_size(margins));
  for_each_in_reference_set(margins, [&](FreeCells c) {
    ranked.push_back({c, stat(Table2x3::from_free_cells(c, margins)), 0});
  });
  std::sort(ranked.begin(), ranked.end(), [](const RankedTable& a, const RankedTable& b) {
    if (a.statistic != b.statistic) return a.statistic > b.statistic;
    return a.cells < b.cells;
  });
  std::size_t group = 0;
  for (std::size_t k = 1; k < ranked.size(); ++k) {
    if (!ties.same_group(ranked[k - 1].statistic, ranked[k].statistic)) ++group;
    ranked[k].group = group;
  }
  return ranked;
}

AttainableDistribution attainable_distribution(const Margins& margins,
                                               const RankingStatistic& stat,
                                               const LogFactorialCache& cache,
                                               const TieRule& ties) {
  const long double norm = log_pmf_normalizer(margins, cache);
  const std::vector<RankedTable> ranked = rank_reference_set(margins, stat, ties);

  std::vector<TieGroup> groups;
  groups.reserve(ranked.back().group + 1);
  CompensatedSum running;
  CompensatedSum in_group;
  std::uint64_t seen = 0;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    const RankedTable& r = ranked[k];
    if (k == 0 || r.group != ranked[k - 1].group) {
      groups.push_back({r.statistic, 0.0, 0.0, 0, 0});
      in_group = CompensatedSum{};
    }
    const auto p = static_cast<double>(std::exp(log_pmf_unchecked(r.cells, margins, norm, cache)));
    running.add(p);
    in_group.add(p);
    ++seen;
    TieGroup& g = groups.back();
    ++g.size;
    g.probability = in_group.value();
    g.cumulative_p = running.value();
    g.cumulative_size = seen;
  }
  return AttainableDistribution(margins, stat.name(), std::move(groups));
}

PValueResult lookup_pvalue(const AttainableDistribution& dist, double observed) {
  const std::size_t k = dist.group_of(observed);
  const TieGroup& g = dist.groups()[k];
  PValueResult result;
  result.p_value = std::clamp(g.cumulative_p, std::numeric_limits<double>::denorm_min(), 1.0);
  result.observed_statistic = observed;
  result.critical_set_size = g.cumulative_size;
  result.reference_set_size = dist.reference_set_size();
  result.tie_group_size = g.size;
  return result;
}

std::vector<FreeCells> critical_set(const Table2x3& observed, const RankingStatistic& stat,
                                    const TieRule& ties) {
  const Margins margins = margins_of(observed);
  const std::vector<RankedTable> ranked = rank_reference_set(margins, stat, ties);
  const FreeCells target = observed.free_cells();
  const auto pos = std::find_if(ranked.begin(), ranked.end(),
                                [&](const RankedTable& r) { return r.cells == target; });
  std::vector<FreeCells> cells;
  for (const RankedTable& r : ranked) {
    if (r.group > pos->group) break;
    cells.push_back(r.cells);
  }
  std::sort(cells.begin(), cells.end());
  return cells;
}

PValueResult exact_pvalue(const Table2x3& observed, const RankingStatistic& stat,
                          const LogFactorialCache& cache, const TieRule& ties) {
  const AttainableDistribution dist =
      attainable_distribution(margins_of(observed), stat, cache, ties);
  return lookup_pvalue(dist, stat(observed));
}

PValueResult exact_pvalue(const Table2x3& observed, const RankingStatistic& stat,
                          const TieRule& ties) {
  const LogFactorialCache cache(observed.n());
  return exact_pvalue(observed, stat, cache, ties);
}

ValidityReport validity_check(const Margins& margins, const RankingStatistic& stat,
                              const LogFactorialCache& cache, const TieRule& ties,
                              double tolerance) {
  const AttainableDistribution dist = attainable_distribution(margins, stat, cache, ties);
  const long double norm = log_pmf_normalizer(margins, cache);

  // Distribution of P under the null: (p-value, probability) per table.
  struct Outcome {
    double p;
    double prob;
  };
  std::vector<Outcome> outcomes;
  outcomes.reserve(dist.reference_set_size());
  for_each_in_reference_set(margins, [&](FreeCells c) {
    const double t = stat(Table2x3::from_free_cells(c, margins));
    outcomes.push_back({lookup_pvalue(dist, t).p_value,
                        static_cast<double>(std::exp(log_pmf_unchecked(c, margins, norm, cache)))});
  });
  std::sort(outcomes.begin(), outcomes.end(),
            [](const Outcome& a, const Outcome& b) { return a.p < b.p; });

  // Pr(P <= p) at each distinct attainable p.
  std::vector<double> levels;
  std::vector<double> mass;
  CompensatedSum running;
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    running.add(outcomes[k].prob);
    if (k + 1 == outcomes.size() || outcomes[k + 1].p != outcomes[k].p) {
      levels.push_back(outcomes[k].p);
      mass.push_back(running.value());
    }
  }
  const auto mass_at_or_below = [&](double alpha) {
    const auto it = std::upper_bound(levels.begin(), levels.end(), alpha);
    return it == levels.begin() ? 0.0 : mass[static_cast<std::size_t>(it - levels.begin()) - 1];
  };

  ValidityReport report;
  report.attainable_count = levels.size();
  report.worst_excess = -std::numeric_limits<double>::infinity();
  const auto check_alpha = [&](double alpha) {
    const double excess = mass_at_or_below(alpha) - alpha;
    if (excess > report.worst_excess) {
      report.worst_excess = excess;
      report.worst_alpha = alpha;
    }
  };
  for (double alpha : kValidityAlphaGrid) check_alpha(alpha);
  for (std::size_t k = 0; k < levels.size(); ++k) {
    check_alpha(levels[k]);
    report.worst_attainability_error =
        std::max(report.worst_attainability_error, std::fabs(mass[k] - levels[k]));
  }
  report.passed =
      report.worst_excess <= tolerance && report.worst_attainability_error <= tolerance;
  return report;
}

namespace {

// Uniform integer in [0, bound) by rejection from the top of the 64-bit range.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % bound;
}

}  // namespace

MonteCarloEstimate monte_carlo_pvalue(const Table2x3& observed, const RankingStatistic& stat,
                                      std::uint64_t draws, std::uint64_t seed,
                                      const TieRule& ties) {
  if (draws == 0) throw std::invalid_argument("monte_carlo_pvalue: draws must be positive");
  const double t = stat(observed);
  const Count n = observed.n();
  const Count m[3] = {observed.column(0), observed.column(1), observed.column(2)};
  // Label the smaller row; the other row's counts follow from the margins.
  const bool label_cases = observed.n1() <= observed.n2();
  const Count labelled = label_cases ? observed.n1() : observed.n2();

  std::vector<std::uint8_t> genotypes;
  genotypes.reserve(static_cast<std::size_t>(n));
  for (std::uint8_t k = 0; k < 3; ++k) genotypes.insert(genotypes.end(), m[k], k);

  std::mt19937_64 rng(seed);
  std::uint64_t hits = 0;
  for (std::uint64_t d = 0; d < draws; ++d) {
    Count counts[3] = {0, 0, 0};
    for (Count k = 0; k < labelled; ++k) {
      const auto r = static_cast<std::size_t>(k) +
                     uniform_below(rng, static_cast<std::uint64_t>(n - k));
      std::swap(genotypes[static_cast<std::size_t>(k)], genotypes[r]);
      ++counts[genotypes[static_cast<std::size_t>(k)]];
    }
    const Count other[3] = {m[0] - counts[0], m[1] - counts[1], m[2] - counts[2]};
    const Table2x3 table = label_cases
                               ? Table2x3(counts[0], counts[1], counts[2], other[0], other[1], other[2])
                               : Table2x3(other[0], other[1], other[2], counts[0], counts[1], counts[2]);
    const double v = stat(table);
    if (v >= t || ties.same_group(v, t)) ++hits;
  }
  MonteCarloEstimate est;
  est.draws = draws;
  est.hits = hits;
  est.estimate = static_cast<double>(hits) / static_cast<double>(draws);
  est.standard_error =
      std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(draws));
  return est;
}

}  // namespace exactpv
