// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "exactpv/batch.hpp"
#include "exactpv/exact_pvalue.hpp"
#include "support/rational_oracle.hpp"
#include "support/table2.hpp"

using namespace exactpv;
namespace oracle = exactpv::testing;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;

  void fail(const std::string& why) {
    if (passed) detail = why;
    passed = false;
  }
};

bool rounds_to(double value, double published) {
  return std::fabs(value - published) <= 0.5e-4 + 1e-12;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

template <typename Visitor>
void for_each_margins_up_to(Count max_n, Visitor&& visit) {
  for (Count n = 1; n <= max_n; ++n) oracle::for_each_margins_with_n(n, visit);
}

Margins random_margins(std::mt19937_64& rng, Count min_n, Count max_n) {
  const Count n = std::uniform_int_distribution<Count>(min_n, max_n)(rng);
  const Count n1 = std::uniform_int_distribution<Count>(0, n)(rng);
  const Count m1 = std::uniform_int_distribution<Count>(0, n)(rng);
  const Count m2 = std::uniform_int_distribution<Count>(0, n - m1)(rng);
  return Margins(m1, m2, n - m1 - m2, n1, n - n1);
}

// A table drawn from the conditional null for `m`.
Table2x3 null_draw(std::mt19937_64& rng, const Margins& m) {
  std::vector<int> g;
  for (int k = 0; k < 3; ++k) g.insert(g.end(), k == 0 ? m.m1() : k == 1 ? m.m2() : m.m3(), k);
  std::shuffle(g.begin(), g.end(), rng);
  Count x[3] = {0, 0, 0};
  for (Count s = 0; s < m.n1(); ++s) ++x[g[static_cast<std::size_t>(s)]];
  return Table2x3(x[0], x[1], x[2], m.m1() - x[0], m.m2() - x[1], m.m3() - x[2]);
}

const RankingStatistic kMax3 = RankingStatistic::builtin(StatisticId::max3);

Outcome table2_golden() {
  Outcome o;
  const Margins m = oracle::table2_margins();
  const LogFactorialCache cache(9);
  const auto cells = enumerate_reference_set(m);
  if (cells.size() != 11) o.fail("reference set has " + std::to_string(cells.size()) + " tables");
  for (const auto& row : oracle::kTable2) {
    const FreeCells c{row.x1, row.x2};
    if (std::find(cells.begin(), cells.end(), c) == cells.end()) {
      o.fail("missing table");
      continue;
    }
    const Table2x3 t = Table2x3::from_free_cells(c, m);
    const std::string at = " at (" + std::to_string(row.x1) + "," + std::to_string(row.x2) + ")";
    if (!rounds_to(catt_dominant(t), row.catt_d)) o.fail("T_D" + at);
    if (!rounds_to(catt_recessive(t), row.catt_r)) o.fail("T_R" + at);
    if (!rounds_to(catt_additive(t), row.catt_a)) o.fail("T_A" + at);
    if (!rounds_to(max3(t), row.max3)) o.fail("T_MAX3" + at);
    if (!rounds_to(pmf(c, m, cache), row.f)) o.fail("f" + at);
  }
  if (o.passed) o.detail = "11 tables, T_D/T_R/T_A/T_MAX3/f to 4 decimals";
  return o;
}

Outcome headline_pvalue() {
  Outcome o;
  const Table2x3 obs = oracle::table2_observed();
  const PValueResult r = exact_pvalue(obs, kMax3);
  if (!rounds_to(r.p_value, 0.0952)) o.fail("p = " + fmt(r.p_value));
  if (std::fabs(r.p_value - 12.0 / 126.0) > 1e-12) o.fail("p differs from 12/126");
  if (critical_set(obs, kMax3) != std::vector<FreeCells>{{0, 2}, {3, 0}, {3, 1}})
    o.fail("critical set differs");
  if (r.critical_set_size != 3 || r.reference_set_size != 11) o.fail("set sizes differ");
  if (o.passed) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "p = %.17g, |p - 12/126| = %.2g", r.p_value,
                  std::fabs(r.p_value - 12.0 / 126.0));
    o.detail = buf;
  }
  return o;
}

Outcome validity_sweep() {
  Outcome o;
  const LogFactorialCache cache(14);
  std::size_t configs = 0;
  double worst_excess = -1.0, worst_attain = 0.0;
  for_each_margins_up_to(14, [&](const Margins& m) {
    for (StatisticId id : kAllStatistics) {
      ++configs;
      const ValidityReport r = validity_check(m, RankingStatistic::builtin(id), cache, {}, 1e-10);
      worst_excess = std::max(worst_excess, r.worst_excess);
      worst_attain = std::max(worst_attain, r.worst_attainability_error);
      if (!r.passed)
        o.fail(to_string(m) + " " + std::string(name_of(id)) + " excess " + fmt(r.worst_excess));
    }
  });
  if (o.passed)
    o.detail = std::to_string(configs) + " margin x statistic configurations; max excess " +
               fmt(worst_excess) + ", max |Pr(P<=p)-p| " + fmt(worst_attain);
  return o;
}

Outcome normalization() {
  Outcome o;
  double worst = 0.0;
  const auto check = [&](const Margins& m, const LogFactorialCache& cache) {
    long double sum = 0.0L;
    for_each_in_reference_set(m, [&](FreeCells c) { sum += pmf(c, m, cache); });
    const double err = static_cast<double>(std::fabs(sum - 1.0L));
    worst = std::max(worst, err);
    if (err > 1e-12) o.fail(to_string(m) + " sums to 1 + " + fmt(err));
  };
  const LogFactorialCache small(20);
  std::size_t exhaustive = 0;
  for_each_margins_up_to(20, [&](const Margins& m) {
    ++exhaustive;
    check(m, small);
  });
  const LogFactorialCache large(2000);
  std::mt19937_64 rng(4);
  for (int k = 0; k < 1000; ++k) check(random_margins(rng, 1, 2000), large);
  if (o.passed)
    o.detail = std::to_string(exhaustive) + " exhaustive + 1000 random margins; max |sum - 1| " +
               fmt(worst);
  return o;
}

Outcome rational_oracle() {
  Outcome o;
  const LogFactorialCache cache(12);
  struct Pair {
    StatisticId id;
    oracle::ExactStatistic exact;
  };
  const Pair stats[] = {{StatisticId::catt_d, oracle::exact_catt_d},
                        {StatisticId::catt_r, oracle::exact_catt_r},
                        {StatisticId::catt_a, oracle::exact_catt_a}};
  std::size_t compared = 0;
  double worst = 0.0;
  for_each_margins_up_to(12, [&](const Margins& m) {
    const auto cells = oracle::brute_force_reference_set(m);
    std::vector<oracle::Rational> probs;
    for (FreeCells c : cells) probs.push_back(oracle::exact_pmf(c, m));
    for (const Pair& s : stats) {
      std::vector<oracle::Rational> values;
      for (FreeCells c : cells) {
        const Count k = m.n1() - c.i - c.j;
        values.push_back(s.exact(Table2x3(c.i, c.j, k, m.m1() - c.i, m.m2() - c.j, m.m3() - k)));
      }
      const auto engine_stat = RankingStatistic::builtin(s.id);
      const AttainableDistribution dist = attainable_distribution(m, engine_stat, cache);
      for (std::size_t a = 0; a < cells.size(); ++a) {
        oracle::Rational p = 0;
        for (std::size_t b = 0; b < cells.size(); ++b)
          if (values[b] >= values[a]) p += probs[b];
        const double engine =
            lookup_pvalue(dist, engine_stat(Table2x3::from_free_cells(cells[a], m))).p_value;
        const double err = std::fabs(engine - static_cast<double>(p));
        worst = std::max(worst, err);
        ++compared;
        if (err > 1e-10)
          o.fail(to_string(m) + " " + std::string(name_of(s.id)) + " error " + fmt(err));
      }
    }
  });
  if (o.passed)
    o.detail = std::to_string(compared) + " p-values vs big-integer brute force; max error " +
               fmt(worst);
  return o;
}

Outcome monte_carlo() {
  Outcome o;
  constexpr std::uint64_t kDraws = 200000;
  const auto within = [](const MonteCarloEstimate& e, double exact) {
    return std::fabs(e.estimate - exact) <= 3.0 * e.standard_error;
  };

  const Table2x3 obs = oracle::table2_observed();
  const double exact = exact_pvalue(obs, kMax3).p_value;
  if (!within(monte_carlo_pvalue(obs, kMax3, kDraws, 2013), exact))
    o.fail("worked example outside 3 SE");

  std::mt19937_64 rng(50);
  for (int k = 0; k < 5; ++k) {
    const Margins m = random_margins(rng, 10, 50);
    const Table2x3 t = null_draw(rng, m);
    const auto stat = RankingStatistic::builtin(kAllStatistics[rng() % kAllStatistics.size()]);
    const double p = exact_pvalue(t, stat).p_value;
    const MonteCarloEstimate e = monte_carlo_pvalue(t, stat, kDraws, 1000 + k);
    if (!within(e, p))
      o.fail("random case " + to_string(m) + " " + stat.name() + ": exact " + fmt(p) +
             ", estimate " + fmt(e.estimate) + " +- " + fmt(e.standard_error));
  }

  int inside = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed)
    inside += within(monte_carlo_pvalue(obs, kMax3, kDraws, seed), exact) ? 1 : 0;
  if (inside < 99) o.fail(std::to_string(inside) + "/100 repetitions within 3 SE");
  if (o.passed)
    o.detail = "worked example + 5 random cases within 3 SE; " + std::to_string(inside) +
               "/100 seeded repetitions within 3 SE";
  return o;
}

Outcome determinism() {
  Outcome o;
  // 100 cases and 100 controls per SNP, allele frequency varying per record.
  std::mt19937_64 rng(7);
  std::ostringstream input;
  std::vector<SnpRecord> records;
  for (int k = 0; k < 10000; ++k) {
    const double q = std::uniform_real_distribution<double>(0.05, 0.5)(rng);
    std::discrete_distribution<int> genotype({(1 - q) * (1 - q), 2 * q * (1 - q), q * q});
    Count x[3] = {0, 0, 0}, y[3] = {0, 0, 0};
    for (int s = 0; s < 100; ++s) ++x[genotype(rng)];
    for (int s = 0; s < 100; ++s) ++y[genotype(rng)];
    records.push_back({"snp" + std::to_string(k), Table2x3(x[0], x[1], x[2], y[0], y[1], y[2])});
  }

  const auto tmp = std::filesystem::temp_directory_path();
  std::string outputs[2];
  const unsigned workers[2] = {1, 8};
  for (int r = 0; r < 2; ++r) {
    RunConfig config;
    config.statistic = kMax3;
    config.workers = workers[r];
    const auto path = tmp / ("exactpv_determinism_" + std::to_string(workers[r]) + ".tsv");
    std::ofstream(path, std::ios::binary)
        << format_output(run_batch(std::span<const SnpRecord>(records), config).results, config);
    std::ifstream in(path, std::ios::binary);
    std::ostringstream bytes;
    bytes << in.rdbuf();
    outputs[r] = bytes.str();
    std::filesystem::remove(path);
  }
  if (outputs[0] != outputs[1]) o.fail("1-worker and 8-worker outputs differ");
  if (std::count(outputs[0].begin(), outputs[0].end(), '\n') != 10001)
    o.fail("unexpected line count");
  if (o.passed)
    o.detail = "10000 records, 1 vs 8 workers, " + std::to_string(outputs[0].size()) +
               " identical bytes";
  return o;
}

Outcome tie_epsilon() {
  Outcome o;
  std::string detail;
  for (double eps : {1e-7, 1e-9, 1e-11}) {
    const double p = exact_pvalue(oracle::table2_observed(), kMax3, TieRule{eps, 1e-12}).p_value;
    if (!rounds_to(p, 0.0952) || std::fabs(p - 12.0 / 126.0) > 1e-12)
      o.fail("eps " + fmt(eps) + " gives p = " + fmt(p));
  }
  if (o.passed) o.detail = "p = 0.0952 at eps 1e-7, 1e-9, 1e-11";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"AC1 worked-example table reproduction", table2_golden},
      {"AC2 headline p-value 0.0952 = 12/126", headline_pvalue},
      {"AC3 validity sweep n <= 14, all statistics", validity_sweep},
      {"AC4 normalization", normalization},
      {"AC5 big-integer oracle equivalence n <= 12", rational_oracle},
      {"AC6 Monte Carlo cross-check", monte_carlo},
      {"AC7 deterministic batch output", determinism},
      {"AC8 tie-epsilon robustness", tie_epsilon},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %-46s (%.2fs) %s\n", o.passed ? "PASS" : "FAIL", c.name, secs,
                o.detail.c_str());
    std::fflush(stdout);
    failures += o.passed ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures,
              std::size(criteria));
  return failures == 0 ? 0 : 1;
}
