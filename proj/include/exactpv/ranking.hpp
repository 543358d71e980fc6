// Ranking statistics that order a reference set. Every statistic is oriented
// so that larger scores are more hostile to the null.
#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "exactpv/table.hpp"

namespace exactpv {

enum class StatisticId { catt_d, catt_r, catt_a, chisq, max3, max4, min2 };

inline constexpr std::array<StatisticId, 7> kAllStatistics = {
    StatisticId::catt_d, StatisticId::catt_r, StatisticId::catt_a, StatisticId::chisq,
    StatisticId::max3,   StatisticId::max4,   StatisticId::min2};

std::string_view name_of(StatisticId id) noexcept;
std::optional<StatisticId> parse_statistic(std::string_view name) noexcept;

// Cochran-Armitage trend statistics with dominant (0,1,1), recessive (0,0,1)
// and additive (0,1,2) scores. Each is 0 when its variance term vanishes.
double catt_dominant(const Table2x3& t) noexcept;
double catt_recessive(const Table2x3& t) noexcept;
double catt_additive(const Table2x3& t) noexcept;

// Pearson X^2 over the six cells; zero-total columns are skipped and a table
// with an empty row scores 0.
double pearson_chi2(const Table2x3& t) noexcept;

// Upper tail of the chi-square distribution, df in {1, 2}. Throws
// std::domain_error for negative x or another df.
double chi2_survival(double x, int df);

double max3(const Table2x3& t) noexcept;
// max(T_D, T_R, T_A, X^2) on the raw statistic scale.
double max4(const Table2x3& t) noexcept;
// -min(P(chi2_1 >= T_A), P(chi2_2 >= X^2)), in [-1, 0].
double min2(const Table2x3& t) noexcept;

double evaluate(StatisticId id, const Table2x3& t) noexcept;

// A named scoring rule. The built-in statistics are available through
// RankingStatistic::builtin; any other pure function of the six counts can be
// plugged in with its own unique name (the name keys memoized results).
class RankingStatistic {
 public:
  using Score = std::function<double(const Table2x3&)>;

  RankingStatistic(std::string name, Score score);
  static RankingStatistic builtin(StatisticId id);

  const std::string& name() const noexcept { return name_; }
  std::optional<StatisticId> id() const noexcept { return id_; }

  double operator()(const Table2x3& t) const {
    return id_ ? evaluate(*id_, t) : score_(t);
  }

 private:
  RankingStatistic() = default;

  std::string name_;
  Score score_;
  std::optional<StatisticId> id_;
};

}  // namespace exactpv
