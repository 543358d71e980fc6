#include "exactpv/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace exactpv {

namespace {

constexpr std::array<std::string_view, 7> kNames = {"catt_d", "catt_r", "catt_a", "chisq",
                                                     "max3",   "max4",   "min2"};

// n * (n * s - n1 * S)^2 / (n1 * (n - n1) * (n * S2 - S^2)) for case score
// sum s, total score sum S and total squared-score sum S2.
double trend(double n, double n1, double case_sum, double total_sum, double total_sq) noexcept {
  const double variance = n * total_sq - total_sum * total_sum;
  const double denom = n1 * (n - n1) * variance;
  if (denom <= 0.0) return 0.0;
  const double dev = n * case_sum - n1 * total_sum;
  return n * dev * dev / denom;
}

}  // namespace

std::string_view name_of(StatisticId id) noexcept { return kNames[static_cast<std::size_t>(id)]; }

std::optional<StatisticId> parse_statistic(std::string_view name) noexcept {
  for (StatisticId id : kAllStatistics)
    if (name_of(id) == name) return id;
  return std::nullopt;
}

double catt_dominant(const Table2x3& t) noexcept {
  // Scores (1,0,0) on the AA column; same statistic as the scores (0,1,1).
  const auto m1 = static_cast<double>(t.column(0));
  return trend(static_cast<double>(t.n()), static_cast<double>(t.n1()),
               static_cast<double>(t.x1()), m1, m1);
}

double catt_recessive(const Table2x3& t) noexcept {
  const auto m3 = static_cast<double>(t.column(2));
  return trend(static_cast<double>(t.n()), static_cast<double>(t.n1()),
               static_cast<double>(t.x3()), m3, m3);
}

double catt_additive(const Table2x3& t) noexcept {
  const auto m2 = static_cast<double>(t.column(1));
  const auto m3 = static_cast<double>(t.column(2));
  return trend(static_cast<double>(t.n()), static_cast<double>(t.n1()),
               static_cast<double>(t.x2() + 2 * t.x3()), m2 + 2.0 * m3, m2 + 4.0 * m3);
}

double pearson_chi2(const Table2x3& t) noexcept {
  const auto n1 = static_cast<double>(t.n1());
  const auto n2 = static_cast<double>(t.n2());
  if (n1 == 0.0 || n2 == 0.0) return 0.0;
  const double n = n1 + n2;
  double total = 0.0;
  for (int k = 0; k < 3; ++k) {
    const auto mk = static_cast<double>(t.column(k));
    if (mk == 0.0) continue;
    const double e_case = n1 * mk / n;
    const double e_ctrl = n2 * mk / n;
    const double d_case = static_cast<double>(t.cases(k)) - e_case;
    const double d_ctrl = static_cast<double>(t.controls(k)) - e_ctrl;
    total += d_case * d_case / e_case + d_ctrl * d_ctrl / e_ctrl;
  }
  return total;
}

double chi2_survival(double x, int df) {
  if (!(x >= 0.0)) throw std::domain_error("chi2_survival: x must be non-negative");
  switch (df) {
    case 1:
      return std::erfc(std::sqrt(0.5 * x));
    case 2:
      return std::exp(-0.5 * x);
    default:
      throw std::domain_error("chi2_survival: df must be 1 or 2");
  }
}

double max3(const Table2x3& t) noexcept {
  return std::max({catt_dominant(t), catt_recessive(t), catt_additive(t)});
}

double max4(const Table2x3& t) noexcept { return std::max(max3(t), pearson_chi2(t)); }

double min2(const Table2x3& t) noexcept {
  return -std::min(chi2_survival(catt_additive(t), 1), chi2_survival(pearson_chi2(t), 2));
}

double evaluate(StatisticId id, const Table2x3& t) noexcept {
  switch (id) {
    case StatisticId::catt_d: return catt_dominant(t);
    case StatisticId::catt_r: return catt_recessive(t);
    case StatisticId::catt_a: return catt_additive(t);
    case StatisticId::chisq: return pearson_chi2(t);
    case StatisticId::max3: return max3(t);
    case StatisticId::max4: return max4(t);
    case StatisticId::min2: return min2(t);
  }
  return 0.0;
}

RankingStatistic::RankingStatistic(std::string name, Score score)
    : name_(std::move(name)), score_(std::move(score)) {
  if (name_.empty()) throw std::invalid_argument("ranking statistic needs a name");
  if (!score_) throw std::invalid_argument("ranking statistic needs a scoring function");
  if (parse_statistic(name_))
    throw std::invalid_argument("name '" + name_ + "' is reserved for a built-in statistic");
}

RankingStatistic RankingStatistic::builtin(StatisticId id) {
  RankingStatistic stat;
  stat.name_ = std::string(name_of(id));
  stat.id_ = id;
  return stat;
}

}  // namespace exactpv
