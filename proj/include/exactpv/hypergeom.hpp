// Central multivariate hypergeometric probabilities of 2x3 tables.
#pragma once

#include <vector>

#include "exactpv/table.hpp"

namespace exactpv {

// ln(k!) for k = 0..max_n, in extended precision. At n ~ 2000 the entries
// reach ~1.3e4, where a double ulp is already ~2e-12.
class LogFactorialCache {
 public:
  explicit LogFactorialCache(Count max_n);

  Count max_n() const noexcept { return static_cast<Count>(table_.size()) - 1; }
  bool covers(Count n) const noexcept { return n >= 0 && n <= max_n(); }

  // Unchecked; k must lie in [0, max_n()].
  long double operator[](Count k) const noexcept { return table_[static_cast<std::size_t>(k)]; }

 private:
  std::vector<long double> table_;
};

// ln f(i, j | m1, m2, n1, n2) for
//   f = C(m1, i) C(m2, j) C(m3, n1 - i - j) / C(n, n1).
// Throws InvalidTable when (i, j) is infeasible and std::out_of_range when
// the cache does not reach n.
double log_pmf(FreeCells cells, const Margins& margins, const LogFactorialCache& cache);

double pmf(FreeCells cells, const Margins& margins, const LogFactorialCache& cache);

// Margin-only part of ln f, shared by every table in one reference set.
long double log_pmf_normalizer(const Margins& margins, const LogFactorialCache& cache);

// Hot path for enumeration: no feasibility or coverage checks.
inline long double log_pmf_unchecked(FreeCells c, const Margins& m, long double normalizer,
                                     const LogFactorialCache& lf) noexcept {
  const Count x3 = m.n1() - c.i - c.j;
  return normalizer - lf[c.i] - lf[m.m1() - c.i] - lf[c.j] - lf[m.m2() - c.j] - lf[x3] -
         lf[m.m3() - x3];
}

}  // namespace exactpv
