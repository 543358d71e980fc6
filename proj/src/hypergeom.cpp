#include "exactpv/hypergeom.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace exactpv {

LogFactorialCache::LogFactorialCache(Count max_n) {
  if (max_n < 0) throw std::invalid_argument("LogFactorialCache: negative size");
  table_.resize(static_cast<std::size_t>(max_n) + 1);
  table_[0] = 0.0L;
  for (std::size_t k = 1; k < table_.size(); ++k)
    table_[k] = std::lgamma(static_cast<long double>(k) + 1.0L);
  // lgammal(2) can come back as a tiny non-zero value; ln(1!) is exactly 0.
  if (table_.size() > 1) table_[1] = 0.0L;
}

long double log_pmf_normalizer(const Margins& m, const LogFactorialCache& lf) {
  if (!lf.covers(m.n()))
    throw std::out_of_range("log-factorial cache covers n <= " + std::to_string(lf.max_n()) +
                            ", table has n = " + std::to_string(m.n()));
  return lf[m.m1()] + lf[m.m2()] + lf[m.m3()] + lf[m.n1()] + lf[m.n2()] - lf[m.n()];
}

double log_pmf(FreeCells cells, const Margins& margins, const LogFactorialCache& cache) {
  if (!is_feasible(cells, margins)) throw InvalidTable("table outside reference set");
  const long double norm = log_pmf_normalizer(margins, cache);
  return static_cast<double>(log_pmf_unchecked(cells, margins, norm, cache));
}

double pmf(FreeCells cells, const Margins& margins, const LogFactorialCache& cache) {
  if (!is_feasible(cells, margins)) throw InvalidTable("table outside reference set");
  const long double norm = log_pmf_normalizer(margins, cache);
  return static_cast<double>(std::exp(log_pmf_unchecked(cells, margins, norm, cache)));
}

}  // namespace exactpv
