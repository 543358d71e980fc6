#include "exactpv/table.hpp"

#include <algorithm>

namespace exactpv {

Margins::Margins(Count m1, Count m2, Count m3, Count n1, Count n2)
    : m1_(m1), m2_(m2), m3_(m3), n1_(n1), n2_(n2) {
  if (m1 < 0 || m2 < 0 || m3 < 0 || n1 < 0 || n2 < 0)
    throw InvalidTable("margins must be non-negative");
  if (n1 + n2 < 1) throw InvalidTable("empty table");
  if (m1 + m2 + m3 != n1 + n2)
    throw InvalidTable("column totals do not match row totals");
}

std::string to_string(const Margins& m) {
  return "(" + std::to_string(m.m1()) + "," + std::to_string(m.m2()) + "," +
         std::to_string(m.m3()) + "; " + std::to_string(m.n1()) + "," +
         std::to_string(m.n2()) + "; " + std::to_string(m.n()) + ")";
}

Table2x3::Table2x3(Count x1, Count x2, Count x3, Count y1, Count y2, Count y3)
    : x_{x1, x2, x3}, y_{y1, y2, y3} {
  for (int k = 0; k < 3; ++k)
    if (x_[k] < 0 || y_[k] < 0) throw InvalidTable("negative count");
  if (n() < 1) throw InvalidTable("empty table");
}

Table2x3 Table2x3::from_free_cells(FreeCells cells, const Margins& m) {
  if (!is_feasible(cells, m)) throw InvalidTable("table outside reference set");
  const Count x3 = m.n1() - cells.i - cells.j;
  return Table2x3(Unchecked{}, cells.i, cells.j, x3, m.m1() - cells.i, m.m2() - cells.j,
                  m.m3() - x3);
}

Table2x3 Table2x3::swapped_rows() const {
  return Table2x3(Unchecked{}, y_[0], y_[1], y_[2], x_[0], x_[1], x_[2]);
}

Margins margins_of(const Table2x3& t) {
  return Margins(t.column(0), t.column(1), t.column(2), t.n1(), t.n2());
}

bool is_feasible(FreeCells c, const Margins& m) noexcept {
  const Count x3 = m.n1() - c.i - c.j;
  return c.i >= 0 && c.j >= 0 && x3 >= 0 && c.i <= m.m1() && c.j <= m.m2() && x3 <= m.m3();
}

std::vector<FreeCells> enumerate_reference_set(const Margins& margins) {
  std::vector<FreeCells> cells;
  cells.reserve(reference_set_size(margins));
  for_each_in_reference_set(margins, [&](FreeCells c) { cells.push_back(c); });
  return cells;
}

std::uint64_t reference_set_size(const Margins& m) noexcept {
  const Count n1 = m.n1();
  const Count i_lo = std::max<Count>(0, n1 - m.m2() - m.m3());
  const Count i_hi = std::min(m.m1(), n1);
  std::uint64_t total = 0;
  for (Count i = i_lo; i <= i_hi; ++i) {
    const Count j_lo = std::max<Count>(0, n1 - i - m.m3());
    const Count j_hi = std::min(m.m2(), n1 - i);
    total += static_cast<std::uint64_t>(j_hi - j_lo + 1);
  }
  return total;
}

}  // namespace exactpv
