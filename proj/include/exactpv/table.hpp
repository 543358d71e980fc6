// 2x3 case-control genotype tables and their conditional reference sets.
#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace exactpv {

using Count = std::int64_t;

class InvalidTable : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Row and column totals that condition the reference set.
class Margins {
 public:
  // Throws InvalidTable unless all totals are non-negative, n1 + n2 >= 1 and
  // m1 + m2 + m3 == n1 + n2.
  Margins(Count m1, Count m2, Count m3, Count n1, Count n2);

  Count m1() const noexcept { return m1_; }
  Count m2() const noexcept { return m2_; }
  Count m3() const noexcept { return m3_; }
  Count n1() const noexcept { return n1_; }
  Count n2() const noexcept { return n2_; }
  Count n() const noexcept { return n1_ + n2_; }

  friend bool operator==(const Margins&, const Margins&) = default;

 private:
  Count m1_, m2_, m3_, n1_, n2_;
};

std::string to_string(const Margins& margins);

// The two free cells (cases' AA and AB counts) that pick a table out of the
// reference set.
struct FreeCells {
  Count i = 0;
  Count j = 0;

  friend bool operator==(const FreeCells&, const FreeCells&) = default;
  friend auto operator<=>(const FreeCells&, const FreeCells&) = default;
};

// Genotype counts: row x = cases, row y = controls; columns AA, AB, BB.
class Table2x3 {
 public:
  // Throws InvalidTable on negative counts or an empty table.
  Table2x3(Count x1, Count x2, Count x3, Count y1, Count y2, Count y3);

  // Rebuilds the table selected by `cells` within `margins`. Throws
  // InvalidTable if the pair lies outside the reference set.
  static Table2x3 from_free_cells(FreeCells cells, const Margins& margins);

  Count x1() const noexcept { return x_[0]; }
  Count x2() const noexcept { return x_[1]; }
  Count x3() const noexcept { return x_[2]; }
  Count y1() const noexcept { return y_[0]; }
  Count y2() const noexcept { return y_[1]; }
  Count y3() const noexcept { return y_[2]; }

  // Case and control counts for genotype column k in {0, 1, 2}.
  Count cases(int k) const noexcept { return x_[k]; }
  Count controls(int k) const noexcept { return y_[k]; }

  Count n1() const noexcept { return x_[0] + x_[1] + x_[2]; }
  Count n2() const noexcept { return y_[0] + y_[1] + y_[2]; }
  Count n() const noexcept { return n1() + n2(); }
  Count column(int k) const noexcept { return x_[k] + y_[k]; }

  FreeCells free_cells() const noexcept { return {x_[0], x_[1]}; }

  // Cases and controls exchanged.
  Table2x3 swapped_rows() const;

  friend bool operator==(const Table2x3&, const Table2x3&) = default;

 private:
  struct Unchecked {};
  Table2x3(Unchecked, Count x1, Count x2, Count x3, Count y1, Count y2, Count y3) noexcept
      : x_{x1, x2, x3}, y_{y1, y2, y3} {}

  Count x_[3];
  Count y_[3];
};

Margins margins_of(const Table2x3& table);

// True iff (i, j) selects a table with non-negative cells under `margins`.
bool is_feasible(FreeCells cells, const Margins& margins) noexcept;

// Every feasible (i, j), lexicographic in (i, j).
std::vector<FreeCells> enumerate_reference_set(const Margins& margins);

// Visits the reference set in the same order as enumerate_reference_set
// without materializing it.
template <typename Visitor>
void for_each_in_reference_set(const Margins& margins, Visitor&& visit) {
  const Count n1 = margins.n1();
  const Count i_lo = std::max<Count>(0, n1 - margins.m2() - margins.m3());
  const Count i_hi = std::min(margins.m1(), n1);
  for (Count i = i_lo; i <= i_hi; ++i) {
    const Count j_lo = std::max<Count>(0, n1 - i - margins.m3());
    const Count j_hi = std::min(margins.m2(), n1 - i);
    for (Count j = j_lo; j <= j_hi; ++j) visit(FreeCells{i, j});
  }
}

// Number of tables in the reference set, counted per row of i.
std::uint64_t reference_set_size(const Margins& margins) noexcept;

}  // namespace exactpv
