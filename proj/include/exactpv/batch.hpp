// Batch processing of per-SNP genotype count tables.
//
// Input is tab-separated text with the header
//   snp_id  x1  x2  x3  y1  y2  y3
// (cases AA/AB/BB, then controls AA/AB/BB), LF or CRLF line endings.
#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "exactpv/engine.hpp"
#include "exactpv/exact_pvalue.hpp"
#include "exactpv/ranking.hpp"
#include "exactpv/table.hpp"

namespace exactpv {

inline constexpr const char* kInputColumns[] = {"snp_id", "x1", "x2", "x3", "y1", "y2", "y3"};

struct SnpRecord {
  std::string snp_id;
  Table2x3 table;

  friend bool operator==(const SnpRecord&, const SnpRecord&) = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A data row that either parsed into a record or carries the reason it did not.
struct InputRow {
  std::size_t line = 0;
  std::string snp_id;
  std::optional<SnpRecord> record;
  std::string error;
};

// Reads every data row, keeping malformed rows with their error. Blank lines
// are skipped. Throws ParseError only for a missing or wrong header.
std::vector<InputRow> read_rows(std::istream& in);

// Strict variant: throws ParseError at the first malformed row.
std::vector<SnpRecord> parse_input(std::istream& in);

// Inverse of parse_input for valid records.
std::string format_input(std::span<const SnpRecord> records);

enum class OutputFormat { tsv, json };

struct RunConfig {
  RankingStatistic statistic = RankingStatistic::builtin(StatisticId::max3);
  TieRule ties;
  unsigned workers = 1;
  std::uint64_t mc_draws = 0;
  std::uint64_t mc_seed = 0;
  OutputFormat format = OutputFormat::tsv;
  std::size_t cache_capacity = 4096;

  // Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct BatchResult {
  std::string snp_id;
  std::optional<PValueResult> result;
  std::optional<MonteCarloEstimate> monte_carlo;
  std::string error;

  bool ok() const noexcept { return result.has_value(); }
};

struct BatchOutput {
  std::vector<BatchResult> results;  // input order
  CacheStats cache;
};

// Seed for the Monte Carlo check of the record at 0-based position `index`:
// splitmix64(base_seed + index).
std::uint64_t record_seed(std::uint64_t base_seed, std::uint64_t index) noexcept;

// Computes every row on a pool of config.workers threads. Results depend only
// on the rows and the config, never on scheduling.
BatchOutput run_batch(std::span<const InputRow> rows, const RunConfig& config);
BatchOutput run_batch(std::span<const SnpRecord> records, const RunConfig& config);

// TSV columns: snp_id statistic observed_t p_exact ref_set_size crit_set_size,
// then mc_estimate mc_se when Monte Carlo is on, then error when any row
// failed. Failed rows print NA in every numeric column. Reals use the
// shortest decimal that round-trips. JSON carries the same fields per object.
std::string format_output(std::span<const BatchResult> results, const RunConfig& config);

}  // namespace exactpv
