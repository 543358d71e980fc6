#include "exactpv/batch.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <sstream>
#include <string_view>
#include <thread>

#include <json.hpp>

namespace exactpv {

namespace {

constexpr std::size_t kColumns = std::size(kInputColumns);

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

Count parse_count(std::string_view field, const char* name) {
  Count value = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc{} || ptr != last)
    throw std::invalid_argument(std::string("field ") + name + ": not an integer '" +
                                std::string(field) + "'");
  if (value < 0)
    throw std::invalid_argument(std::string("field ") + name + ": negative count " +
                                std::string(field));
  return value;
}

SnpRecord parse_row(std::string_view line) {
  const auto fields = split_tabs(line);
  if (fields.size() != kColumns)
    throw std::invalid_argument("expected " + std::to_string(kColumns) + " fields, found " +
                                std::to_string(fields.size()));
  if (fields[0].empty()) throw std::invalid_argument("field snp_id: empty");
  Count c[6];
  for (std::size_t k = 0; k < 6; ++k) c[k] = parse_count(fields[k + 1], kInputColumns[k + 1]);
  return SnpRecord{std::string(fields[0]), Table2x3(c[0], c[1], c[2], c[3], c[4], c[5])};
}

std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

ParseError::ParseError(std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

std::vector<InputRow> read_rows(std::istream& in) {
  std::string raw;
  std::size_t line_no = 0;
  bool have_header = false;
  while (!have_header && std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = strip_cr(raw);
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    const bool matches =
        fields.size() == kColumns &&
        std::equal(fields.begin(), fields.end(), std::begin(kInputColumns),
                   [](std::string_view a, const char* b) { return a == b; });
    if (!matches)
      throw ParseError(line_no, "missing header 'snp_id\\tx1\\tx2\\tx3\\ty1\\ty2\\ty3'");
    have_header = true;
  }
  if (!have_header) throw ParseError(line_no, "missing header (empty input)");

  std::vector<InputRow> rows;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = strip_cr(raw);
    if (line.empty()) continue;
    InputRow row;
    row.line = line_no;
    row.snp_id = std::string(line.substr(0, line.find('\t')));
    try {
      row.record = parse_row(line);
    } catch (const std::exception& e) {
      row.error = "line " + std::to_string(line_no) + ": " + e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SnpRecord> parse_input(std::istream& in) {
  std::vector<SnpRecord> records;
  for (InputRow& row : read_rows(in)) {
    if (!row.record) throw ParseError(row.line, row.error.substr(row.error.find(": ") + 2));
    records.push_back(std::move(*row.record));
  }
  return records;
}

std::string format_input(std::span<const SnpRecord> records) {
  std::string out;
  for (std::size_t k = 0; k < kColumns; ++k) {
    if (k) out += '\t';
    out += kInputColumns[k];
  }
  out += '\n';
  for (const SnpRecord& r : records) {
    const Table2x3& t = r.table;
    out += r.snp_id;
    for (Count c : {t.x1(), t.x2(), t.x3(), t.y1(), t.y2(), t.y3()}) {
      out += '\t';
      out += std::to_string(c);
    }
    out += '\n';
  }
  return out;
}

void RunConfig::validate() const {
  if (!(ties.relative_eps > 0.0)) throw std::invalid_argument("tie epsilon must be positive");
  if (workers < 1) throw std::invalid_argument("worker count must be at least 1");
}

std::uint64_t record_seed(std::uint64_t base_seed, std::uint64_t index) noexcept {
  return splitmix64(base_seed + index);
}

BatchOutput run_batch(std::span<const InputRow> rows, const RunConfig& config) {
  config.validate();
  Count max_n = 1;
  for (const InputRow& row : rows)
    if (row.record) max_n = std::max(max_n, row.record->table.n());

  PValueEngine engine(max_n, EngineOptions{config.ties, config.cache_capacity});
  BatchOutput out;
  out.results.resize(rows.size());

  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t k = next++; k < rows.size(); k = next++) {
      const InputRow& row = rows[k];
      BatchResult& res = out.results[k];
      res.snp_id = row.record ? row.record->snp_id : row.snp_id;
      if (!row.record) {
        res.error = row.error;
        continue;
      }
      try {
        res.result = engine.pvalue(row.record->table, config.statistic);
        if (config.mc_draws > 0)
          res.monte_carlo = monte_carlo_pvalue(row.record->table, config.statistic,
                                               config.mc_draws, record_seed(config.mc_seed, k),
                                               config.ties);
      } catch (const std::exception& e) {
        res.result.reset();
        res.error = "line " + std::to_string(row.line) + ": " + e.what();
      }
    }
  };

  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(config.workers, std::max<std::size_t>(rows.size(), 1)));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  out.cache = engine.cache_stats();
  return out;
}

BatchOutput run_batch(std::span<const SnpRecord> records, const RunConfig& config) {
  std::vector<InputRow> rows;
  rows.reserve(records.size());
  for (std::size_t k = 0; k < records.size(); ++k)
    rows.push_back(InputRow{k + 2, records[k].snp_id, records[k], {}});
  return run_batch(rows, config);
}

std::string format_output(std::span<const BatchResult> results, const RunConfig& config) {
  const bool with_mc = config.mc_draws > 0;
  const bool with_error =
      std::any_of(results.begin(), results.end(), [](const BatchResult& r) { return !r.ok(); });
  const std::string& stat = config.statistic.name();

  if (config.format == OutputFormat::json) {
    auto array = nlohmann::ordered_json::array();
    for (const BatchResult& r : results) {
      nlohmann::ordered_json obj;
      obj["snp_id"] = r.snp_id;
      obj["statistic"] = stat;
      if (r.ok()) {
        obj["observed_t"] = r.result->observed_statistic;
        obj["p_exact"] = r.result->p_value;
        obj["ref_set_size"] = r.result->reference_set_size;
        obj["crit_set_size"] = r.result->critical_set_size;
      } else {
        for (const char* key : {"observed_t", "p_exact", "ref_set_size", "crit_set_size"})
          obj[key] = nullptr;
      }
      if (with_mc) {
        if (r.monte_carlo) {
          obj["mc_estimate"] = r.monte_carlo->estimate;
          obj["mc_se"] = r.monte_carlo->standard_error;
        } else {
          obj["mc_estimate"] = nullptr;
          obj["mc_se"] = nullptr;
        }
      }
      if (with_error) obj["error"] = r.ok() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(r.error);
      array.push_back(std::move(obj));
    }
    return array.dump(2) + "\n";
  }

  std::ostringstream out;
  out << "snp_id\tstatistic\tobserved_t\tp_exact\tref_set_size\tcrit_set_size";
  if (with_mc) out << "\tmc_estimate\tmc_se";
  if (with_error) out << "\terror";
  out << '\n';
  for (const BatchResult& r : results) {
    out << r.snp_id << '\t' << stat << '\t';
    if (r.ok()) {
      out << shortest(r.result->observed_statistic) << '\t' << shortest(r.result->p_value) << '\t'
          << r.result->reference_set_size << '\t' << r.result->critical_set_size;
    } else {
      out << "NA\tNA\tNA\tNA";
    }
    if (with_mc) {
      if (r.monte_carlo)
        out << '\t' << shortest(r.monte_carlo->estimate) << '\t'
            << shortest(r.monte_carlo->standard_error);
      else
        out << "\tNA\tNA";
    }
    if (with_error) out << '\t' << (r.ok() ? "" : r.error);
    out << '\n';
  }
  return out.str();
}

}  // namespace exactpv
