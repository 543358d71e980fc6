// exactpv: exact conditional p-values for a batch of 2x3 genotype tables.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "exactpv/batch.hpp"

namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

unsigned default_jobs() {
  if (const char* env = std::getenv("EXACTPV_JOBS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "exactpv: ignoring invalid EXACTPV_JOBS='" << env << "'\n";
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact conditional enumeration p-values for 2x3 case-control genotype tables"};

  std::string stat_name;
  std::string input_path = "-";
  std::string output_path = "-";
  std::string format = "tsv";
  double tie_eps = 1e-9;
  int jobs = 0;
  long long mc_draws = 0;
  std::uint64_t mc_seed = 0;
  bool strict = false;
  long long cache_size = 4096;

  app.add_option("--stat", stat_name, "Ranking statistic")
      ->required()
      ->check(CLI::IsMember({"catt_d", "catt_r", "catt_a", "chisq", "max3", "max4", "min2"}));
  app.add_option("--input", input_path, "Input TSV path, '-' for stdin");
  app.add_option("--output", output_path, "Output path, '-' for stdout");
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"tsv", "json"}));
  app.add_option("--tie-eps", tie_eps, "Relative tolerance for tied statistic values")
      ->check(CLI::PositiveNumber);
  app.add_option("--jobs", jobs, "Worker threads (default: $EXACTPV_JOBS, else all cores)")
      ->check(CLI::PositiveNumber);
  app.add_option("--mc-draws", mc_draws, "Monte Carlo cross-check draws per record (0 = off)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--mc-seed", mc_seed, "Monte Carlo base seed");
  app.add_flag("--strict", strict, "Abort on the first malformed record");
  app.add_option("--cache-size", cache_size, "Memoized distributions (0 = no memoization)")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsageError;
  }

  exactpv::RunConfig config;
  config.statistic = exactpv::RankingStatistic::builtin(*exactpv::parse_statistic(stat_name));
  config.ties.relative_eps = tie_eps;
  config.workers = jobs > 0 ? static_cast<unsigned>(jobs) : default_jobs();
  config.mc_draws = static_cast<std::uint64_t>(mc_draws);
  config.mc_seed = mc_seed;
  config.format = format == "json" ? exactpv::OutputFormat::json : exactpv::OutputFormat::tsv;
  config.cache_capacity = static_cast<std::size_t>(cache_size);

  std::ifstream file;
  std::istream* in = &std::cin;
  if (input_path != "-") {
    file.open(input_path);
    if (!file) {
      std::cerr << "exactpv: cannot open input '" << input_path << "'\n";
      return kUsageError;
    }
    in = &file;
  }

  std::vector<exactpv::InputRow> rows;
  try {
    rows = exactpv::read_rows(*in);
  } catch (const exactpv::ParseError& e) {
    std::cerr << "exactpv: " << e.what() << '\n';
    return kDataError;
  }
  if (strict) {
    for (const auto& row : rows) {
      if (!row.record) {
        std::cerr << "exactpv: " << row.error << '\n';
        return kDataError;
      }
    }
  }

  const exactpv::BatchOutput out = exactpv::run_batch(rows, config);
  std::size_t failed = 0;
  for (const auto& r : out.results) {
    if (r.ok()) continue;
    ++failed;
    if (strict) {
      std::cerr << "exactpv: " << r.error << '\n';
      return kDataError;
    }
  }

  const std::string text = exactpv::format_output(out.results, config);
  if (output_path == "-") {
    std::cout << text;
  } else {
    std::ofstream of(output_path, std::ios::binary);
    if (!of) {
      std::cerr << "exactpv: cannot open output '" << output_path << "'\n";
      return kUsageError;
    }
    of << text;
  }
  if (failed > 0)
    std::cerr << "exactpv: " << failed << " of " << out.results.size()
              << " records failed; see the error column\n";
  return 0;
}
