#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace molu::bench {

inline constexpr const char* kCsvHeader =
    "experiment,activation,seed,epoch,train_loss,test_accuracy_top1,test_accuracy_top5";

struct CsvRow {
  std::string experiment;
  std::string activation;
  std::uint64_t seed = 0;
  std::uint64_t epoch = 0;
  double train_loss = 0.0;
  std::optional<double> test_accuracy_top1;
  std::optional<double> test_accuracy_top5;

  friend bool operator==(const CsvRow&, const CsvRow&) = default;
};

/// Nine significant digits, "%.9g".
std::string format_real(double v);

/// Sorts by (activation, seed, epoch) and writes header + rows.
void write_csv(std::ostream& out, std::vector<CsvRow> rows);
void write_csv_file(const std::filesystem::path& path, std::vector<CsvRow> rows);

/// Throws DataError naming `origin` and the line on any malformed row.
std::vector<CsvRow> read_csv(std::istream& in, const std::string& origin);
std::vector<CsvRow> read_csv_file(const std::filesystem::path& path);

}  // namespace molu::bench
