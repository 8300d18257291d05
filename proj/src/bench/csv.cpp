#include "molu/bench/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <tuple>

#include "molu/bench/config.hpp"

namespace molu::bench {
namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void bad_row(const std::string& origin, std::size_t lineno, const std::string& why) {
  throw DataError(origin + ":" + std::to_string(lineno) + ": " + why);
}

std::uint64_t parse_count(const std::string& s, const std::string& origin, std::size_t lineno,
                          const char* field) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    bad_row(origin, lineno, std::string("bad ") + field + " '" + s + "'");
  return v;
}

double parse_real(const std::string& s, const std::string& origin, std::size_t lineno,
                  const char* field) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') bad_row(origin, lineno, std::string("bad ") + field + " '" + s + "'");
  return v;
}

}  // namespace

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_csv(std::ostream& out, std::vector<CsvRow> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const CsvRow& a, const CsvRow& b) {
    return std::tie(a.activation, a.seed, a.epoch, a.experiment) <
           std::tie(b.activation, b.seed, b.epoch, b.experiment);
  });
  out << kCsvHeader << "\n";
  for (const CsvRow& r : rows) {
    out << r.experiment << ',' << r.activation << ',' << r.seed << ',' << r.epoch << ','
        << format_real(r.train_loss) << ',';
    if (r.test_accuracy_top1) out << format_real(*r.test_accuracy_top1);
    out << ',';
    if (r.test_accuracy_top5) out << format_real(*r.test_accuracy_top5);
    out << '\n';
  }
}

void write_csv_file(const std::filesystem::path& path, std::vector<CsvRow> rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_csv(out, std::move(rows));
  if (!out) throw DataError("write failed for " + path.string());
}

std::vector<CsvRow> read_csv(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(origin + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw DataError(origin + ":1: unexpected header '" + line + "'");

  std::vector<CsvRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 7)
      bad_row(origin, lineno, "expected 7 fields, found " + std::to_string(f.size()));
    CsvRow r;
    r.experiment = f[0];
    r.activation = f[1];
    if (r.experiment.empty() || r.activation.empty())
      bad_row(origin, lineno, "empty experiment or activation");
    r.seed = parse_count(f[2], origin, lineno, "seed");
    r.epoch = parse_count(f[3], origin, lineno, "epoch");
    r.train_loss = parse_real(f[4], origin, lineno, "train_loss");
    if (!f[5].empty()) r.test_accuracy_top1 = parse_real(f[5], origin, lineno, "test_accuracy_top1");
    if (!f[6].empty()) r.test_accuracy_top5 = parse_real(f[6], origin, lineno, "test_accuracy_top5");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<CsvRow> read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  return read_csv(in, path.string());
}

}  // namespace molu::bench
