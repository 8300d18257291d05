#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "molu/bench/config.hpp"
#include "molu/bench/csv.hpp"
#include "molu/bench/gradcheck.hpp"
#include "molu/node.hpp"

namespace molu::bench {

// Every cmd_* returns an ExitCode and never throws for user errors.

struct Table1Options {
  double alpha = 2.0;
  double beta = 2.0;
  std::vector<double> inputs;  // empty = -7..8
  std::string output;          // also write the table here when set
  bool check = false;
  double check_tolerance = 1e-6;
};

/// Columns GeLU, SiLU, Mish, ELU(alpha=1), MoLU(alpha, beta).
std::vector<ActivationSpec> table1_specs(double alpha, double beta);
int cmd_table1(const Table1Options& opt, std::ostream& out, std::ostream& err);

int cmd_gradcheck(const GradcheckOptions& opt, std::ostream& out, std::ostream& err);

/// `flags` override `config_file`, which overrides built-in defaults. Writes
/// the CSV to cfg.out and the effective config to cfg.out + ".meta".
int cmd_node(const KeyValues& flags, const std::optional<std::filesystem::path>& config_file,
             std::ostream& out, std::ostream& err);
int cmd_mnist(const KeyValues& flags, const std::optional<std::filesystem::path>& config_file,
              std::ostream& out, std::ostream& err);
int cmd_report(const std::vector<std::filesystem::path>& csvs, std::ostream& out,
               std::ostream& err);

std::vector<CsvRow> node_csv_rows(const std::string& activation_label,
                                  const std::vector<node::SeedRun>& runs);

struct ReportGroup {
  std::string experiment;
  std::string activation;
  node::RunSummary summary;  // over per-seed minimum train loss
  std::vector<std::uint64_t> seeds;
  std::map<std::uint64_t, double> mean_top1;  // epoch -> mean over seeds
  std::map<std::uint64_t, double> mean_top5;
};

/// Groups rows by (experiment, activation) in sorted order.
std::vector<ReportGroup> build_report(const std::vector<CsvRow>& rows);
void print_report(const std::vector<ReportGroup>& groups, std::ostream& out);

}  // namespace molu::bench
