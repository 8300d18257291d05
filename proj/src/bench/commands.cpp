#include "molu/bench/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "molu/bench/mnist_experiment.hpp"
#include "molu/bench/reference_values.hpp"
#include "molu/datasets.hpp"

namespace molu::bench {
namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.8e", v);
  return buf;
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

KeyValues load_settings(const KeyValues& flags,
                        const std::optional<std::filesystem::path>& config_file) {
  KeyValues file;
  if (config_file) file = read_key_values(*config_file);
  return merge({&file, &flags});
}

void write_sidecar(const std::string& csv_path, const KeyValues& effective) {
  const std::string path = csv_path + ".meta";
  std::ofstream meta(path, std::ios::binary);
  if (!meta) throw DataError("cannot write " + path);
  meta << "# effective configuration\n" << format_key_values(effective);
}

// Maps exceptions to exit codes for the cmd_* entry points.
template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const data::IdxError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace

std::vector<ActivationSpec> table1_specs(double alpha, double beta) {
  return {ActivationSpec::of(ActivationKind::GeLU), ActivationSpec::of(ActivationKind::SiLU),
          ActivationSpec::of(ActivationKind::Mish), ActivationSpec::elu(1.0),
          ActivationSpec::molu(alpha, beta)};
}

int cmd_table1(const Table1Options& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ActivationSpec molu_spec = ActivationSpec::molu(opt.alpha, opt.beta);
    try {
      molu_spec.validate();
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
    std::vector<double> inputs = opt.inputs;
    if (inputs.empty())
      for (int x = kTable1FirstInput; x < kTable1FirstInput + static_cast<int>(kTable1Rows); ++x)
        inputs.push_back(x);
    for (double x : inputs)
      if (!std::isfinite(x)) throw UsageError("inputs must be finite");

    const auto specs = table1_specs(opt.alpha, opt.beta);
    const auto table = comparison_table(inputs, specs);

    std::ostringstream os;
    os << std::left << std::setw(8) << "Input";
    for (const auto& s : specs) os << std::right << std::setw(17) << activation_label(s);
    os << "\n";
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      os << std::left << std::setw(8) << inputs[i];
      for (double v : table[i]) os << std::right << std::setw(17) << sci(v);
      os << "\n";
    }
    out << os.str();
    if (!opt.output.empty()) {
      std::ofstream f(opt.output, std::ios::binary);
      if (!f) throw DataError("cannot write " + opt.output);
      f << os.str();
    }
    if (!opt.check) return static_cast<int>(kExitOk);

    std::size_t compared = 0, failed = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      const double x = inputs[i];
      const double row = x - kTable1FirstInput;
      if (x != std::floor(x) || row < 0 || row >= static_cast<double>(kTable1Rows)) continue;
      for (std::size_t c = 0; c < kTable1Cols; ++c) {
        const double ref = kTable1[static_cast<std::size_t>(row)][c];
        const double rel = relative_error(table[i][c], ref);
        ++compared;
        worst = std::max(worst, rel);
        if (rel > opt.check_tolerance) {
          ++failed;
          out << "MISMATCH x=" << x << " " << activation_label(specs[c]) << ": got "
              << sci(table[i][c]) << ", published " << sci(ref) << " (rel " << rel << ")\n";
        }
      }
    }
    out << "check: " << compared << " cells compared, " << failed
        << " outside tolerance " << opt.check_tolerance << ", worst relative error " << worst
        << "\n";
    return static_cast<int>(failed == 0 ? kExitOk : kExitCheckFailed);
  });
}

int cmd_gradcheck(const GradcheckOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opt.samples == 0) throw UsageError("samples must be >= 1");
    if (!(opt.tolerance > 0.0)) throw UsageError("tolerance must be positive");
    for (const auto& s : opt.activations) {
      try {
        s.validate();
      } catch (const DomainError& e) {
        throw UsageError(e.what());
      }
    }
    const auto lines = run_gradcheck(opt);
    bool all_pass = true;
    auto describe = [](const CheckResult& r) {
      std::ostringstream os;
      os << (r.pass() ? "ok" : "FAIL") << " worst_rel=" << std::setprecision(3) << r.worst_rel
         << " worst_abs=" << r.worst_abs;
      if (r.failures) os << " failures=" << r.failures << " at=" << r.worst_at;
      return os.str();
    };
    for (const auto& l : lines) {
      all_pass = all_pass && l.pass();
      out << std::left << std::setw(10) << activation_label(l.activation)
          << " scalar[" << l.scalar.points << "]: " << describe(l.scalar);
      if (opt.network) out << "  mlp: " << describe(l.network);
      if (opt.node) out << "  node: " << describe(l.node);
      out << "\n";
    }
    out << (all_pass ? "gradcheck passed" : "gradcheck FAILED") << "\n";
    return static_cast<int>(all_pass ? kExitOk : kExitCheckFailed);
  });
}

std::vector<CsvRow> node_csv_rows(const std::string& activation_label,
                                  const std::vector<node::SeedRun>& runs) {
  std::vector<CsvRow> rows;
  for (const auto& run : runs)
    for (const auto& rec : run.records)
      rows.push_back({"node", activation_label, run.seed, rec.epoch, rec.train_loss, {}, {}});
  return rows;
}

int cmd_node(const KeyValues& flags, const std::optional<std::filesystem::path>& config_file,
             std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const NodeExperimentConfig cfg = NodeExperimentConfig::from(load_settings(flags, config_file));
    std::vector<CsvRow> rows;
    for (const ActivationSpec& act : cfg.activations) {
      const std::string label = activation_label(act);
      const auto runs = node::train_node(act, cfg.train, cfg.lv);
      const auto csv = node_csv_rows(label, runs);
      rows.insert(rows.end(), csv.begin(), csv.end());

      for (const auto& r : runs)
        if (r.diverged) out << label << " seed " << r.seed << " diverged: " << r.diverge_reason << "\n";
      const node::RunSummary s = node::aggregate_runs(runs);
      out << std::left << std::setw(10) << label << " train loss " << fixed(s.mean * 1e2, 2)
          << " x1e-2, std err " << fixed(s.std_error * 1e3, 2) << " x1e-3 over "
          << s.min_losses.size() << " seed(s)" << (s.single_run ? " [single run]" : "")
          << ", diverged " << s.diverged_runs << "\n";

      if (cfg.extrapolate_to > 0.0) {
        for (const auto& r : runs) {
          if (r.diverged) continue;
          try {
            const auto ex = node::extrapolate(r.model, cfg.lv, cfg.extrapolate_to,
                                              cfg.train.rk4_substeps);
            out << "  seed " << r.seed << " extrapolation to t=" << cfg.extrapolate_to
                << ": mse vs clean truth " << format_real(ex.mse) << "\n";
          } catch (const node::IntegrationError& e) {
            out << "  seed " << r.seed << " extrapolation failed: " << e.what() << "\n";
          }
        }
      }
    }
    write_csv_file(cfg.out, rows);
    write_sidecar(cfg.out, cfg.to_key_values());
    return static_cast<int>(kExitOk);
  });
}

int cmd_mnist(const KeyValues& flags, const std::optional<std::filesystem::path>& config_file,
              std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const MnistExperimentConfig cfg =
        MnistExperimentConfig::from(load_settings(flags, config_file));
    const data::MnistData data = data::load_mnist(cfg.data_dir);
    std::vector<CsvRow> rows;
    for (const ActivationSpec& act : cfg.activations) {
      const std::string label = activation_label(act);
      train_mnist(cfg, act, data, [&](const MnistEpochRecord& r) {
        out << label << " epoch " << r.epoch << ": train loss " << format_real(r.train_loss)
            << ", train acc " << fixed(100 * r.train_accuracy, 2) << "%, test top-1 "
            << fixed(100 * r.test_top1, 2) << "%, top-5 " << fixed(100 * r.test_top5, 2) << "%\n";
        out.flush();
        rows.push_back({"mnist", label, cfg.seed, r.epoch, r.train_loss, r.test_top1, r.test_top5});
      });
    }
    write_csv_file(cfg.out, rows);
    write_sidecar(cfg.out, cfg.to_key_values());
    return static_cast<int>(kExitOk);
  });
}

std::vector<ReportGroup> build_report(const std::vector<CsvRow>& rows) {
  using Key = std::pair<std::string, std::string>;
  std::map<Key, std::vector<const CsvRow*>> groups;
  for (const CsvRow& r : rows) groups[{r.experiment, r.activation}].push_back(&r);

  std::vector<ReportGroup> out;
  for (const auto& [key, members] : groups) {
    ReportGroup g;
    g.experiment = key.first;
    g.activation = key.second;
    std::map<std::uint64_t, double> min_loss;
    std::map<std::uint64_t, std::pair<double, std::size_t>> top1, top5;
    for (const CsvRow* r : members) {
      auto [it, inserted] = min_loss.emplace(r->seed, r->train_loss);
      if (!inserted && std::isfinite(r->train_loss))
        it->second = std::isfinite(it->second) ? std::min(it->second, r->train_loss)
                                               : r->train_loss;
      if (r->test_accuracy_top1) {
        top1[r->epoch].first += *r->test_accuracy_top1;
        ++top1[r->epoch].second;
      }
      if (r->test_accuracy_top5) {
        top5[r->epoch].first += *r->test_accuracy_top5;
        ++top5[r->epoch].second;
      }
    }
    std::vector<double> mins;
    for (const auto& [seed, m] : min_loss) {
      g.seeds.push_back(seed);
      mins.push_back(m);
    }
    g.summary = node::aggregate_min_losses(std::move(mins));
    for (const auto& [e, acc] : top1) g.mean_top1[e] = acc.first / static_cast<double>(acc.second);
    for (const auto& [e, acc] : top5) g.mean_top5[e] = acc.first / static_cast<double>(acc.second);
    out.push_back(std::move(g));
  }
  return out;
}

void print_report(const std::vector<ReportGroup>& groups, std::ostream& out) {
  std::set<std::string> experiments;
  for (const auto& g : groups) experiments.insert(g.experiment);
  for (const std::string& exp : experiments) {
    out << "== " << exp << " ==\n";
    out << std::left << std::setw(16) << "activation" << std::setw(7) << "seeds"
        << std::setw(26) << "min train loss (x1e-2)" << std::setw(20) << "std err (x1e-3)"
        << "\n";
    std::set<std::uint64_t> epochs;
    for (const auto& g : groups) {
      if (g.experiment != exp) continue;
      out << std::left << std::setw(16) << g.activation << std::setw(7) << g.seeds.size()
          << std::setw(26) << fixed(g.summary.mean * 1e2, 4) << std::setw(20)
          << (g.summary.single_run ? std::string("n/a (1 seed)")
                                   : fixed(g.summary.std_error * 1e3, 4))
          << "\n";
      for (const auto& [e, a] : g.mean_top1) epochs.insert(e);
    }
    if (epochs.empty()) continue;
    out << "test top-1 accuracy (%), mean over seeds; train loss above is the epoch-mean"
           " mini-batch loss\n";
    out << std::left << std::setw(8) << "epoch";
    for (const auto& g : groups)
      if (g.experiment == exp) out << std::right << std::setw(16) << g.activation;
    out << "\n";
    for (std::uint64_t e : epochs) {
      out << std::left << std::setw(8) << e;
      for (const auto& g : groups) {
        if (g.experiment != exp) continue;
        auto it = g.mean_top1.find(e);
        out << std::right << std::setw(16) << (it == g.mean_top1.end() ? "-" : fixed(100 * it->second, 2));
      }
      out << "\n";
    }
  }
}

int cmd_report(const std::vector<std::filesystem::path>& csvs, std::ostream& out,
               std::ostream& err) {
  return guarded(err, [&] {
    if (csvs.empty()) throw UsageError("report needs at least one CSV file");
    std::vector<CsvRow> rows;
    for (const auto& p : csvs) {
      auto part = read_csv_file(p);
      rows.insert(rows.end(), part.begin(), part.end());
    }
    if (rows.empty()) throw DataError("no data rows in the given CSV files");
    print_report(build_report(rows), out);
    return static_cast<int>(kExitOk);
  });
}

}  // namespace molu::bench
