#include "molu/bench/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace molu::bench {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt_real(double v) {
  // shortest text that reads back to the same double
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

class Reader {
 public:
  explicit Reader(const KeyValues& kv) : kv_(kv) {}

  const std::string* find(const std::string& key) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? nullptr : &it->second;
  }

  double real(const std::string& key, double fallback) const {
    const std::string* v = find(key);
    return v ? to_real(key, *v) : fallback;
  }

  std::uint64_t count(const std::string& key, std::uint64_t fallback) const {
    const std::string* v = find(key);
    return v ? to_count(key, *v) : fallback;
  }

  bool flag(const std::string& key, bool fallback) const {
    const std::string* v = find(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw UsageError(key + ": expected true/false, got '" + *v + "'");
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    const std::string* v = find(key);
    return v ? *v : fallback;
  }

  template <class T>
  std::vector<T> counts(const std::string& key, std::vector<T> fallback) const {
    const std::string* v = find(key);
    if (!v) return fallback;
    std::vector<T> out;
    for (const std::string& item : split_list(*v)) out.push_back(static_cast<T>(to_count(key, item)));
    return out;
  }

  std::vector<double> reals(const std::string& key, std::vector<double> fallback) const {
    const std::string* v = find(key);
    if (!v) return fallback;
    std::vector<double> out;
    for (const std::string& item : split_list(*v)) out.push_back(to_real(key, item));
    return out;
  }

  static double to_real(const std::string& key, const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0') throw UsageError(key + ": '" + s + "' is not a number");
    return v;
  }

  static std::uint64_t to_count(const std::string& key, const std::string& s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
      throw UsageError(key + ": '" + s + "' is not a non-negative integer");
    return v;
  }

 private:
  const KeyValues& kv_;
};

void put_activation_keys(KeyValues& kv, const std::vector<ActivationSpec>& acts) {
  std::vector<std::string> names;
  for (const auto& a : acts) names.emplace_back(activation_name(a.kind));
  kv["activation"] = join(names);
  for (const auto& a : acts) {
    if (a.kind == ActivationKind::MoLU) {
      kv["alpha"] = fmt_real(a.alpha);
      kv["beta"] = fmt_real(a.beta);
    }
    if (a.kind == ActivationKind::ELU && !kv.count("alpha")) kv["alpha"] = fmt_real(a.alpha);
    if (a.kind == ActivationKind::LeakyReLU) kv["leaky_slope"] = fmt_real(a.leaky_slope);
  }
}

}  // namespace

KeyValues parse_key_values(const std::string& text, const std::string& origin) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    const std::string where = origin + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw UsageError(where + ": expected key=value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw UsageError(where + ": empty key");
    for (char c : key)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
        throw UsageError(where + ": invalid character in key '" + key + "'");
    if (!kv.emplace(key, trim(t.substr(eq + 1))).second)
      throw UsageError(where + ": duplicate key '" + key + "'");
  }
  return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str(), path.string());
}

std::string format_key_values(const KeyValues& kv) {
  std::ostringstream os;
  for (const auto& [k, v] : kv) os << k << " = " << v << "\n";
  return os.str();
}

KeyValues merge(std::initializer_list<const KeyValues*> layers) {
  KeyValues out;
  for (const KeyValues* layer : layers)
    if (layer)
      for (const auto& [k, v] : *layer) out[k] = v;
  return out;
}

std::vector<ActivationSpec> parse_activation_list(const KeyValues& kv) {
  const Reader r(kv);
  std::vector<ActivationSpec> out;
  const std::string names = r.text("activation", "MoLU");
  for (const std::string& name : split_list(names)) {
    ActivationKind kind;
    try {
      kind = parse_activation_kind(name);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    ActivationSpec spec = ActivationSpec::of(kind);
    if (kind == ActivationKind::MoLU || kind == ActivationKind::ELU)
      spec.alpha = r.real("alpha", spec.alpha);
    if (kind == ActivationKind::MoLU) spec.beta = r.real("beta", spec.beta);
    if (kind == ActivationKind::LeakyReLU) spec.leaky_slope = r.real("leaky_slope", spec.leaky_slope);
    try {
      spec.validate();
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
    out.push_back(spec);
  }
  if (out.empty()) throw UsageError("activation: empty list");
  return out;
}

NodeExperimentConfig NodeExperimentConfig::from(const KeyValues& kv) {
  static const char* known[] = {"activation", "alpha",  "beta",    "leaky_slope", "epochs",
                                "learning_rate", "seeds", "noise_fraction", "hidden_dims",
                                "substeps", "include_initial", "jobs", "lv_a", "lv_b", "lv_c",
                                "lv_d", "u0", "t0", "t1", "n_points", "extrapolate_to", "out"};
  for (const auto& [k, v] : kv) {
    bool ok = false;
    for (const char* name : known) ok = ok || k == name;
    if (!ok) throw UsageError("unknown node setting '" + k + "'");
  }

  const Reader r(kv);
  NodeExperimentConfig c;
  c.activations = parse_activation_list(kv);
  c.train.epochs = r.count("epochs", c.train.epochs);
  c.train.learning_rate = r.real("learning_rate", c.train.learning_rate);
  c.train.seeds = r.counts<std::uint64_t>("seeds", c.train.seeds);
  c.train.noise_fraction = r.real("noise_fraction", c.train.noise_fraction);
  c.train.hidden_dims = r.counts<std::size_t>("hidden_dims", c.train.hidden_dims);
  c.train.rk4_substeps = r.count("substeps", c.train.rk4_substeps);
  c.train.include_initial = r.flag("include_initial", c.train.include_initial);
  c.train.jobs = r.count("jobs", c.train.jobs);
  c.lv.a = r.real("lv_a", c.lv.a);
  c.lv.b = r.real("lv_b", c.lv.b);
  c.lv.c = r.real("lv_c", c.lv.c);
  c.lv.d = r.real("lv_d", c.lv.d);
  const std::vector<double> u0 = r.reals("u0", {c.lv.u0[0], c.lv.u0[1]});
  if (u0.size() != 2) throw UsageError("u0: expected two comma-separated values");
  c.lv.u0 = {u0[0], u0[1]};
  c.lv.t0 = r.real("t0", c.lv.t0);
  c.lv.t1 = r.real("t1", c.lv.t1);
  c.lv.n_points = r.count("n_points", c.lv.n_points);
  c.extrapolate_to = r.real("extrapolate_to", c.extrapolate_to);
  c.out = r.text("out", c.out);
  try {
    c.train.validate();
    c.lv.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (c.extrapolate_to != 0.0 && c.extrapolate_to < c.lv.t1)
    throw UsageError("extrapolate_to must be 0 (off) or >= t1");
  return c;
}

KeyValues NodeExperimentConfig::to_key_values() const {
  KeyValues kv;
  put_activation_keys(kv, activations);
  kv["epochs"] = std::to_string(train.epochs);
  kv["learning_rate"] = fmt_real(train.learning_rate);
  kv["seeds"] = join(train.seeds);
  kv["noise_fraction"] = fmt_real(train.noise_fraction);
  kv["hidden_dims"] = join(train.hidden_dims);
  kv["substeps"] = std::to_string(train.rk4_substeps);
  kv["include_initial"] = train.include_initial ? "true" : "false";
  kv["jobs"] = std::to_string(train.jobs);
  kv["lv_a"] = fmt_real(lv.a);
  kv["lv_b"] = fmt_real(lv.b);
  kv["lv_c"] = fmt_real(lv.c);
  kv["lv_d"] = fmt_real(lv.d);
  kv["u0"] = fmt_real(lv.u0[0]) + "," + fmt_real(lv.u0[1]);
  kv["t0"] = fmt_real(lv.t0);
  kv["t1"] = fmt_real(lv.t1);
  kv["n_points"] = std::to_string(lv.n_points);
  kv["extrapolate_to"] = fmt_real(extrapolate_to);
  kv["out"] = out;
  return kv;
}

MnistExperimentConfig MnistExperimentConfig::from(const KeyValues& kv) {
  static const char* known[] = {"activation", "alpha",      "beta", "leaky_slope",
                                "epochs",     "learning_rate", "momentum", "batch_size",
                                "seed",       "hidden_dims", "data_dir", "out"};
  for (const auto& [k, v] : kv) {
    bool ok = false;
    for (const char* name : known) ok = ok || k == name;
    if (!ok) throw UsageError("unknown mnist setting '" + k + "'");
  }

  const Reader r(kv);
  MnistExperimentConfig c;
  c.activations = parse_activation_list(kv);
  c.epochs = r.count("epochs", c.epochs);
  c.learning_rate = r.real("learning_rate", c.learning_rate);
  c.momentum = r.real("momentum", c.momentum);
  c.batch_size = r.count("batch_size", c.batch_size);
  c.seed = r.count("seed", c.seed);
  c.hidden_dims = r.counts<std::size_t>("hidden_dims", c.hidden_dims);
  if (const char* env = std::getenv(kDataDirEnv); env && *env) c.data_dir = env;
  c.data_dir = r.text("data_dir", c.data_dir);
  c.out = r.text("out", c.out);
  if (c.epochs < 1) throw UsageError("epochs must be >= 1");
  if (!(c.learning_rate > 0.0)) throw UsageError("learning_rate must be positive");
  if (!(c.momentum >= 0.0 && c.momentum < 1.0)) throw UsageError("momentum must lie in [0, 1)");
  if (c.batch_size < 1) throw UsageError("batch_size must be >= 1");
  for (std::size_t h : c.hidden_dims)
    if (h == 0) throw UsageError("hidden_dims must be positive");
  return c;
}

KeyValues MnistExperimentConfig::to_key_values() const {
  KeyValues kv;
  put_activation_keys(kv, activations);
  kv["epochs"] = std::to_string(epochs);
  kv["learning_rate"] = fmt_real(learning_rate);
  kv["momentum"] = fmt_real(momentum);
  kv["batch_size"] = std::to_string(batch_size);
  kv["seed"] = std::to_string(seed);
  kv["hidden_dims"] = join(hidden_dims);
  kv["data_dir"] = data_dir;
  kv["out"] = out;
  return kv;
}

}  // namespace molu::bench
