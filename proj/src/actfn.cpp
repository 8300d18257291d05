#include "molu/actfn.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

namespace molu {
namespace {

void require_finite(double x) {
  if (!std::isfinite(x)) throw DomainError("activation input is not finite");
}

void require_molu_params(double alpha, double beta) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw DomainError("MoLU alpha must be positive and finite");
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw DomainError("MoLU beta must be positive and finite");
}

// True when alpha*exp(beta*x) >= kMoluSaturation; decided in log space so
// exp() is never evaluated where it could overflow.
bool molu_saturated(double x, double alpha, double beta) {
  return beta * x + std::log(alpha) > std::log(kMoluSaturation);
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

constexpr double kGeluScale = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluCubic = 0.044715;

// Tanh approximation, evaluated literally as 0.5*x*(1 + tanh(z)). For large
// negative x the 1 + tanh(z) cancellation dominates the result; the published
// comparison values carry exactly that rounding, so it is kept.
double gelu(double x) {
  const double z = kGeluScale * (x + kGeluCubic * x * x * x);
  return 0.5 * x * (1.0 + std::tanh(z));
}

double gelu_prime(double x) {
  const double z = kGeluScale * (x + kGeluCubic * x * x * x);
  const double t = std::tanh(z);
  const double dz = kGeluScale * (1.0 + 3.0 * kGeluCubic * x * x);
  return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * dz;
}

double mish(double x) { return x * std::tanh(softplus(x)); }

double mish_prime(double x) {
  const double t = std::tanh(softplus(x));
  return t + x * (1.0 - t * t) * sigmoid(x);
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

ActivationSpec ActivationSpec::of(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::MoLU: return molu();
    case ActivationKind::ELU: return elu();
    case ActivationKind::LeakyReLU: return leaky_relu();
    default: return {kind, 2.0, 2.0, 0.01};
  }
}

void ActivationSpec::validate() const {
  switch (kind) {
    case ActivationKind::MoLU:
      require_molu_params(alpha, beta);
      break;
    case ActivationKind::ELU:
      if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw DomainError("ELU alpha must be positive and finite");
      break;
    case ActivationKind::LeakyReLU:
      if (!std::isfinite(leaky_slope))
        throw DomainError("LeakyReLU slope must be finite");
      break;
    default:
      break;
  }
}

std::string_view activation_name(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::MoLU: return "MoLU";
    case ActivationKind::GeLU: return "GeLU";
    case ActivationKind::Mish: return "Mish";
    case ActivationKind::SiLU: return "SiLU";
    case ActivationKind::ELU: return "ELU";
    case ActivationKind::Tanh: return "Tanh";
    case ActivationKind::ReLU: return "ReLU";
    case ActivationKind::LeakyReLU: return "LeakyReLU";
  }
  return "?";
}

ActivationKind parse_activation_kind(std::string_view name) {
  const std::string n = lower(name);
  if (n == "swish") return ActivationKind::SiLU;
  if (n == "leaky_relu" || n == "leaky-relu") return ActivationKind::LeakyReLU;
  for (ActivationKind k : kAllActivationKinds)
    if (lower(activation_name(k)) == n) return k;
  throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

std::string activation_label(const ActivationSpec& spec) {
  const ActivationSpec def = ActivationSpec::of(spec.kind);
  std::ostringstream os;
  os << activation_name(spec.kind);
  switch (spec.kind) {
    case ActivationKind::MoLU:
      if (spec.alpha != def.alpha || spec.beta != def.beta)
        os << "(a=" << spec.alpha << ";b=" << spec.beta << ")";
      break;
    case ActivationKind::ELU:
      if (spec.alpha != def.alpha) os << "(a=" << spec.alpha << ")";
      break;
    case ActivationKind::LeakyReLU:
      if (spec.leaky_slope != def.leaky_slope) os << "(slope=" << spec.leaky_slope << ")";
      break;
    default:
      break;
  }
  return os.str();
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double molu(double x, double alpha, double beta) {
  require_finite(x);
  require_molu_params(alpha, beta);
  if (molu_saturated(x, alpha, beta)) return x;
  return x * std::tanh(alpha * std::exp(beta * x));
}

double molu_prime(double x, double alpha, double beta) {
  require_finite(x);
  require_molu_params(alpha, beta);
  if (molu_saturated(x, alpha, beta)) return 1.0;
  const double u = alpha * std::exp(beta * x);
  const double t = std::tanh(u);
  return t + x * beta * u * (1.0 - t * t);
}

double activation_value(const ActivationSpec& spec, double x) {
  require_finite(x);
  switch (spec.kind) {
    case ActivationKind::MoLU: return molu(x, spec.alpha, spec.beta);
    case ActivationKind::GeLU: return gelu(x);
    case ActivationKind::Mish: return mish(x);
    case ActivationKind::SiLU: return x * sigmoid(x);
    case ActivationKind::ELU:
      spec.validate();
      return x >= 0.0 ? x : spec.alpha * std::expm1(x);
    case ActivationKind::Tanh: return std::tanh(x);
    case ActivationKind::ReLU: return x > 0.0 ? x : 0.0;
    case ActivationKind::LeakyReLU:
      spec.validate();
      return x >= 0.0 ? x : spec.leaky_slope * x;
  }
  throw DomainError("unknown activation kind");
}

double activation_derivative(const ActivationSpec& spec, double x) {
  require_finite(x);
  switch (spec.kind) {
    case ActivationKind::MoLU: return molu_prime(x, spec.alpha, spec.beta);
    case ActivationKind::GeLU: return gelu_prime(x);
    case ActivationKind::Mish: return mish_prime(x);
    case ActivationKind::SiLU: {
      const double s = sigmoid(x);
      return s * (1.0 + x * (1.0 - s));
    }
    case ActivationKind::ELU:
      spec.validate();
      return x >= 0.0 ? 1.0 : spec.alpha * std::exp(x);
    case ActivationKind::Tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case ActivationKind::ReLU: return x >= 0.0 ? 1.0 : 0.0;
    case ActivationKind::LeakyReLU:
      spec.validate();
      return x >= 0.0 ? 1.0 : spec.leaky_slope;
  }
  throw DomainError("unknown activation kind");
}

std::vector<std::vector<double>> comparison_table(std::span<const double> inputs,
                                                  std::span<const ActivationSpec> specs) {
  if (inputs.empty()) throw std::invalid_argument("comparison_table: no inputs");
  std::vector<std::vector<double>> table;
  table.reserve(inputs.size());
  for (double x : inputs) {
    std::vector<double> row;
    row.reserve(specs.size());
    for (const ActivationSpec& s : specs) row.push_back(activation_value(s, x));
    table.push_back(std::move(row));
  }
  return table;
}

}  // namespace molu
