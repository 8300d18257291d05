#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace molu {

/// Raised for non-finite inputs or invalid activation parameters.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class ActivationKind { MoLU, GeLU, Mish, SiLU, ELU, Tanh, ReLU, LeakyReLU };

inline constexpr ActivationKind kAllActivationKinds[] = {
    ActivationKind::MoLU, ActivationKind::GeLU, ActivationKind::Mish,
    ActivationKind::SiLU, ActivationKind::ELU,  ActivationKind::Tanh,
    ActivationKind::ReLU, ActivationKind::LeakyReLU};

/// Which activation, plus its parameters.
///
/// `alpha` is the MoLU alpha and is reused as the ELU alpha; `beta` is only
/// read by MoLU; `leaky_slope` only by LeakyReLU. Use the named constructors
/// to get per-kind defaults (MoLU alpha=beta=2, ELU alpha=1).
struct ActivationSpec {
  ActivationKind kind = ActivationKind::MoLU;
  double alpha = 2.0;
  double beta = 2.0;
  double leaky_slope = 0.01;

  static ActivationSpec molu(double alpha = 2.0, double beta = 2.0) {
    return {ActivationKind::MoLU, alpha, beta, 0.01};
  }
  static ActivationSpec elu(double alpha = 1.0) {
    return {ActivationKind::ELU, alpha, 2.0, 0.01};
  }
  static ActivationSpec leaky_relu(double slope = 0.01) {
    return {ActivationKind::LeakyReLU, 2.0, 2.0, slope};
  }
  /// `kind` with its default parameters.
  static ActivationSpec of(ActivationKind kind);

  /// Throws DomainError if the parameters the kind reads are invalid.
  void validate() const;
};

std::string_view activation_name(ActivationKind kind);
/// Case-insensitive; accepts "swish" for SiLU and "leaky_relu"/"leakyrelu".
ActivationKind parse_activation_kind(std::string_view name);
/// Display label used in CSV files, e.g. "MoLU" or "MoLU(a=1;b=3)".
std::string activation_label(const ActivationSpec& spec);

/// Switch point of the MoLU saturation guard: beyond tanh(u_sat) == 1 in
/// double precision, so the kernel returns (x, 1) without evaluating exp.
inline constexpr double kMoluSaturation = 20.0;

/// MoLU: x * tanh(alpha * exp(beta * x)).
double molu(double x, double alpha, double beta);
/// d/dx MoLU. With u = alpha*exp(beta*x): tanh(u) + x*beta*u*sech^2(u).
double molu_prime(double x, double alpha, double beta);

double activation_value(const ActivationSpec& spec, double x);
/// Analytic first derivative. ReLU and LeakyReLU use the right derivative at 0.
double activation_derivative(const ActivationSpec& spec, double x);

/// Row per input, column per spec.
std::vector<std::vector<double>> comparison_table(
    std::span<const double> inputs, std::span<const ActivationSpec> specs);

/// Numerically stable log(1 + e^x).
double softplus(double x);

}  // namespace molu
