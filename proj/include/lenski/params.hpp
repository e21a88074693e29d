#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

namespace lenski {

/// Raised for parameter sets that fail validation; the CLI maps it to exit 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ModelParams {
  std::int64_t N = 1000;
  double gamma = 2.0;
  double r0 = 1.0;
  double rho = 0.0;  // selective advantage per mutation
  double mu = 0.0;   // per-day mutation probability
  double q = 0.0;    // epistasis exponent, psi(x) = x^-q
  double u = 0.0;    // fitness measurement time; 0 means ln(gamma)/r0
  std::optional<double> b;  // rho = N^-b when set
  std::optional<double> a;  // mu = N^-a when set

  /// rho = N^-b, mu = N^-a.
  static ModelParams from_scalings(std::int64_t N, double b, double a, double gamma = 2.0, double r0 = 1.0,
                                   double q = 0.0);

  double measurement_time() const;

  /// Throws ConfigError. With `assumption_a`, also requires 0 < b < 1/2 and a > 3b.
  void validate(bool assumption_a = false) const;
};

}  // namespace lenski
