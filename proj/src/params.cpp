#include "lenski/params.hpp"

#include <cmath>
#include <string>

namespace lenski {

ModelParams ModelParams::from_scalings(std::int64_t N, double b, double a, double gamma, double r0, double q) {
  ModelParams p;
  p.N = N;
  p.gamma = gamma;
  p.r0 = r0;
  p.q = q;
  p.b = b;
  p.a = a;
  p.rho = std::pow(static_cast<double>(N), -b);
  p.mu = std::pow(static_cast<double>(N), -a);
  return p;
}

double ModelParams::measurement_time() const { return u > 0.0 ? u : std::log(gamma) / r0; }

void ModelParams::validate(bool assumption_a) const {
  if (N < 1) throw ConfigError("N must be a positive integer");
  if (!(gamma > 1.0) || !std::isfinite(gamma)) throw ConfigError("gamma must be a finite number > 1");
  if (!(r0 > 0.0) || !std::isfinite(r0)) throw ConfigError("r0 must be positive");
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw ConfigError("rho must be >= 0");
  if (!(mu >= 0.0 && mu <= 1.0)) throw ConfigError("mu must lie in [0, 1]");
  if (!(q > -1.0)) throw ConfigError("q must exceed -1");
  if (!(u >= 0.0)) throw ConfigError("u must be >= 0");
  if (assumption_a) {
    if (!b || !a) throw ConfigError("scaling exponents b and a are required");
    if (!(*b > 0.0 && *b < 0.5)) throw ConfigError("b must lie in (0, 1/2)");
    if (!(*a > 3.0 * *b)) throw ConfigError("a must exceed 3b (got a=" + std::to_string(*a) +
                                            ", b=" + std::to_string(*b) + ")");
  }
}

}  // namespace lenski
