#pragma once

// Deterministic limit objects: fitness parabola, epistatic power law, the
// stage-2 logistic, and a generic scalar ODE integrator.

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace lenski {

/// gamma ln(gamma) / (gamma - 1); throws std::domain_error for gamma <= 1.
double c_of_gamma(double gamma);

struct LimitCurveParams {
  double gamma = 2.0;
  double r0 = 1.0;
  double q = 0.0;
};

/// sqrt(1 + 2 C t / r0^2).
double fitness_limit(double t, const LimitCurveParams& p);

/// (1 + 2(1+q) C t / r0^2)^(1 / (2(1+q))).
double epistatic_limit(double t, const LimitCurveParams& p);

/// The field h -> psi(h)^2 C / (r0^2 h) with psi(x) = x^-q.
std::function<double(double)> epistatic_field(const LimitCurveParams& p);

/// Logistic with rate ln(gamma)/r started at x0.
double stage2_logistic(double t, double x0, double r, double gamma);

/// Rate of successful mutations on the (rho mu)^-1 time scale: C / r0.
double successful_mutation_rate(const LimitCurveParams& p);

class OdeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integrates x' = field(x) from x(t_grid[0]) = x0 and returns x at every grid
/// point. Dormand-Prince 5(4) with absolute and relative tolerance `tol`.
std::vector<double> ode_solve(const std::function<double(double)>& field, double x0, std::span<const double> t_grid,
                              double tol = 1e-10);

}  // namespace lenski
