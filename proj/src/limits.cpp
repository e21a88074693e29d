#include "lenski/limits.hpp"

#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <string>

namespace lenski {

double c_of_gamma(double gamma) {
  if (!(gamma > 1.0)) throw std::domain_error("c_of_gamma: gamma must exceed 1");
  // x ln x / (x - 1) loses digits near 1; use log1p on the offset.
  const double e = gamma - 1.0;
  return gamma * std::log1p(e) / e;
}

double fitness_limit(double t, const LimitCurveParams& p) {
  if (!(t >= 0.0)) throw std::invalid_argument("fitness_limit: t must be >= 0");
  return std::sqrt(1.0 + 2.0 * c_of_gamma(p.gamma) * t / (p.r0 * p.r0));
}

double epistatic_limit(double t, const LimitCurveParams& p) {
  if (!(t >= 0.0)) throw std::invalid_argument("epistatic_limit: t must be >= 0");
  if (!(p.q > -1.0)) throw std::invalid_argument("epistatic_limit: q must exceed -1");
  const double k = 2.0 * (1.0 + p.q);
  return std::pow(1.0 + k * c_of_gamma(p.gamma) * t / (p.r0 * p.r0), 1.0 / k);
}

std::function<double(double)> epistatic_field(const LimitCurveParams& p) {
  const double scale = c_of_gamma(p.gamma) / (p.r0 * p.r0);
  const double q = p.q;
  return [scale, q](double h) { return std::pow(h, -2.0 * q) * scale / h; };
}

double stage2_logistic(double t, double x0, double r, double gamma) {
  if (!(x0 > 0.0 && x0 < 1.0)) throw std::invalid_argument("stage2_logistic: x0 must lie in (0, 1)");
  const double lambda = std::log(gamma) / r;
  // x0 e^{lt} / (1 - x0 + x0 e^{lt}) written to avoid overflow for large t.
  return x0 / (x0 + (1.0 - x0) * std::exp(-lambda * t));
}

double successful_mutation_rate(const LimitCurveParams& p) { return c_of_gamma(p.gamma) / p.r0; }

std::vector<double> ode_solve(const std::function<double(double)>& field, double x0, std::span<const double> t_grid,
                              double tol) {
  namespace odeint = boost::numeric::odeint;
  if (t_grid.empty()) return {};
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1])) throw std::invalid_argument("ode_solve: time grid must be increasing");

  std::vector<double> out;
  out.reserve(t_grid.size());
  auto system = [&](const double& x, double& dxdt, double) {
    dxdt = field(x);
    if (!std::isfinite(dxdt)) throw OdeError("ode_solve: field returned a non-finite value at x=" + std::to_string(x));
  };
  auto observer = [&](const double& x, double) { out.push_back(x); };
  double x = x0;
  auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_dopri5<double, double, double, double, odeint::vector_space_algebra>());
  const double span_len = t_grid.back() - t_grid.front();
  const double dt0 = span_len > 0.0 ? span_len * 1e-6 : 1e-6;
  try {
    odeint::integrate_times(stepper, system, x, t_grid.begin(), t_grid.end(), dt0, observer,
                            odeint::max_step_checker(1000000));
  } catch (const odeint::step_adjustment_error& e) {
    throw OdeError(std::string("ode_solve: step size underflow (") + e.what() + ")");
  } catch (const odeint::no_progress_error& e) {
    throw OdeError(std::string("ode_solve: no progress (") + e.what() + ")");
  }
  return out;
}

}  // namespace lenski
