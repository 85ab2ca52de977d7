#ifndef ENTROFLUX_LDP_HPP
#define ENTROFLUX_LDP_HPP

#include <functional>
#include <vector>

#include "entroflux/types.hpp"

namespace entroflux {

// Continuous convex function on [a, b], +infinity outside. Midpoint
// convexity is validated on a sampled grid at construction.
class ConvexFn {
 public:
  ConvexFn(std::function<double(double)> f, double a, double b, int validation_grid = 64,
           double slack = 1e-9);

  double a() const { return a_; }
  double b() const { return b_; }
  double operator()(double s) const;  // throws DomainError outside [a, b]

 private:
  std::function<double(double)> f_;
  double a_, b_;
};

// Fenchel transform sup_{s in [a,b]} (theta s - e(s)), by golden section on
// the concave objective with a quadratic-fit refinement.
double legendre(const ConvexFn& e, double theta);

// e(s) recovered as sup_theta (theta s - phi(theta)); the theta search runs
// over [-range, range].
double biconjugate(const ConvexFn& e, double s, double theta_range = 64.0);

// Rate function of the measure with cumulant generating function
// log integral e^{-alpha t s} dP = t e(alpha): I(s) = -inf_a (a s + e(a)).
double rate_from_cgf(const ConvexFn& e, double s);

// max over the grid of I(-s) - s - I(s) for a symmetric e(a) = e(1 - a).
double rate_symmetry_check(const ConvexFn& e, const std::vector<double>& s_grid,
                           double symmetry_tol = 1e-9);

struct CumulantScaling {
  std::vector<double> first;   // (1/t) d/ds log E e^{s X_t} at 0
  std::vector<double> second;  // (1/t) d^2/ds^2 ...
  std::vector<double> third_scaled;   // third cumulant of X_t / sqrt(t), per t
  std::vector<double> fourth_scaled;  // fourth cumulant of X_t / sqrt(t), per t
};

// Finite-difference cumulants of a family t -> log-MGF; first and second
// normalized by t approach limits, scaled third/fourth tend to zero.
CumulantScaling cumulants_from_cgf(const std::function<double(double, double)>& log_mgf,
                                   const std::vector<double>& t_ladder, double h = 1e-3);

struct TailBoundReport {
  std::vector<double> t_ladder;
  std::vector<double> lhs;    // (1/t) log P_t([theta, inf))
  std::vector<double> slack;  // lhs + phi(theta)
  bool slack_decreasing;      // |slack| nonincreasing along the ladder
  double phi_theta;
};

// Upper large-deviation bound check: (1/t) log P_t([theta, inf)) against
// -phi(theta), with the per-t slack reported. P(t, theta) returns the tail
// mass of the time-t measure (zero mass makes the bound trivial).
TailBoundReport ge_tail_bound_check(const ConvexFn& e,
                                    const std::function<double(double, double)>& tail_prob,
                                    const std::vector<double>& t_ladder, double theta);

// Steepness proxy for the differentiability hypotheses: the derivative
// magnitude within `approach` of the endpoints of [a, b].
double boundary_derivative_magnitude(const ConvexFn& e, double approach = 1e-3);

}  // namespace entroflux

#endif
