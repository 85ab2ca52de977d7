#include "entroflux/ldp.hpp"

#include <algorithm>
#include <cmath>

namespace entroflux {

ConvexFn::ConvexFn(std::function<double(double)> f, double a, double b, int validation_grid,
                   double slack)
    : f_(std::move(f)), a_(a), b_(b) {
  if (!(b > a)) throw DomainError("ConvexFn needs a nonempty interval");
  const double h = (b - a) / (validation_grid + 1);
  for (int i = 1; i <= validation_grid - 1; ++i) {
    const double s = a + i * h;
    const double mid = f_(s);
    const double chord = 0.5 * (f_(s - h) + f_(s + h));
    if (mid > chord + slack) throw DomainError("ConvexFn: midpoint convexity violated");
  }
}

double ConvexFn::operator()(double s) const {
  // tolerate endpoint rounding from the search routines
  const double slack = 1e-12 * (1.0 + std::abs(a_) + std::abs(b_));
  if (s < a_ - slack || s > b_ + slack)
    throw DomainError("ConvexFn evaluated outside its interval");
  return f_(std::clamp(s, a_, b_));
}

namespace {

// Golden-section maximum of a concave function on [lo, hi], then one
// quadratic-fit refinement around the final midpoint.
double concave_max(const std::function<double(double)>& g0, double lo, double hi) {
  const double lo0 = lo, hi0 = hi;
  auto g = [&](double x) { return g0(std::clamp(x, lo0, hi0)); };
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double gc = g(c), gd = g(d);
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi) + std::abs(lo));
       ++it) {
    if (gc > gd) {
      hi = d;
      d = c;
      gd = gc;
      c = hi - gr * (hi - lo);
      gc = g(c);
    } else {
      lo = c;
      c = d;
      gc = gd;
      d = lo + gr * (hi - lo);
      gd = g(d);
    }
  }
  const double x0 = 0.5 * (lo + hi);
  const double h = std::max(1e-9, 1e-7 * (std::abs(x0) + 1.0));
  double best = g(x0);
  const double gm = g(x0 - h), gp = g(x0 + h);
  const double denom = gm - 2.0 * best + gp;
  if (denom < 0) {
    const double shift = 0.5 * h * (gm - gp) / denom;
    best = std::max(best, g(x0 + shift));
  }
  return best;
}

}  // namespace

double legendre(const ConvexFn& e, double theta) {
  auto objective = [&](double s) { return theta * s - e(s); };
  double best = concave_max(objective, e.a(), e.b());
  best = std::max(best, objective(e.a()));
  best = std::max(best, objective(e.b()));
  return best;
}

double biconjugate(const ConvexFn& e, double s, double theta_range) {
  auto phi = [&](double theta) { return legendre(e, theta); };
  auto objective = [&](double theta) { return theta * s - phi(theta); };
  double best = concave_max(objective, -theta_range, theta_range);
  best = std::max(best, objective(-theta_range));
  best = std::max(best, objective(theta_range));
  return best;
}

double rate_from_cgf(const ConvexFn& e, double s) {
  // -inf_a (a s + e(a)) = sup_a (-s a - e(a)): the transform at -s
  return legendre(e, -s);
}

double rate_symmetry_check(const ConvexFn& e, const std::vector<double>& s_grid,
                           double symmetry_tol) {
  const int probes = 17;
  for (int i = 0; i < probes; ++i) {
    const double a = e.a() + (e.b() - e.a()) * i / (probes - 1.0);
    const double mirrored = 1.0 - a;
    if (mirrored < e.a() || mirrored > e.b()) continue;
    if (std::abs(e(a) - e(mirrored)) > symmetry_tol)
      throw DomainError("rate_symmetry_check: input lacks the alpha <-> 1-alpha symmetry");
  }
  double worst = 0.0;
  for (double s : s_grid) {
    const double gap = rate_from_cgf(e, -s) - s - rate_from_cgf(e, s);
    worst = std::max(worst, std::abs(gap));
  }
  return worst;
}

CumulantScaling cumulants_from_cgf(const std::function<double(double, double)>& log_mgf,
                                   const std::vector<double>& t_ladder, double h) {
  CumulantScaling out;
  for (double t : t_ladder) {
    auto f = [&](double s) { return log_mgf(t, s); };
    const double f0 = f(0.0);
    const double fp = f(h), fm = f(-h), fp2 = f(2 * h), fm2 = f(-2 * h);
    const double d1 = (-fp2 + 8 * fp - 8 * fm + fm2) / (12 * h);
    const double d2 = (-fp2 + 16 * fp - 30 * f0 + 16 * fm - fm2) / (12 * h * h);
    const double d3 = (fp2 - 2 * fp + 2 * fm - fm2) / (2 * h * h * h);
    const double d4 = (fp2 - 4 * fp + 6 * f0 - 4 * fm + fm2) / (h * h * h * h);
    if (!std::isfinite(d1) || !std::isfinite(d2) || !std::isfinite(d3) || !std::isfinite(d4))
      throw StepSelectionFailureError("cumulant stencil produced a non-finite value");
    out.first.push_back(d1 / t);
    out.second.push_back(d2 / t);
    // cumulants of X_t / sqrt(t): the k-th picks up t^{-k/2}
    out.third_scaled.push_back(d3 / std::pow(t, 1.5));
    out.fourth_scaled.push_back(d4 / (t * t));
  }
  return out;
}

TailBoundReport ge_tail_bound_check(const ConvexFn& e,
                                    const std::function<double(double, double)>& tail_prob,
                                    const std::vector<double>& t_ladder, double theta) {
  TailBoundReport rep;
  rep.t_ladder = t_ladder;
  rep.phi_theta = legendre(e, theta);
  rep.slack_decreasing = true;
  double prev = std::numeric_limits<double>::infinity();
  for (double t : t_ladder) {
    const double mass = tail_prob(t, theta);
    const double lhs =
        mass > 0.0 ? std::log(mass) / t : -std::numeric_limits<double>::infinity();
    rep.lhs.push_back(lhs);
    const double slack = lhs + rep.phi_theta;
    rep.slack.push_back(slack);
    if (mass > 0.0) {
      if (std::abs(slack) > prev + 1e-12) rep.slack_decreasing = false;
      prev = std::abs(slack);
    }
  }
  return rep;
}

double boundary_derivative_magnitude(const ConvexFn& e, double approach) {
  const double h = approach / 8.0;
  const double right = (e(e.b() - approach + h) - e(e.b() - approach - h)) / (2 * h);
  const double left = (e(e.a() + approach + h) - e(e.a() + approach - h)) / (2 * h);
  return std::max(std::abs(left), std::abs(right));
}

}  // namespace entroflux
