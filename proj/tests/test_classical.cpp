#include <doctest.h>

#include <cmath>

#include "entroflux/classical.hpp"

using namespace entroflux;

namespace {

ChainConfig small_cfg() {
  ChainConfig cfg;
  cfg.n = 2;
  cfg.m = 24;
  cfg.beta = 1.0;
  cfg.beta_l = 0.5;   // T_L = 2
  cfg.beta_r = 1.0;   // T_R = 1
  return cfg;
}

}  // namespace

TEST_CASE("chain construction invariants") {
  auto ops = chain_build(small_cfg());
  CHECK(ops.energy_conservation_defect() < 1e-9);
  CHECK(ops.liouville_defect() < 1e-8);

  // squared frequencies fill [1, 5] as the box grows
  CHECK(ops.squared_frequencies().minCoeff() >= 1.0 - 1e-10);
  CHECK(ops.squared_frequencies().maxCoeff() <= 5.0 + 1e-10);
  CHECK(ops.squared_frequencies().minCoeff() < 1.01);
  CHECK(ops.squared_frequencies().maxCoeff() > 4.99);

  // equilibrium: D_0 = (beta h)^{-1}
  ChainConfig eq = small_cfg();
  eq.beta_l = eq.beta_r = eq.beta;
  auto ops_eq = chain_build(eq);
  const RealMatrix expect =
      RealMatrix((eq.beta * ops_eq.h()).llt().solve(
          RealMatrix::Identity(ops_eq.phase_dim(), ops_eq.phase_dim())));
  CHECK((ops_eq.covariance() - expect).cwiseAbs().maxCoeff() < 1e-10);

  // propagator group property
  const RealMatrix two_paths = ops.propagator(0.7) * ops.propagator(1.1);
  CHECK((two_paths - ops.propagator(1.8)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("finite time generating function") {
  auto ops = chain_build(small_cfg());
  const double t = 4.0;

  CHECK(chain_gt(ops, t, 0.0, 0.0).value() == doctest::Approx(0.0).epsilon(1e-12));

  // finite time symmetry g_t(X, Y) = g_t(X, X - Y)
  const double xl = ops.config().x_l(), xr = ops.config().x_r();
  for (auto [yl, yr] : {std::pair{0.1, -0.05}, std::pair{0.3, 0.2}}) {
    const double lhs = chain_gt(ops, t, yl, yr).value();
    const double rhs = chain_gt(ops, t, xl - yl, xr - yr).value();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
  }

  // e_t(alpha) = e_t(1 - alpha) and the grid path agrees with the generic one
  auto grid = chain_et_diagonal(ops, t, {0.2, 0.5, 0.8});
  CHECK(grid[0].value() == doctest::Approx(grid[2].value()).epsilon(1e-9));
  CHECK(grid[1].value() ==
        doctest::Approx(chain_gt(ops, t, 0.5 * xl, 0.5 * xr).value()).epsilon(1e-9));

  // convexity on a grid
  std::vector<double> alphas;
  for (double a = -0.2; a <= 1.2 + 1e-12; a += 0.1) alphas.push_back(a);
  auto vals = chain_et_diagonal(ops, t, alphas);
  for (size_t i = 1; i + 1 < vals.size(); ++i) {
    if (!vals[i - 1].finite() || !vals[i].finite() || !vals[i + 1].finite()) continue;
    CHECK(vals[i].value() <= 0.5 * (vals[i - 1].value() + vals[i + 1].value()) + 1e-10);
  }
}

TEST_CASE("mean entropy production") {
  auto ops = chain_build(small_cfg());
  MeanEntropyProduction ep(ops);

  ChainConfig eq = small_cfg();
  eq.beta_l = eq.beta_r = eq.beta;
  auto ops_eq = chain_build(eq);
  MeanEntropyProduction ep_eq(ops_eq);
  for (double t : {0.5, 3.0, 10.0}) CHECK(std::abs(ep_eq.at(t)) < 1e-12);

  // entropy balance: omega_X(Sigma^t) = (1/t) d/dalpha e_t(alpha)|_{alpha=1}
  const double t = 5.0;
  const double h = 1e-4;
  auto vals = chain_et_diagonal(ops, t, {1.0 - 2 * h, 1.0 - h, 1.0 + h, 1.0 + 2 * h});
  const double deriv =
      (-vals[3].value() + 8 * vals[2].value() - 8 * vals[1].value() + vals[0].value()) /
      (12 * h);
  CHECK(std::abs(ep.at(t) - std::abs(deriv) / t) < 1e-5);

  // plateau near the steady value before the recurrence time
  ChainSteady steady = chain_steady(ops.config().beta_l, ops.config().beta_r);
  const double plateau = ep.at(12.0);
  CHECK(plateau == doctest::Approx(steady.entropy_production).epsilon(0.3));
}

TEST_CASE("closed forms") {
  CHECK(chain_kappa() == doctest::Approx((std::sqrt(5.0) - 1.0) / (2.0 * M_PI)));
  auto steady = chain_steady(0.5, 1.0);  // T_L = 2, T_R = 1
  CHECK(steady.flux == doctest::Approx(chain_kappa()));
  CHECK(steady.entropy_production == doctest::Approx(chain_kappa() * 0.5));
  CHECK(steady.clt_d11 == doctest::Approx(chain_kappa() * 5.0));
  CHECK(steady.clt_d12 == doctest::Approx(-chain_kappa() * 5.0));
  auto balanced = chain_steady(1.3, 1.3);
  CHECK(balanced.flux == doctest::Approx(0.0));
  CHECK(balanced.entropy_production == doctest::Approx(0.0));

  CHECK(chain_e_closed(2.0, 1.0, 0.3).value() ==
        doctest::Approx(chain_e_closed(2.0, 1.0, 0.7).value()).epsilon(1e-14));
  CHECK(chain_e_closed(2.0, 1.0, 0.0).value() == doctest::Approx(0.0));
  CHECK(chain_e_closed(1.7, 1.7, 0.44).value() == doctest::Approx(0.0));
  // e(1/2) = -kappa log(9/8) for T_L = 2, T_R = 1
  CHECK(chain_e_closed(2.0, 1.0, 0.5).value() ==
        doctest::Approx(-chain_kappa() * std::log(9.0 / 8.0)).epsilon(1e-14));
  CHECK(chain_e_closed(2.0, 1.0, 0.5).value() ==
        doctest::Approx(-0.0231702).epsilon(1e-4));

  CHECK(chain_e_closed(4.0, 0.25, 3.0).is_pos_infinity());

  const double beta = 1.0, xl = 0.5, xr = 0.0;
  for (auto [yl, yr] : {std::pair{0.2, 0.1}, std::pair{-0.1, 0.25}}) {
    CHECK(chain_g_closed(beta, xl, xr, yl, yr).value() ==
          doctest::Approx(chain_g_closed(beta, xl, xr, xl - yl, xr - yr).value())
              .epsilon(1e-12));
  }

  auto s2 = chain_steady(0.7, 1.6);
  const double t_left = 1.0 / 0.7, t_right = 1.0 / 1.6;
  CHECK(s2.flux == doctest::Approx(chain_kappa() * (t_left - t_right)));
  const double ep = (1.0 - 0.7) * s2.flux + (1.0 - 1.6) * (-s2.flux);
  CHECK(s2.entropy_production == doctest::Approx(ep).epsilon(1e-12));
}

TEST_CASE("rate function") {
  const double beta = 1.0, xl = 0.5, xr = 0.0;
  auto eq0 = chain_rate(beta, 0.0, 0.0, 0.0);
  CHECK(eq0.rate == doctest::Approx(0.0).epsilon(1e-14));
  for (double th : {0.3, 1.0}) {
    CHECK(chain_rate(beta, 0.0, 0.0, th).rate ==
          doctest::Approx(chain_rate(beta, 0.0, 0.0, -th).rate).epsilon(1e-12));
    CHECK(chain_rate(beta, 0.0, 0.0, th).rate > 0.0);
  }

  // fluctuation symmetry I(-s) = X.s + I(s) on the antidiagonal
  for (double th = -2.0; th <= 2.0 + 1e-12; th += 0.25) {
    auto plus = chain_rate(beta, xl, xr, th);
    auto minus = chain_rate(beta, xl, xr, -th);
    const double xs = (xl - xr) * plus.s_l;
    CHECK(minus.rate - plus.rate == doctest::Approx(xs).epsilon(1e-10));
  }

  // zero of the rate at the steady current
  auto steady = chain_steady(beta - xl, beta - xr);
  double best_theta = 0.0, best = 1e300;
  for (double th = -3.0; th <= 3.0; th += 1e-4) {
    const double r = chain_rate(beta, xl, xr, th).rate;
    if (r < best) {
      best = r;
      best_theta = th;
    }
  }
  auto at_min = chain_rate(beta, xl, xr, best_theta);
  CHECK(std::abs(best) < 1e-7);
  CHECK(at_min.s_l == doctest::Approx(steady.flux).epsilon(1e-3));
}

TEST_CASE("on-shell scattering matrix") {
  for (double k : {0.3, 1.2, 2.9}) {
    const Matrix s = chain_onshell_s(k, 20);
    CHECK(std::abs(std::abs(s(0, 1)) - 1.0) < 1e-14);
    CHECK(std::abs(std::abs(s(1, 0)) - 1.0) < 1e-14);
    CHECK(std::abs(s(0, 0)) == 0.0);
    CHECK((s.adjoint() * s - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
  }
  const Matrix flip = chain_onshell_s(1.1, 0);
  CHECK(flip(0, 1) == Complex(1.0, 0.0));
}

TEST_CASE("stationary-regime functional") {
  auto ops = chain_build(small_cfg());
  const double t = 6.0, freeze = 12.0;

  CHECK(chain_gc_gplus_t(ops, t, 0.0, 0.0, freeze).value() ==
        doctest::Approx(0.0).epsilon(1e-10));

  // equilibrium: transported covariance is invariant, the functionals match
  ChainConfig eq = small_cfg();
  eq.beta_l = eq.beta_r = eq.beta;
  auto ops_eq = chain_build(eq);
  for (auto [yl, yr] : {std::pair{0.15, -0.1}, std::pair{0.05, 0.2}}) {
    CHECK(chain_gc_gplus_t(ops_eq, t, yl, yr, freeze).value() ==
          doctest::Approx(chain_gt(ops_eq, t, yl, yr).value()).epsilon(1e-9));
  }

  // out of equilibrium the normalized functionals stay close; this needs a
  // box large enough for t = 30 to sit before the recurrence
  ChainConfig wide = small_cfg();
  wide.m = 60;
  auto ops_w = chain_build(wide);
  const double tw = 30.0, freeze_w = 40.0;
  const double xl = wide.x_l(), xr = wide.x_r();
  const double g_plus = chain_gc_gplus_t(ops_w, tw, 0.5 * xl, 0.5 * xr, freeze_w).value();
  const double g_fin = chain_gt(ops_w, tw, 0.5 * xl, 0.5 * xr).value();
  const double g_lim = chain_e_closed(1.0 / wide.beta_l, 1.0 / wide.beta_r, 0.5).value();
  CHECK(std::abs(g_plus - g_fin) / tw <= 0.05 * std::abs(g_lim));
}

TEST_CASE("classical linear response from the closed forms") {
  const double beta = 1.0;
  const double h = 1e-4;
  auto g = [&](double xl, double xr, double yl, double yr) {
    return chain_g_closed(beta, xl, xr, yl, yr).value();
  };
  auto mixed = [&](int j, int k) {
    auto at = [&](double x, double y) {
      double xs[2] = {0.0, 0.0}, ys[2] = {0.0, 0.0};
      xs[k] = x;
      ys[j] = y;
      return g(xs[0], xs[1], ys[0], ys[1]);
    };
    return -(at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
  };
  RealMatrix l(2, 2);
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) l(j, k) = mixed(j, k);

  CHECK(l(0, 1) == doctest::Approx(l(1, 0)).epsilon(1e-5));
  auto second = [&](int j, int k) {
    auto at = [&](double ya, double yb) {
      double ys[2] = {0.0, 0.0};
      ys[j] += ya;
      ys[k] += yb;
      return g(0.0, 0.0, ys[0], ys[1]);
    };
    return 0.5 * (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
  };
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k)
      CHECK(l(j, k) == doctest::Approx(second(j, k)).epsilon(1e-4));

  // Einstein relation against the equilibrium fluctuation covariance
  auto steady = chain_steady(beta, beta);
  CHECK(l(0, 0) == doctest::Approx(0.5 * steady.clt_d11).epsilon(1e-5));
  CHECK(l(0, 1) == doctest::Approx(0.5 * steady.clt_d12).epsilon(1e-5));

  // conservation pattern L_11 + L_21 = 0
  CHECK(l(0, 0) + l(1, 0) == doctest::Approx(0.0).epsilon(1e-5));
}

TEST_CASE("uniform boundedness of the normalized functional") {
  auto ops = chain_build(small_cfg());
  double worst = 0.0;
  for (double t : {1.0, 5.0, 10.0, 25.0, 50.0}) {
    for (double yl : {-0.05, 0.0, 0.05})
      for (double yr : {-0.05, 0.0, 0.05}) {
        const ExtReal g = chain_gt(ops, t, yl, yr);
        REQUIRE(g.finite());
        worst = std::max(worst, std::abs(g.value()) / t);
      }
  }
  CHECK(worst < 1.0);
}

TEST_CASE("domain exit raises the infinity sentinel") {
  auto ops = chain_build(small_cfg());
  // forces far beyond the finiteness domain push the determinant negative
  const ExtReal g = chain_gt(ops, 6.0, -40.0, 40.0);
  CHECK(g.is_pos_infinity());
  auto vals = chain_et_diagonal(ops, 6.0, {80.0});
  CHECK(vals[0].is_pos_infinity());
}

TEST_CASE("mean entropy production averages out at fixed volume") {
  // quasi-periodic finite box: the running average decays after the
  // recurrence time
  ChainConfig cfg = small_cfg();
  auto ops = chain_build(cfg);
  MeanEntropyProduction ep(ops);
  const double plateau = ep.at(12.0);
  double late = 0.0;
  for (double t : {400.0, 500.0, 600.0}) late = std::max(late, std::abs(ep.at(t)));
  CHECK(late < 0.35 * plateau);
}
