// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are pinned in code next to each check.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "entroflux/classical.hpp"
#include "entroflux/dynsys.hpp"
#include "entroflux/ldp.hpp"
#include "entroflux/modular.hpp"
#include "entroflux/quasifree.hpp"

using namespace entroflux;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

int failures = 0;

void run(int index, const std::string& title, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail += std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                            start)
          .count() /
      1000.0;
  std::printf("%s criterion %d: %s (%.1f s)%s%s\n", out.pass ? "PASS" : "FAIL", index,
              title.c_str(), secs, out.detail.empty() ? "" : " -- ",
              out.detail.c_str());
  std::fflush(stdout);
  if (!out.pass) ++failures;
}

QuantumDynamicalSystem random_tri_system(Rng& rng, int dim) {
  RealMatrix h = rng.real_symmetric(dim);
  RealMatrix w = rng.real_density(dim);
  return QuantumDynamicalSystem(HermitianOperator(h.cast<Complex>()),
                                DensityMatrix(w.cast<Complex>(), 1e-9), TimeReversal());
}

QuantumDynamicalSystem random_system(Rng& rng, int dim) {
  return QuantumDynamicalSystem(HermitianOperator(rng.hermitian(dim)),
                                sample_faithful_density(rng, dim));
}

OpenSystemSpec two_reservoir_spec(double beta_l, double beta_r, double lambda) {
  Matrix sz(2, 2);
  sz << 1, 0, 0, -1;
  Matrix hs = 0.7 * sz;
  Matrix ns = Matrix::Zero(2, 2);
  ns(0, 0) = 1.0;
  Matrix hr = Matrix::Zero(2, 2);
  hr(0, 0) = 1.1;
  hr(1, 1) = -0.4;
  Matrix nr = Matrix::Zero(2, 2);
  nr(0, 0) = 1.0;
  Matrix v = Matrix::Zero(4, 4);
  v(0 * 2 + 1, 1 * 2 + 0) = 1.0;
  v(1 * 2 + 0, 0 * 2 + 1) = 1.0;
  Matrix ws = hermitian_exp(-0.5 * hs);
  ws /= ws.trace().real();
  return OpenSystemSpec{HermitianOperator(hs),
                        HermitianOperator(ns),
                        DensityMatrix(ws, 1e-9),
                        {{HermitianOperator(hr), HermitianOperator(nr), beta_l, 0.0},
                         {HermitianOperator(hr), HermitianOperator(nr), beta_r, 0.0}},
                        {v, v},
                        lambda};
}

void criterion_1(Outcome& out) {
  const auto start = std::chrono::steady_clock::now();

  // closed forms are the stated formulas
  out.require(std::abs(chain_kappa() - (std::sqrt(5.0) - 1.0) / (2.0 * M_PI)) == 0.0, "kappa");
  auto steady = chain_steady(0.5, 1.0);  // T_L = 2, T_R = 1
  out.require(std::abs(steady.flux - chain_kappa() * (2.0 - 1.0)) < 1e-15, "flux formula");
  out.require(std::abs(steady.entropy_production - chain_kappa() * 0.5) < 1e-15, "ep formula");
  out.require(std::abs(steady.clt_d11 - chain_kappa() * 5.0) < 1e-15, "clt formula");
  out.require(steady.clt_d12 == -steady.clt_d11, "clt cross sign");

  // finite volume against the limit
  ChainConfig cfg;
  cfg.n = 20;
  cfg.m = 300;
  cfg.beta = 1.0;
  cfg.beta_l = 0.5;
  cfg.beta_r = 1.0;
  auto ops = chain_build(cfg);
  const double t = 30.0;
  auto finite = chain_et_diagonal(ops, t, {0.2, 0.5, 0.8});
  const double alphas[3] = {0.2, 0.5, 0.8};
  for (int i = 0; i < 3; ++i) {
    const double limit = chain_e_closed(2.0, 1.0, alphas[i]).value();
    const double rel = std::abs(finite[i].value() / t - limit) / std::abs(limit);
    out.require(rel <= 0.05, "alpha " + std::to_string(alphas[i]) + " rel " +
                                 std::to_string(rel));
  }
  const double secs =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                            start)
          .count() /
      1000.0;
  out.require(secs < 60.0, "runtime " + std::to_string(secs) + " s");
}

void criterion_2(Outcome& out) {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(2024);
  double worst_sym = 0.0, worst_end = 0.0;
  for (int k = 0; k < 50; ++k) {
    auto sys = random_tri_system(rng, 2 + (k % 7));
    for (double p : {1.0, 2.0, 4.0, std::numeric_limits<double>::infinity()})
      for (double t : {0.5, 2.0, 10.0}) {
        for (double a : {0.15, 0.35, 0.45})
          worst_sym = std::max(
              worst_sym, std::abs(e_pt(sys, t, a, p) - e_pt(sys, t, 1.0 - a, p)));
        worst_end = std::max(worst_end, std::abs(e_pt(sys, t, 0.0, p)));
        worst_end = std::max(worst_end, std::abs(e_pt(sys, t, 1.0, p)));
      }
  }
  out.require(worst_sym <= 1e-10, "symmetry gap " + std::to_string(worst_sym));
  out.require(worst_end <= 1e-12, "endpoint value " + std::to_string(worst_end));
  const double secs =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                            start)
          .count() /
      1000.0;
  out.require(secs < 30.0, "runtime " + std::to_string(secs) + " s");
}

void criterion_3(Outcome& out) {
  Rng rng(333);
  double worst_tv = 0.0, worst_pair = 0.0, worst_moment = 0.0;
  for (int k = 0; k < 6; ++k) {
    const int dim = 2 + k;  // up to 7
    auto sys = (k % 2) ? random_system(rng, dim) : random_tri_system(rng, dim);
    for (double t : {0.8, 2.5}) {
      auto p = two_time_distribution(sys.omega(), sys.hamiltonian(), t,
                                     {Matrix(-sys.log_omega())});
      worst_tv = std::max(worst_tv, total_variation(p, fcs_spectral_measure(sys, -t)));

      const double h = 1e-3;
      auto e2m = [&](double a) { return e_pt(sys, -t, a, 2.0); };
      const double d1 =
          (-e2m(2 * h) + 8 * e2m(h) - 8 * e2m(-h) + e2m(-2 * h)) / (12 * h);
      const double d2 = (-e2m(2 * h) + 16 * e2m(h) - 30 * e2m(0) + 16 * e2m(-h) -
                         e2m(-2 * h)) /
                        (12 * h * h);
      worst_moment = std::max(worst_moment, std::abs(p.mean() + d1 / t));
      const double var = p.second_moment() - p.mean() * p.mean();
      worst_moment = std::max(worst_moment, std::abs(var - d2 / (t * t)));
    }
  }
  // TRI pairing at the measure level
  for (int k = 0; k < 5; ++k) {
    auto sys = random_tri_system(rng, 2 + k);
    const double t = 1.4;
    auto q = fcs_spectral_measure(sys, t);
    std::vector<AtomicMeasure::Atom> reweighted;
    for (const auto& atom : q.atoms())
      reweighted.push_back({atom.location, atom.weight * std::exp(-t * atom.location[0])});
    worst_pair = std::max(worst_pair, total_variation(q.reflected(), AtomicMeasure(reweighted)));
  }
  out.require(worst_tv <= 1e-10, "total variation " + std::to_string(worst_tv));
  out.require(worst_pair <= 1e-10, "pair relation " + std::to_string(worst_pair));
  out.require(worst_moment <= 1e-6, "moment gap " + std::to_string(worst_moment));
}

void criterion_4(Outcome& out) {
  Rng rng(44);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    auto sys = random_system(rng, 2 + (k % 5));
    for (double p : {2.0, 4.0})
      for (double a : {0.2, 0.5, 0.8})
        worst = std::max(worst, transfer_functional_check(sys, 1.2, a, p).gap);
  }
  out.require(worst <= 1e-9, "gap " + std::to_string(worst));
}

void criterion_5(Outcome& out) {
  Rng rng(55);
  double worst = 0.0;
  for (int d : {3, 4, 5, 6}) {
    FockSpace fock(d);
    OnePartModel model;
    model.sample_dim = d;
    model.h = rng.hermitian(d);
    model.h0 = model.h;
    Matrix k = rng.hermitian(d);
    model.t0 = matfun(HermitianOperator(k), [](double x) {
                 return 0.1 + 0.8 / (1.0 + std::exp(-x));
               }).matrix();
    QuantumDynamicalSystem sys(HermitianOperator(fock.d_gamma(model.h)),
                               DensityMatrix(fock.quasifree_density(model.t0), 1e-9));
    for (double t : {0.9, 2.2})
      for (double p : {1.0, 2.0, 4.0, std::numeric_limits<double>::infinity()})
        for (double a : {0.25, 0.6})
          worst = std::max(worst, std::abs(qf_e_pt(model, t, a, p) - e_pt(sys, t, a, p)));
  }
  out.require(worst <= 1e-9, "pressure gap " + std::to_string(worst));

  FockSpace fock(5);
  double worst_det = 0.0;
  for (int k = 0; k < 5; ++k) {
    Matrix a = rng.ginibre(5);
    const Complex lhs = fock.gamma(a).trace();
    const Complex rhs = (Matrix::Identity(5, 5) + a).determinant();
    worst_det = std::max(worst_det, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
  }
  out.require(worst_det <= 1e-9, "determinant identity " + std::to_string(worst_det));
}

void criterion_6(Outcome& out) {
  const double bl = 0.6, br = 1.1, coupling = 0.9, field = 1.3;
  double worst_p = 0.0, worst_sym = 0.0;
  for (double a : {0.2, 0.35, 0.5, 0.65, 0.8}) {
    const double e1 = xy_eplus_scattering(bl, br, coupling, field, a, 1.0);
    const double e2 = xy_eplus_scattering(bl, br, coupling, field, a, 2.0);
    const double einf =
        xy_eplus_scattering(bl, br, coupling, field, a, std::numeric_limits<double>::infinity());
    worst_p = std::max({worst_p, std::abs(e1 - e2), std::abs(e2 - einf)});
    worst_sym = std::max(worst_sym, std::abs(xy_eplus(bl, br, coupling, field, a, 2.0) -
                                             xy_eplus(bl, br, coupling, field, 1.0 - a, 2.0)));
  }
  out.require(worst_p <= 1e-7, "p dependence " + std::to_string(worst_p));
  out.require(worst_sym <= 1e-9, "alpha symmetry " + std::to_string(worst_sym));

  const double beta = 1.0;
  const double h = 1e-4;
  const double fd = -(xy_eplus_gen(beta, beta - bl, beta - br, h, 0.0, coupling, field) -
                      xy_eplus_gen(beta, beta - bl, beta - br, -h, 0.0, coupling, field)) /
                    (2 * h);
  const double current = xy_steady_current(bl, br, coupling, field);
  out.require(std::abs(fd - current) <= 1e-6,
              "current gap " + std::to_string(std::abs(fd - current)));

  double worst_oracle = 0.0;
  for (int size : {2, 4, 6}) {
    FockSpace fock(size);
    HermitianOperator many(fock.d_gamma(xy_one_particle(size, coupling, field)));
    HermitianOperator spin(xy_spin_hamiltonian(size, coupling, field));
    RealVector diff = spin.spectral().eigenvalues - many.spectral().eigenvalues;
    worst_oracle = std::max(worst_oracle, diff.maxCoeff() - diff.minCoeff());
  }
  out.require(worst_oracle <= 1e-9, "spin oracle " + std::to_string(worst_oracle));
}

void criterion_7(Outcome& out) {
  const double bl = 0.8, br = 1.4, ml = 0.15, mr = -0.1;
  std::vector<LeadSpec> leads = {{bl, ml}, {br, mr}};
  auto sc = swap_scattering(1);
  auto lb = landauer_buttiker(leads, sc);
  out.require(std::abs(lb.charge[0] + lb.charge[1]) <= 1e-9,
              "charge conservation " + std::to_string(lb.charge[0] + lb.charge[1]));

  const double h = 1e-4;
  RealVector ep = RealVector::Zero(2), em = RealVector::Zero(2);
  ep[0] = h;
  em[0] = -h;
  const double deriv =
      (levitov_lesovik_rate(leads, sc, ep) - levitov_lesovik_rate(leads, sc, em)) / (2 * h);
  out.require(std::abs(deriv - lb.charge[0]) <= 1e-6,
              "counting derivative " + std::to_string(std::abs(deriv - lb.charge[0])));

  // finite half-width 300 against the stationary value; the time average
  // runs over [t/2, t] to drop the startup transient
  std::vector<LeadSpec> thermal = {{bl, 0.0}, {br, 0.0}};
  auto lb_thermal = landauer_buttiker(thermal, sc);
  OnePartModel m = ebb_chain(1, 300, bl, br, 0.0, 0.0, 1.0);
  FluxAverager avg(m, m.energy_flux(0));
  const double t = 40.0;
  const int nodes = 400;
  double acc = 0.0;
  for (int i = 0; i < nodes; ++i) acc += avg.at(t / 2 + (i + 0.5) * (t / 2) / nodes);
  acc /= nodes;
  const double rel = std::abs(acc - lb_thermal.energy[0]) / std::abs(lb_thermal.energy[0]);
  out.require(rel <= 0.05, "finite-volume flux rel " + std::to_string(rel));
}

void criterion_8(Outcome& out) {
  Rng rng(88);
  bool optimal = true;
  double chernoff_margin = 0.0, lower_margin = 0.0;
  for (int inst = 0; inst < 4; ++inst) {
    DensityMatrix rho = sample_density(rng, 3 + inst % 2);
    DensityMatrix nu = sample_faithful_density(rng, 3 + inst % 2);
    const double p = 0.3 + 0.1 * inst;
    auto opt = hypothesis_min_error(rho, nu, p);
    for (int k = 0; k < 1000; ++k) {
      const Matrix proj = rng.projection(rho.dim(), 1 + (k % rho.dim()));
      if (hypothesis_error_of(rho, nu, p, proj) < opt.min_error - 1e-11) optimal = false;
    }
    for (double a = 0.0; a <= 1.0 + 1e-12; a += 0.1) {
      const double bound = std::pow(p, a) * std::pow(1 - p, 1 - a) *
                           std::exp(renyi_relative_entropy(rho, nu, a).as_double());
      chernoff_margin = std::min(chernoff_margin, bound - opt.min_error);
    }
    auto mu = modular_spectral_measure(rho, nu);
    lower_margin = std::min(
        lower_margin, opt.min_error - 0.5 * std::min(p, 1 - p) * mu.mass_at_least(1.0));
  }
  out.require(optimal, "optimal projection beaten");
  out.require(chernoff_margin >= -1e-12, "upper bound margin " + std::to_string(chernoff_margin));
  out.require(lower_margin >= -1e-11, "lower bound margin " + std::to_string(lower_margin));

  // stationary-pressure argmin on a 1e-3 grid
  std::vector<LeadSpec> leads = {{0.7, 0.1}, {1.3, -0.1}};
  auto sc = swap_scattering(2);
  double best = 1e300, argmin = -1.0;
  for (double a = 0.0; a <= 1.0 + 1e-12; a += 1e-3) {
    const double v = ebb_e2plus(leads, sc, a);
    if (v < best) {
      best = v;
      argmin = a;
    }
  }
  out.require(std::abs(argmin - 0.5) <= 1e-3 + 1e-12, "argmin " + std::to_string(argmin));
}

void criterion_9(Outcome& out) {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(99);
  const double slack = -1e-11;
  double worst = 0.0;
  const double inf = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 1000; ++k) {
    const int dim = 3 + (k % 4);
    Matrix a = rng.hermitian(dim);
    Matrix b = rng.hermitian(dim);

    // Peierls-Bogoliubov, Klein, Golden-Thompson on shifted positives
    const double shift_a = schatten_norm(a, inf) + 0.1;
    const double shift_b = schatten_norm(b, inf) + 0.1;
    HermitianOperator pa(a + shift_a * Matrix::Identity(dim, dim));
    HermitianOperator pb(b + shift_b * Matrix::Identity(dim, dim));
    auto gaps = trace_inequality_gaps(pa, pb);
    worst = std::min({worst, gaps.peierls_bogoliubov, gaps.klein, gaps.golden_thompson});

    // Hoelder and Minkowski
    Matrix ga = rng.ginibre(dim), gb = rng.ginibre(dim);
    const double p = 1.0 + 4.0 * rng.uniform();
    const double q = p / (p - 1.0);
    worst = std::min(worst, schatten_norm(ga, p) * schatten_norm(gb, q) -
                                schatten_norm(ga * gb, 1.0));
    const double pm = 1.0 + 6.0 * rng.uniform();
    worst = std::min(worst, schatten_norm(ga, pm) + schatten_norm(gb, pm) -
                                schatten_norm(ga + gb, pm));

    // monotone product sequence with its limit
    if (k % 25 == 0) {
      double prev = inf;
      const double limit = std::exp(log_tr_exp(a + b));
      for (double pq : {1.0, 2.0, 4.0, 8.0}) {
        const double val =
            std::pow(schatten_norm(hermitian_exp(b / pq) * hermitian_exp(a / pq), pq), pq);
        worst = std::min(worst, prev - val);
        worst = std::min(worst, val - limit);
        prev = val;
      }
    }

    // operator monotonicity of fractional powers
    Matrix gc = rng.ginibre(dim);
    Matrix base = gc * gc.adjoint() + 0.05 * Matrix::Identity(dim, dim);
    Matrix gd = rng.ginibre(dim);
    Matrix bigger = base + gd * gd.adjoint();
    for (double s : {0.25, 0.5, 0.75}) {
      HermitianOperator as(matfun(HermitianOperator(bigger), [s](double x) {
        return std::pow(x, s);
      }).matrix());
      HermitianOperator bs(matfun(HermitianOperator(base), [s](double x) {
        return std::pow(x, s);
      }).matrix());
      HermitianOperator diff(as.matrix() - bs.matrix());
      worst = std::min(worst, diff.spectral().eigenvalues.minCoeff());
    }
  }
  out.require(worst >= slack, "worst slack " + std::to_string(worst));
  const double secs =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                            start)
          .count() /
      1000.0;
  out.require(secs < 60.0, "runtime " + std::to_string(secs) + " s");
}

void criterion_10(Outcome& out) {
  auto family = open_system_family(two_reservoir_spec(1.0, 1.0, 0.4), 1.0, 0.0, false);
  auto rep = finite_time_transport(family, 2.0);
  out.require(rep.max_difference <= 1e-5, "path difference " + std::to_string(rep.max_difference));
  out.require(rep.max_asymmetry <= 1e-6, "asymmetry " + std::to_string(rep.max_asymmetry));

  // classical Einstein relation from the closed forms
  const double beta = 1.0, h = 1e-4;
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
  auto steady = chain_steady(beta, beta);
  out.require(std::abs(mixed(0, 0) - 0.5 * steady.clt_d11) <= 1e-6,
              "einstein diagonal " + std::to_string(mixed(0, 0) - 0.5 * steady.clt_d11));
  out.require(std::abs(mixed(0, 1) - 0.5 * steady.clt_d12) <= 1e-6,
              "einstein cross " + std::to_string(mixed(0, 1) - 0.5 * steady.clt_d12));
}

void criterion_11(Outcome& out) {
  // biconjugation
  ConvexFn entropic([](double s) { return std::cosh(s) - 1.0; }, -3.0, 3.0);
  double worst_b = 0.0;
  for (double s : {-2.0, -0.5, 0.0, 1.2, 2.4})
    worst_b = std::max(worst_b, std::abs(biconjugate(entropic, s, 16.0) - entropic(s)));
  out.require(worst_b <= 1e-7, "biconjugation " + std::to_string(worst_b));

  // classical rate against the numeric transform
  const double beta = 1.0, xl = 0.5, xr = 0.0;
  ConvexFn e([&](double a) { return chain_e_closed(2.0, 1.0, a).value(); }, -0.95, 1.95);
  double worst_r = 0.0;
  for (double theta : {-1.2, -0.4, 0.5, 1.1, 1.8}) {
    auto pt = chain_rate(beta, xl, xr, theta);
    worst_r = std::max(worst_r,
                       std::abs(rate_from_cgf(e, (xl - xr) * pt.s_l) - pt.rate));
  }
  out.require(worst_r <= 1e-7, "rate match " + std::to_string(worst_r));

  std::vector<double> grid;
  for (double s = -0.1; s <= 0.1 + 1e-12; s += 0.02) grid.push_back(s);
  const double sym = rate_symmetry_check(e, grid);
  out.require(sym <= 1e-7, "rate symmetry " + std::to_string(sym));
}

}  // namespace

int main() {
  run(1, "classical closed forms and finite-volume convergence", criterion_1);
  run(2, "fluctuation symmetries over seeded reversible systems", criterion_2);
  run(3, "counting statistics identity, pairing and moments", criterion_3);
  run(4, "transfer-group identity for the pressure", criterion_4);
  run(5, "one-particle determinants equal many-body pressure", criterion_5);
  run(6, "open spin chain: p-independence, symmetry, current, oracle", criterion_6);
  run(7, "junction transport: conservation, counting, finite volume", criterion_7);
  run(8, "hypothesis testing bounds and stationary argmin", criterion_8);
  run(9, "trace inequality suite over seeded samples", criterion_9);
  run(10, "finite-time linear response, two routes", criterion_10);
  run(11, "transform identities for rate functions", criterion_11);
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
