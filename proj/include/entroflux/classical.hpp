#ifndef ENTROFLUX_CLASSICAL_HPP
#define ENTROFLUX_CLASSICAL_HPP

#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include "entroflux/types.hpp"

namespace entroflux {

// Thermally driven harmonic chain: system sites [-n, n] inside [-m, m],
// reservoirs attached on both sides. Forces X_{L/R} = beta - beta_{L/R}.
struct ChainConfig {
  int n = 20;
  int m = 300;
  double beta = 1.0;
  double beta_l = 0.5;
  double beta_r = 1.0;

  double x_l() const { return beta - beta_l; }
  double x_r() const { return beta - beta_r; }
};

// Dense phase-space operators of the chain; sites are indexed x + m, the
// momentum block comes first. One symmetric eigendecomposition of the
// position block drives every propagator evaluation.
class ChainOperators {
 public:
  explicit ChainOperators(const ChainConfig& cfg);

  const ChainConfig& config() const { return cfg_; }
  int sites() const { return sites_; }
  int phase_dim() const { return 2 * sites_; }

  const RealMatrix& h() const { return h_; }
  const RealMatrix& h0() const { return h0_; }
  RealMatrix k_of(double y_l, double y_r) const;  // y_l h_L + y_r h_R
  const RealMatrix& k_x() const { return k_x_; }
  const RealMatrix& covariance() const { return d_x_; }  // (beta h - k(X))^{-1}

  RealMatrix propagator(double t) const;  // e^{tL}, block trigonometric

  // max |e^{tL*} h e^{tL} - h| at t = 1, and |det e^{tL} - 1|
  double energy_conservation_defect() const;
  double liouville_defect() const;

  // spectrum of the position block (squared eigenfrequencies)
  const RealVector& squared_frequencies() const { return freq_sq_; }

 private:
  friend class MeanEntropyProduction;
  ChainConfig cfg_;
  int sites_;
  RealMatrix h_, h0_, k_x_, d_x_;
  RealMatrix hq_vecs_;   // eigenvectors of the position block
  RealVector freq_sq_;   // its eigenvalues
  RealMatrix trig(const std::function<double(double)>& f) const;  // V f(sqrt(.)) V^T
};

ChainOperators chain_build(const ChainConfig& cfg);

// g_t(X, Y) = -1/2 log det(1 - D_X (e^{tL*} k(Y) e^{tL} - k(Y))); the
// +infinity sentinel marks a nonpositive determinant argument.
ExtReal chain_gt(const ChainOperators& ops, double t, double y_l, double y_r);

// e_t(alpha) = g_t(X, alpha X) for a whole alpha grid from one symmetric
// eigendecomposition (the determinant argument is linear in alpha).
std::vector<ExtReal> chain_et_diagonal(const ChainOperators& ops, double t,
                                       const std::vector<double>& alphas);

// Almost-periodic evaluator of the mean entropy production rate
// omega_X(Sigma^t) = (1/2t) tr(D_X (k(X) - e^{tL*} k(X) e^{tL})).
class MeanEntropyProduction {
 public:
  explicit MeanEntropyProduction(const ChainOperators& ops);
  double at(double t) const;

 private:
  RealVector freq_;
  Matrix weights_;
  double static_term_;
};

// Stationary-regime functional with the covariance transported to a large
// freezing time; at X = 0 it coincides with chain_gt exactly.
ExtReal chain_gc_gplus_t(const ChainOperators& ops, double t, double y_l, double y_r,
                         double freeze_time);

// Closed forms of the infinite-volume, large-time limits.
inline double chain_kappa() { return (std::sqrt(5.0) - 1.0) / (2.0 * M_PI); }

ExtReal chain_g_closed(double beta, double x_l, double x_r, double y_l, double y_r);
ExtReal chain_e_closed(double t_left, double t_right, double alpha);

struct ChainSteady {
  double flux;                // kappa (T_L - T_R), out of the left reservoir
  double entropy_production;  // kappa (T_L - T_R)^2 / (T_L T_R)
  double clt_d11;             // kappa (T_L^2 + T_R^2)
  double clt_d12;             // -clt_d11
};
ChainSteady chain_steady(double beta_l, double beta_r);

struct ChainRatePoint {
  double s_l;
  double s_r;
  double rate;
};
// Parametric rate function on the anti-diagonal s_L = -s_R.
ChainRatePoint chain_rate(double beta, double x_l, double x_r, double theta);

// On-shell scattering matrix of the decoupled-to-coupled comparison.
Matrix chain_onshell_s(double k, int n);

}  // namespace entroflux

#endif
