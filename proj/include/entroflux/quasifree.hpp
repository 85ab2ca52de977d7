#ifndef ENTROFLUX_QUASIFREE_HPP
#define ENTROFLUX_QUASIFREE_HPP

#include <functional>
#include <string>
#include <vector>

#include "entroflux/numerics.hpp"
#include "entroflux/quadrature.hpp"

namespace entroflux {

// Fermionic Fock space over C^d in the occupation-number basis, ordered by
// binary index (bit i set = orbital i occupied). Guarded to d <= 10.
class FockSpace {
 public:
  explicit FockSpace(int d);

  int modes() const { return d_; }
  int dim() const { return dim_; }

  const Matrix& creation(int i) const { return create_[i]; }
  Matrix annihilation(int i) const { return create_[i].adjoint(); }
  Matrix creation_of(const Vector& psi) const;      // a*(psi), linear in psi
  Matrix annihilation_of(const Vector& psi) const;  // a(psi), antilinear

  Matrix d_gamma(const Matrix& a) const;  // additive second quantization
  Matrix gamma(const Matrix& a) const;    // multiplicative, via minor determinants
  Matrix number_operator() const { return d_gamma(Matrix::Identity(d_, d_)); }

  // Density matrix of the quasi-free state with one-particle density T,
  // 0 < T < 1.
  Matrix quasifree_density(const Matrix& t) const;

 private:
  int d_;
  int dim_;
  std::vector<Matrix> create_;
};

// det[<psi_i | T phi_j>] when the numbers of creators and annihilators
// match; zero otherwise (gauge invariance).
Complex quasifree_expectation(const Matrix& t, const std::vector<Vector>& create_phis,
                              const std::vector<Vector>& annihilate_psis);

// tr(T1 (log T2 - log T1) + (1-T1)(log(1-T2) - log(1-T1))): relative entropy
// of the corresponding quasi-free states from one-particle data.
double qf_relative_entropy(const Matrix& t1, const Matrix& t2);

struct QfRelativeHamiltonian {
  double scalar;      // log det((1-T1)(1-T)^{-1})
  Matrix one_particle;  // k_{T1} - k_T
};
QfRelativeHamiltonian qf_relative_hamiltonian(const Matrix& t1, const Matrix& t);

// One-particle data of a quasi-free model: coupled and decoupled
// Hamiltonians, initial density, and the block layout with per-lead
// thermodynamic parameters. The sample block is [0, sample_dim).
struct OnePartLead {
  int offset;
  int size;
  double beta;
  double mu;
};

struct OnePartModel {
  Matrix h;   // coupled one-particle Hamiltonian
  Matrix h0;  // decoupled reference Hamiltonian
  Matrix t0;  // initial density, block diagonal
  int sample_dim = 0;
  std::vector<OnePartLead> leads;

  int dim() const { return static_cast<int>(h.rows()); }
  Matrix k0() const;             // log(T0 (1 - T0)^{-1})
  Matrix kt(double t) const;     // e^{-ith} k0 e^{ith}
  Matrix evolve_density(double t) const;
  // Charge-resolved exponent: alpha = (a_S, a_1..a_n, a_{n+1}..a_{2n}),
  // k(alpha) = a_S k_S + sum_j (-a_j beta_j h_j + a_{n+j} beta_j mu_j 1_j).
  Matrix charge_k(const RealVector& alpha) const;
  RealVector diagonal_alpha(double a) const;  // alpha = a * ones

  Matrix lead_projection(int j) const;
  Matrix lead_hamiltonian(int j) const;  // decoupled block, embedded
  Matrix energy_flux(int j) const;       // -i [h, h_j]
  Matrix charge_flux(int j) const;       // -i [h, 1_j]
};

// Entropic pressure of the quasi-free system from one-particle data,
// p in [1, inf]. Requires a faithful density (0 < T0 < 1).
double qf_e_pt(const OnePartModel& model, double t, double alpha, double p);

// Multi-parameter generating functions: the modular one and the direct
// quantization of the classical cumulant generating function. They share
// first and second cumulants; third-order cumulants generally differ.
double qf_e2_multi(const OnePartModel& model, double t, const RealVector& alpha);
double qf_naive(const OnePartModel& model, double t, const RealVector& alpha);

// Tight-binding lead builder: one chain of `sites` sites per lead with
// Dirichlet ends, contact at the lead's first site, coupled to the sample
// through the unit vector chi with strength lambda.
struct LeadBuildSpec {
  int sites;
  double beta;
  double mu;
  Vector chi;
};
OnePartModel ebb_build(const Matrix& h_sample, const Matrix& t_sample,
                       const std::vector<LeadBuildSpec>& leads, double lambda);

// The exactly solvable chain geometry: sample [-l, l] inside one long
// hopping chain of half-width m; scattering through the sample is a pure
// phase times the swap of the leads.
OnePartModel ebb_chain(int l, int m, double beta_l, double beta_r, double mu_l, double mu_r,
                       double beta_sample);

double qf_flux_expectation(const OnePartModel& model, const Matrix& flux, double t);

// Almost-periodic evaluation of t -> tr(T_t F) reusing one diagonalization.
class FluxAverager {
 public:
  FluxAverager(const OnePartModel& model, const Matrix& flux);
  double at(double t) const;
  double time_average(double t, int nodes = 400) const;  // (1/t) int_0^t

 private:
  RealVector freq_;
  Matrix weights_;
};

// -- large-time / infinite-reservoir forms -----------------------------

struct LeadSpec {
  double beta;
  double mu;
};

// On-shell scattering matrix on (0, pi); the lead dispersion is 1 - cos xi.
struct ScatteringData {
  int n;
  std::function<Matrix(double)> s;
  double unitarity_tol = 1e-8;
};

// Phase times the antidiagonal swap; `sign` selects the phase convention
// (only |s_jk| enters any computed quantity).
ScatteringData swap_scattering(int half_width, int sign = +1);

// Large-time entropic pressure per unit time from scattering data,
// p in [1, inf].
double ebb_eplus(const std::vector<LeadSpec>& leads, const ScatteringData& sc, double alpha,
                 double p, const QuadratureSpec& quad = {});
inline double ebb_e2plus(const std::vector<LeadSpec>& leads, const ScatteringData& sc,
                         double alpha, const QuadratureSpec& quad = {}) {
  return ebb_eplus(leads, sc, alpha, 2.0, quad);
}
// Energy/charge resolved version; alpha = (a_1..a_n, a_{n+1}..a_{2n}).
double ebb_e2plus_multi(const std::vector<LeadSpec>& leads, const ScatteringData& sc,
                        const RealVector& alpha, const QuadratureSpec& quad = {});

// Closed form for the two-lead chain; independent of p.
double ebb_two_lead_closed(double beta_l, double beta_r, double mu_l, double mu_r, double alpha,
                           double p, const QuadratureSpec& quad = {});

struct LbFluxes {
  std::vector<double> energy;
  std::vector<double> charge;
  double entropy_production;  // -sum beta_j (energy_j - mu_j charge_j)
};
LbFluxes landauer_buttiker(const std::vector<LeadSpec>& leads, const ScatteringData& sc,
                           const QuadratureSpec& quad = {});

// Large-time cumulant generating function of charge transfer.
double levitov_lesovik_rate(const std::vector<LeadSpec>& leads, const ScatteringData& sc,
                            const RealVector& nu, const QuadratureSpec& quad = {});

// -- XY chain ----------------------------------------------------------

// One-particle image of the XY chain under the fermionic mapping.
Matrix xy_one_particle(int size, double coupling, double field);
// Model wrapper with the thermal density at inverse temperature beta.
OnePartModel xy_map(int size, double coupling, double field, double beta);
// Open chain [-m, m] with sample [-n, n] and per-part temperatures.
OnePartModel xy_open_chain(int n, int m, double beta_l, double beta_sample, double beta_r,
                           double coupling, double field);

// Spin-side oracle: the 2^size Pauli Hamiltonian (size <= 10).
Matrix xy_spin_hamiltonian(int size, double coupling, double field);

double xy_magnetization(int size, double beta, double coupling, double field);
double xy_magnetization_spin_oracle(int size, double beta, double coupling, double field);
double xy_magnetization_td(double beta, double coupling, double field,
                           const QuadratureSpec& quad = {});

// Large-time pressure of the open XY chain, closed integral form;
// independent of p (validated, not used).
double xy_eplus(double beta_l, double beta_r, double coupling, double field, double alpha,
                double p, const QuadratureSpec& quad = {});
// Same quantity through the general scattering-matrix route at finite p.
double xy_eplus_scattering(double beta_l, double beta_r, double coupling, double field,
                           double alpha, double p, int half_width = 0,
                           const QuadratureSpec& quad = {});
// Two-force generalization used for linear response in the XY geometry.
double xy_eplus_gen(double beta, double x_l, double x_r, double y_l, double y_r, double coupling,
                    double field, const QuadratureSpec& quad = {});
double xy_steady_current(double beta_l, double beta_r, double coupling, double field,
                         const QuadratureSpec& quad = {});

// JSON model description: {"type": "ebb"|"xy", ...}; see README for the
// schema.
OnePartModel load_model_json(const std::string& text);

}  // namespace entroflux

#endif
