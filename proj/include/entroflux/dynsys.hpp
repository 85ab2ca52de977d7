#ifndef ENTROFLUX_DYNSYS_HPP
#define ENTROFLUX_DYNSYS_HPP

#include <functional>
#include <optional>
#include <vector>

#include "entroflux/states.hpp"

namespace entroflux {

// Anti-unitary involution: entrywise conjugation in the distinguished basis,
// composed with a unitary. Theta(A) = U conj(A) U*.
class TimeReversal {
 public:
  TimeReversal() = default;  // plain conjugation
  explicit TimeReversal(Matrix u) : u_(std::move(u)) {}

  Matrix apply(const Matrix& a) const {
    if (u_.size() == 0) return a.conjugate();
    return u_ * a.conjugate() * u_.adjoint();
  }

 private:
  Matrix u_;
};

// (H, omega) with optional time reversal and optional commuting charge
// decomposition of log omega.
class QuantumDynamicalSystem {
 public:
  QuantumDynamicalSystem(HermitianOperator h, DensityMatrix omega,
                         std::optional<TimeReversal> theta = std::nullopt,
                         std::vector<Matrix> charges = {}, double tol = 1e-10);

  int dim() const { return h_.dim(); }
  const HermitianOperator& hamiltonian() const { return h_; }
  const DensityMatrix& omega() const { return omega_; }
  bool has_time_reversal() const { return theta_.has_value(); }
  const TimeReversal& time_reversal() const { return *theta_; }
  bool has_charges() const { return !charges_.empty(); }
  const std::vector<Matrix>& charges() const { return charges_; }

  Matrix log_omega() const { return omega_.log_on_support(); }
  Matrix omega_t(double t) const;        // e^{-itH} omega e^{itH}
  DensityMatrix omega_t_state(double t) const;
  Matrix heisenberg(const Matrix& a, Complex t) const;  // e^{itH} A e^{-itH}

 private:
  HermitianOperator h_;
  DensityMatrix omega_;
  std::optional<TimeReversal> theta_;
  std::vector<Matrix> charges_;
};

// sigma = i [log omega, H]; omega(sigma) = 0, and Theta(sigma) = -sigma
// under time reversal.
Matrix entropy_production(const QuantumDynamicalSystem& sys);

// log omega_t - log omega.
Matrix relative_hamiltonian(const QuantumDynamicalSystem& sys, double t);

// Entropic pressure functional, p in [1, inf]. At p = inf this is
// log tr exp(log omega + alpha (log omega_t - log omega)).
double e_pt(const QuantumDynamicalSystem& sys, double t, double alpha, double p);

struct EptDerivatives {
  double d_alpha_at_0;   // equals omega(l) = S(omega|omega_t)
  double d_alpha_at_1;   // equals omega_t(l) = -S(omega_t|omega)
  double d2_alpha_at_0;
  double ref_at_0;       // S(omega|omega_t)
  double ref_at_1;       // -S(omega_t|omega)
  double ref_d2;         // variance reference for the chosen p
};

// Five-point central differences in alpha, h scaled by the parameter size,
// with the exact first-derivative references. For p = 2 the second
// derivative reference is omega(l^2) - omega(l)^2, for p = inf the
// Kubo-Mari variance.
EptDerivatives e_pt_derivatives(const QuantumDynamicalSystem& sys, double t, double p,
                                double h = 1e-3);

// Multi-parameter functional over the charge decomposition.
double e_pt_multi(const QuantumDynamicalSystem& sys, double t, const RealVector& alpha, double p);

// Kubo-Mari inner product <A|B>_rho via divided differences in the
// eigenbasis of rho; the coincidence limit is handled analytically.
Complex kubo_mari(const DensityMatrix& rho, const Matrix& a, const Matrix& b);

// Interaction-picture propagator E_V(z) = e^{iz(H+V)} e^{-izH}.
Matrix interaction_propagator(const HermitianOperator& h, const HermitianOperator& v, Complex z);

// A control family: for each force X, a system and its flux observables
// satisfying sigma_X = sum_j X_j Phi_X^(j).
struct ForcedSystem {
  QuantumDynamicalSystem sys;
  std::vector<Matrix> fluxes;
};
using ControlledFamily = std::function<ForcedSystem(const RealVector&)>;

// Generalized pressure log tr exp(log omega_X + Y . int_0^t Phi_{X,-s} ds);
// the time integral runs on Simpson node doubling.
double e_gen(const ControlledFamily& family, double t, const RealVector& x, const RealVector& y,
             double quad_atol = defaults::quad_atol);

struct TransportReport {
  RealMatrix derivative_path;   // d <Phi_j>_t / d X_k at X = 0
  RealMatrix green_kubo_path;   // windowed current-current correlation
  double max_difference;
  double max_asymmetry;         // of the derivative path
};

// Finite-time kinetic coefficients by the two independent routes.
TransportReport finite_time_transport(const ControlledFamily& family, double t,
                                      double fd_step = 1e-3);

// Open system: sample + thermal reservoirs with conserved charges and a
// gauge-invariant coupling.
struct ReservoirSpec {
  HermitianOperator h;
  HermitianOperator n;
  double beta;
  double mu;
};

struct OpenSystemSpec {
  HermitianOperator h_sample;
  HermitianOperator n_sample;
  DensityMatrix omega_sample;
  std::vector<ReservoirSpec> reservoirs;
  // coupling_j acts on sample (x) reservoir_j, embedded automatically
  std::vector<Matrix> couplings;
  double lambda = 1.0;
};

struct OpenSystem {
  QuantumDynamicalSystem sys;        // coupled dynamics, product reference state
  std::vector<int> dims;             // slot dimensions: sample, reservoirs...
  std::vector<Matrix> h_res;         // embedded reservoir Hamiltonians
  std::vector<Matrix> n_res;         // embedded reservoir charges
  std::vector<Matrix> energy_fluxes; // Phi_j = -i[H, H_j]
  std::vector<Matrix> charge_fluxes; // J_j = -i[H, N_j]
  Matrix q_sample;                   // -log omega_S, embedded
  std::vector<double> betas, mus;
};

OpenSystem build_open_system(const OpenSystemSpec& spec);

// The thermodynamic-force parametrization of the open system near
// (beta_eq, mu_eq): X_j = beta_eq - beta_j, X_{n+j} = -beta_eq mu_eq +
// beta_j mu_j, with reference state exp(-beta_eq(H - mu_eq N) +
// sum_j X_j H_j + X_{n+j} N_j)/Z and X-independent fluxes.
ControlledFamily open_system_family(const OpenSystemSpec& spec, double beta_eq, double mu_eq,
                                    bool charge_sector = true);

}  // namespace entroflux

#endif
