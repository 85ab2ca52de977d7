#ifndef ENTROFLUX_MODULAR_HPP
#define ENTROFLUX_MODULAR_HPP

#include <iosfwd>
#include <vector>

#include "entroflux/dynsys.hpp"
#include "entroflux/states.hpp"

namespace entroflux {

// Finite list of weighted atoms in R^m. Atoms closer than the binning
// tolerance are merged with summed weights, so degenerate spectral
// differences collapse deterministically before any ratio test.
class AtomicMeasure {
 public:
  struct Atom {
    RealVector location;
    double weight;
  };

  AtomicMeasure(std::vector<Atom> atoms, double btol = defaults::btol);

  const std::vector<Atom>& atoms() const { return atoms_; }
  int location_dim() const { return atoms_.empty() ? 0 : static_cast<int>(atoms_[0].location.size()); }
  double total_mass() const;
  double binning_tolerance() const { return btol_; }

  // Scalar helpers for one-dimensional measures.
  double mean() const;
  double second_moment() const;
  double mass_at_least(double threshold) const;  // mass of [threshold, inf)
  double laplace(const RealVector& alpha_t) const;  // integral of e^{-a.s} d(measure)

  AtomicMeasure reflected() const;
  AtomicMeasure marginal(int component) const;

  void write_csv(std::ostream& os) const;
  void write_json(std::ostream& os) const;

 private:
  std::vector<Atom> atoms_;
  double btol_;
};

double total_variation(const AtomicMeasure& a, const AtomicMeasure& b);

// Eigenvalue-ratio atoms of the relative modular operator of (rho, nu):
// pairs (a_i, b_j) over the support of nu with weight b_j |<u_i|v_j>|^2.
// Kernel eigenvalues of rho enter as ratio 0 (the extended definition);
// zero-weight atoms are dropped.
struct RelativeModularSpectrum {
  struct Atom {
    double ratio;   // a_i / b_j, 0 on the rho-kernel sector
    double weight;
  };
  std::vector<Atom> atoms;

  double total_weight() const;
  // log sum over ratio > 0 of ratio^alpha * weight; reproduces the Renyi
  // relative entropy. NegInfinity for mutually singular pairs.
  ExtReal renyi(double alpha) const;
};

RelativeModularSpectrum relative_modular_spectrum(const DensityMatrix& rho,
                                                  const DensityMatrix& nu);

// Spectral measure of the relative modular operator of (rho, nu) in the
// vector state of nu; mass 1. Feeds the hypothesis-testing lower bound.
AtomicMeasure modular_spectral_measure(const DensityMatrix& rho, const DensityMatrix& nu);

// Full counting statistics measure of the system at time t: atoms at
// -(1/|t|) log(a_i/b_j) for the pair (omega_t, omega). With this
// normalization the measure at -t coincides with the two-time measurement
// statistics for every system, TRI or not. t = 0 gives a point mass at 0.
AtomicMeasure fcs_spectral_measure(const QuantumDynamicalSystem& sys, double t);

// Joint distribution of mean change rates (s'-s)/t of a commuting family of
// observables measured at times 0 and t, starting from omega.
AtomicMeasure two_time_distribution(const DensityMatrix& omega, const HermitianOperator& h,
                                    double t, const std::vector<Matrix>& observables,
                                    double ctol = defaults::ctol);

// Joint FCS of the charge decomposition log omega = sum Q_j: joint spectral
// measure of the commuting relative modular logarithms, scaled by -1/|t|.
AtomicMeasure multi_fcs(const QuantumDynamicalSystem& sys, double t);

// State-dependent noncommutative p-norm ||xi omega^{1/p-1/2}||_p.
double araki_masuda_norm(const Matrix& xi, const DensityMatrix& omega, double p);

struct TransferCheck {
  double lhs;  // entropic pressure functional
  double rhs;  // transfer-group expression through the p-norm
  double gap;
};

// Cross-check of the entropic pressure against the isometric-implementation
// route: e_{p,t}(alpha) = p log || omega_t^{a/p} omega^{1/2-a/p} ||_{omega,p}.
TransferCheck transfer_functional_check(const QuantumDynamicalSystem& sys, double t, double alpha,
                                        double p);

// Joint diagonalization of a commuting Hermitian family by iterated block
// refinement; deterministic for reproducible test output.
struct JointDiagonalization {
  Matrix basis;        // unitary, columns are joint eigenvectors
  RealMatrix values;   // values(i, k): eigenvalue of ops[k] on column i
};
JointDiagonalization simultaneous_diagonalize(const std::vector<Matrix>& ops,
                                              double ctol = defaults::ctol);

}  // namespace entroflux

#endif
