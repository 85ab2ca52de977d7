#ifndef ENTROFLUX_STATES_HPP
#define ENTROFLUX_STATES_HPP

#include <functional>
#include <vector>

#include "entroflux/numerics.hpp"
#include "entroflux/quadrature.hpp"
#include "entroflux/random.hpp"

namespace entroflux {

// Positive unit-trace operator. Eigenvalues below ktol * lambda_max are
// treated as exact kernel; entropy formulas use the support projection, never
// clamped logarithms.
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix m, double trace_tol = 1e-12, double ktol = defaults::ktol);

  int dim() const { return op_.dim(); }
  const Matrix& matrix() const { return op_.matrix(); }
  const HermitianOperator& op() const { return op_; }
  int support_rank() const { return support_rank_; }
  bool faithful() const { return faithful_; }
  double kernel_cut() const { return cut_; }

  double expectation(const Matrix& a) const { return (matrix() * a).trace().real(); }
  Complex expectation_c(const Matrix& a) const { return (matrix() * a).trace(); }

  // Sum over lambda > cut of f(lambda) P_lambda; kernel block is zero.
  Matrix on_support(const std::function<double(double)>& f) const;
  Matrix log_on_support() const;
  Matrix power(double x) const;  // fractional power on the support
  Matrix support_projection() const;
  Matrix kernel_projection() const;

 private:
  HermitianOperator op_;
  int support_rank_;
  bool faithful_;
  double cut_;
};

// Kraus-form channel with unital / trace-preserving certificates.
class QuantumChannel {
 public:
  explicit QuantumChannel(std::vector<Matrix> kraus, double tol = 1e-10);

  const std::vector<Matrix>& kraus() const { return kraus_; }
  bool unital() const { return unital_; }
  bool trace_preserving() const { return trace_preserving_; }

  Matrix apply(const Matrix& x) const;          // X -> sum V X V*
  Matrix apply_adjoint(const Matrix& x) const;  // X -> sum V* X V

 private:
  std::vector<Matrix> kraus_;
  bool unital_;
  bool trace_preserving_;
};

double vn_entropy(const DensityMatrix& rho);

// Relative entropy tr(rho (log nu - log rho)); NegInfinity when the support
// condition fails. Always <= 0.
ExtReal relative_entropy(const DensityMatrix& rho, const DensityMatrix& nu);

// Renyi relative entropy log tr(rho^alpha nu^{1-alpha}) through the spectral
// sum over nonzero eigenvalue pairs; NegInfinity iff rho and nu are mutually
// singular.
ExtReal renyi_relative_entropy(const DensityMatrix& rho, const DensityMatrix& nu, double alpha);

struct HypothesisTestResult {
  double min_error;   // D_p
  Matrix optimal_projection;
};

// Bayesian discrimination of (rho with prior p) against (nu with prior 1-p).
// Error of a test P is p*rho(1-P) + (1-p)*nu(P); the optimal projection is
// the range projection of the positive part of p*rho - (1-p)*nu.
HypothesisTestResult hypothesis_min_error(const DensityMatrix& rho, const DensityMatrix& nu,
                                          double p);
double hypothesis_error_of(const DensityMatrix& rho, const DensityMatrix& nu, double p,
                           const Matrix& projection);

// Chernoff distance -min_{alpha in [0,1]} S_alpha(rho|nu); PosInfinity when
// the states are mutually singular. Golden-section on the convex S_alpha.
ExtReal chernoff_distance(const DensityMatrix& rho, const DensityMatrix& nu,
                          double* argmin = nullptr);

// Value of the variational integral behind the Renyi entropy, evaluated at
// the optimal path A(t) = t * integral_0^inf e^{-s rho} nu e^{-s t nu} ds.
// Equals exp S_alpha(rho|nu) up to quadrature error.
double kosaki_value(const DensityMatrix& rho, const DensityMatrix& nu, double alpha,
                    const QuadratureSpec& quad = {});
// Same integral at a caller-supplied path (used to probe non-optimal choices).
double kosaki_value_at(const DensityMatrix& rho, const DensityMatrix& nu, double alpha,
                       const std::function<Matrix(double)>& path,
                       const QuadratureSpec& quad = {});

struct TraceInequalityGaps {
  double peierls_bogoliubov;  // log tr(e^A e^B)/tr e^B - tr(A e^B)/tr e^B
  double klein;               // tr(A log A - A log B) - tr(A - B); +inf if supports disagree
  double golden_thompson;     // log tr(e^A e^B) - log tr e^{A+B}
};

// Nonnegative gaps certifying the basic trace inequalities. Klein requires
// A, B >= 0 and is only zero (within tolerance) at A = B.
TraceInequalityGaps trace_inequality_gaps(const HermitianOperator& a, const HermitianOperator& b);

struct GibbsVariationalReport {
  double min_gap;           // over the random states
  double max_gap;
  double gap_at_maximizer;  // at rho = e^A / tr e^A
};

// log tr e^A - (rho(A) + S(rho)) >= 0 over sampled states, zero at the Gibbs
// state of A.
GibbsVariationalReport gibbs_variational_check(const HermitianOperator& a, int trials, Rng& rng);

// Hilbert-Schmidt random state (GG*/tr), wrapped as DensityMatrix.
DensityMatrix sample_density(Rng& rng, int dim);
DensityMatrix sample_faithful_density(Rng& rng, int dim);

}  // namespace entroflux

#endif
