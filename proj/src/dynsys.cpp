#include "entroflux/dynsys.hpp"

#include <cmath>

#include "entroflux/quadrature.hpp"

namespace entroflux {

QuantumDynamicalSystem::QuantumDynamicalSystem(HermitianOperator h, DensityMatrix omega,
                                               std::optional<TimeReversal> theta,
                                               std::vector<Matrix> charges, double tol)
    : h_(std::move(h)), omega_(std::move(omega)), theta_(std::move(theta)),
      charges_(std::move(charges)) {
  if (h_.dim() != omega_.dim())
    throw DimensionMismatchError("Hamiltonian and state dimensions differ");
  if (!omega_.faithful())
    throw NonFaithfulDensityError("QuantumDynamicalSystem needs a faithful reference state");
  const double hscale = std::max(1.0, h_.matrix().cwiseAbs().maxCoeff());
  if (theta_) {
    if ((theta_->apply(h_.matrix()) - h_.matrix()).cwiseAbs().maxCoeff() > tol * hscale)
      throw DomainError("time reversal does not fix the Hamiltonian");
    if ((theta_->apply(omega_.matrix()) - omega_.matrix()).cwiseAbs().maxCoeff() > tol)
      throw DomainError("time reversal does not fix the reference state");
  }
  if (!charges_.empty()) {
    double qscale = 1.0;
    for (const auto& q : charges_) qscale = std::max(qscale, q.cwiseAbs().maxCoeff());
    for (size_t i = 0; i < charges_.size(); ++i)
      for (size_t j = i + 1; j < charges_.size(); ++j) {
        const double d = commutator_norm(charges_[i], charges_[j]);
        if (d > tol * qscale * qscale) throw NonCommutingFamilyError(d);
      }
    Matrix sum = Matrix::Zero(dim(), dim());
    for (const auto& q : charges_) sum += q;
    if ((sum - log_omega()).cwiseAbs().maxCoeff() > 100 * tol * qscale)
      throw DomainError("charges do not reconstruct log omega");
  }
}

Matrix QuantumDynamicalSystem::omega_t(double t) const {
  return evolve(omega_.matrix(), h_, Complex(-t, 0.0));
}

DensityMatrix QuantumDynamicalSystem::omega_t_state(double t) const {
  return DensityMatrix(omega_t(t), 1e-9);
}

Matrix QuantumDynamicalSystem::heisenberg(const Matrix& a, Complex t) const {
  return evolve(a, h_, t);
}

Matrix entropy_production(const QuantumDynamicalSystem& sys) {
  const Complex i(0.0, 1.0);
  return i * commutator(sys.log_omega(), sys.hamiltonian().matrix());
}

Matrix relative_hamiltonian(const QuantumDynamicalSystem& sys, double t) {
  return sys.omega_t_state(t).log_on_support() - sys.log_omega();
}

double e_pt(const QuantumDynamicalSystem& sys, double t, double alpha, double p) {
  if (!(p >= 1.0)) throw BadExponentError("e_pt requires p >= 1");
  if (std::isinf(p)) {
    return log_tr_exp(sys.log_omega() + alpha * relative_hamiltonian(sys, t));
  }
  const DensityMatrix omega_t = sys.omega_t_state(t);
  const Matrix outer = sys.omega().power((1.0 - alpha) / p);
  const Matrix inner = omega_t.power(2.0 * alpha / p);
  HermitianOperator core(outer * inner * outer, 1e-8);
  const RealVector& ev = core.spectral().eigenvalues;
  // log tr(core^{p/2}) with the eigenvalue scale factored out
  const double m = ev.maxCoeff();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev[i] > 0) acc += std::pow(ev[i] / m, p / 2.0);
  return 0.5 * p * std::log(m) + std::log(acc);
}

EptDerivatives e_pt_derivatives(const QuantumDynamicalSystem& sys, double t, double p, double h) {
  auto f = [&](double a) { return e_pt(sys, t, a, p); };
  auto deriv5 = [&](double x) {
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
  };
  EptDerivatives d{};
  d.d_alpha_at_0 = deriv5(0.0);
  d.d_alpha_at_1 = deriv5(1.0);
  d.d2_alpha_at_0 =
      (-f(2 * h) + 16 * f(h) - 30 * f(0.0) + 16 * f(-h) - f(-2 * h)) / (12 * h * h);

  const Matrix ell = relative_hamiltonian(sys, t);
  const DensityMatrix omega_t = sys.omega_t_state(t);
  d.ref_at_0 = sys.omega().expectation(ell);
  d.ref_at_1 = omega_t.expectation(ell);
  const double mean = d.ref_at_0;
  if (std::isinf(p)) {
    d.ref_d2 = kubo_mari(sys.omega(), ell, ell).real() - mean * mean;
  } else {
    d.ref_d2 = sys.omega().expectation(ell * ell) - mean * mean;
  }
  return d;
}

double e_pt_multi(const QuantumDynamicalSystem& sys, double t, const RealVector& alpha, double p) {
  if (!sys.has_charges()) throw DomainError("e_pt_multi needs a charge decomposition");
  const auto& charges = sys.charges();
  if (alpha.size() != static_cast<Eigen::Index>(charges.size()))
    throw DimensionMismatchError("alpha size does not match the number of charges");
  if (!(p >= 1.0)) throw BadExponentError("e_pt_multi requires p >= 1");
  const int n = sys.dim();

  auto weighted = [&](const RealVector& coef) {
    Matrix sum = Matrix::Zero(n, n);
    for (Eigen::Index j = 0; j < coef.size(); ++j) sum += coef[j] * charges[j];
    return sum;
  };

  if (std::isinf(p)) {
    Matrix exponent = sys.log_omega();
    for (Eigen::Index j = 0; j < alpha.size(); ++j) {
      const Matrix ell_j = sys.heisenberg(charges[j], -t) - charges[j];
      exponent += alpha[j] * ell_j;
    }
    return log_tr_exp(exponent);
  }

  const RealVector ones = RealVector::Ones(alpha.size());
  const Matrix outer = hermitian_exp(weighted((ones - alpha) / p));
  const Matrix inner0 = hermitian_exp(weighted(2.0 * alpha / p));
  const Matrix inner = sys.heisenberg(inner0, -t);
  HermitianOperator core(outer * inner * outer, 1e-8);
  const RealVector& ev = core.spectral().eigenvalues;
  const double m = ev.maxCoeff();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev[i] > 0) acc += std::pow(ev[i] / m, p / 2.0);
  return 0.5 * p * std::log(m) + std::log(acc);
}

Complex kubo_mari(const DensityMatrix& rho, const Matrix& a, const Matrix& b) {
  if (!rho.faithful()) throw NonFaithfulDensityError("kubo_mari needs a faithful state");
  const auto& dec = rho.op().spectral();
  const Matrix at = dec.eigenvectors.adjoint() * a * dec.eigenvectors;
  const Matrix bt = dec.eigenvectors.adjoint() * b * dec.eigenvectors;
  const RealVector& pr = dec.eigenvalues;
  Complex acc = 0.0;
  for (Eigen::Index j = 0; j < pr.size(); ++j) {
    for (Eigen::Index k = 0; k < pr.size(); ++k) {
      const double lj = std::log(pr[j]), lk = std::log(pr[k]);
      double dd;
      if (std::abs(lk - lj) < 1e-10)
        dd = 0.5 * (pr[j] + pr[k]);  // analytic coincidence limit
      else
        dd = (pr[k] - pr[j]) / (lk - lj);
      acc += std::conj(at(k, j)) * bt(k, j) * dd;
    }
  }
  return acc;
}

Matrix interaction_propagator(const HermitianOperator& h, const HermitianOperator& v, Complex z) {
  HermitianOperator hv(h.matrix() + v.matrix());
  const Complex i(0.0, 1.0);
  const Matrix left = matfun_complex(hv, [&](double x) { return std::exp(i * z * x); });
  const Matrix right = matfun_complex(h, [&](double x) { return std::exp(-i * z * x); });
  return left * right;
}

namespace {

Matrix flux_time_integral(const QuantumDynamicalSystem& sys, const Matrix& combined, double t,
                          double atol) {
  auto integrand = [&](double s) { return sys.heisenberg(combined, Complex(-s, 0.0)); };
  return simpson_adaptive_matrix(integrand, 0.0, t, atol);
}

}  // namespace

double e_gen(const ControlledFamily& family, double t, const RealVector& x, const RealVector& y,
             double quad_atol) {
  const ForcedSystem fs = family(x);
  if (y.size() != static_cast<Eigen::Index>(fs.fluxes.size()) || x.size() != y.size())
    throw DimensionMismatchError("e_gen: force and flux dimensions differ");
  const int n = fs.sys.dim();

  // Flux relation check: sigma_X = sum_j X_j Phi_j.
  const Matrix sigma = entropy_production(fs.sys);
  Matrix decomposed = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < x.size(); ++j) decomposed += x[j] * fs.fluxes[j];
  double fscale = std::max(1.0, decomposed.cwiseAbs().maxCoeff());
  for (const auto& flux : fs.fluxes) fscale = std::max(fscale, flux.cwiseAbs().maxCoeff());
  if ((sigma - decomposed).cwiseAbs().maxCoeff() > 1e-10 * fscale)
    throw DomainError("flux relation violated for this family");

  Matrix combined = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < y.size(); ++j) combined += y[j] * fs.fluxes[j];
  const Matrix integral = flux_time_integral(fs.sys, combined, t, quad_atol);
  return log_tr_exp(fs.sys.log_omega() + integral);
}

namespace {

RealVector averaged_fluxes(const ForcedSystem& fs, double t) {
  const int m = static_cast<int>(fs.fluxes.size());
  RealVector out(m);
  for (int j = 0; j < m; ++j) {
    auto integrand = [&](double s) {
      return fs.sys.omega().expectation(fs.sys.heisenberg(fs.fluxes[j], Complex(s, 0.0)));
    };
    out[j] = simpson_adaptive(integrand, 0.0, t) / t;
  }
  return out;
}

RealMatrix transport_derivative(const ControlledFamily& family, double t, int m, double h) {
  RealMatrix l(m, m);
  for (int k = 0; k < m; ++k) {
    RealVector xp = RealVector::Zero(m), xm = RealVector::Zero(m);
    RealVector xp2 = RealVector::Zero(m), xm2 = RealVector::Zero(m);
    xp[k] = h;
    xm[k] = -h;
    xp2[k] = 2 * h;
    xm2[k] = -2 * h;
    const RealVector fp = averaged_fluxes(family(xp), t);
    const RealVector fm = averaged_fluxes(family(xm), t);
    const RealVector fp2 = averaged_fluxes(family(xp2), t);
    const RealVector fm2 = averaged_fluxes(family(xm2), t);
    l.col(k) = (-fp2 + 8 * fp - 8 * fm + fm2) / (12 * h);
  }
  return l;
}

}  // namespace

TransportReport finite_time_transport(const ControlledFamily& family, double t, double fd_step) {
  const ForcedSystem probe = family(RealVector::Zero(0));
  const int m = static_cast<int>(probe.fluxes.size());
  const ForcedSystem base = family(RealVector::Zero(m));

  TransportReport rep;
  rep.derivative_path = transport_derivative(family, t, m, fd_step);
  // Step-halving consistency guard.
  const RealMatrix refined = transport_derivative(family, t, m, fd_step / 2);
  const double scale = std::max(1.0, rep.derivative_path.cwiseAbs().maxCoeff());
  if ((rep.derivative_path - refined).cwiseAbs().maxCoeff() > 1e-3 * scale)
    throw StepSelectionFailureError("flux derivatives not stable under step halving");
  rep.derivative_path = refined;

  rep.green_kubo_path.resize(m, m);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) {
      auto integrand = [&](double s) {
        const Matrix phi_js = base.sys.heisenberg(base.fluxes[j], Complex(s, 0.0));
        return kubo_mari(base.sys.omega(), base.fluxes[k], phi_js).real() *
               (1.0 - std::abs(s) / t);
      };
      rep.green_kubo_path(j, k) = 0.5 * simpson_adaptive(integrand, -t, t, 1e-10);
    }

  rep.max_difference = (rep.derivative_path - rep.green_kubo_path).cwiseAbs().maxCoeff();
  rep.max_asymmetry =
      (rep.derivative_path - rep.derivative_path.transpose()).cwiseAbs().maxCoeff();
  return rep;
}

namespace {

double log_partition(const Matrix& exponent) { return log_tr_exp(exponent); }

}  // namespace

OpenSystem build_open_system(const OpenSystemSpec& spec) {
  const int nres = static_cast<int>(spec.reservoirs.size());
  if (static_cast<int>(spec.couplings.size()) != nres)
    throw DimensionMismatchError("one coupling per reservoir expected");
  std::vector<int> dims;
  dims.push_back(spec.h_sample.dim());
  for (const auto& r : spec.reservoirs) {
    if (commutator_norm(r.h.matrix(), r.n.matrix()) > 1e-10)
      throw GaugeViolationError("reservoir charge is not conserved");
    dims.push_back(r.h.dim());
  }
  int total = 1;
  for (int d : dims) total *= d;

  Matrix h_total = tensor_embed({{spec.h_sample.matrix(), 0}}, dims);
  Matrix omega = spec.omega_sample.matrix();
  std::vector<Matrix> charges;
  charges.push_back(tensor_embed({{spec.omega_sample.log_on_support(), 0}}, dims));
  std::vector<Matrix> h_res, n_res;
  std::vector<double> betas, mus;

  for (int j = 0; j < nres; ++j) {
    const auto& r = spec.reservoirs[j];
    const Matrix hj = tensor_embed({{r.h.matrix(), j + 1}}, dims);
    const Matrix nj = tensor_embed({{r.n.matrix(), j + 1}}, dims);
    h_res.push_back(hj);
    n_res.push_back(nj);
    betas.push_back(r.beta);
    mus.push_back(r.mu);
    h_total += hj;

    const Matrix local = -r.beta * (r.h.matrix() - r.mu * r.n.matrix());
    const double log_z = log_partition(local);
    omega = kron(omega, hermitian_exp(local - log_z * Matrix::Identity(r.h.dim(), r.h.dim())));
    charges.push_back(-r.beta * (hj - r.mu * nj) - log_z * Matrix::Identity(total, total));

    // Gauge invariance of the coupling.
    const Matrix pair_n = kron(spec.n_sample.matrix(), Matrix::Identity(r.n.dim(), r.n.dim())) +
                          kron(Matrix::Identity(spec.n_sample.dim(), spec.n_sample.dim()),
                               r.n.matrix());
    if (commutator_norm(pair_n, spec.couplings[j]) > 1e-10)
      throw GaugeViolationError("coupling is not gauge invariant");
    h_total += spec.lambda * tensor_embed_pair(spec.couplings[j], 0, j + 1, dims);
  }

  HermitianOperator h(h_total, 1e-9);
  DensityMatrix state(omega, 1e-9);

  // Attach plain conjugation as time reversal when everything is real.
  std::optional<TimeReversal> theta;
  if (h_total.imag().cwiseAbs().maxCoeff() < 1e-12 &&
      omega.imag().cwiseAbs().maxCoeff() < 1e-12)
    theta = TimeReversal();

  OpenSystem open{QuantumDynamicalSystem(h, state, theta, charges),
                  dims, h_res, n_res, {}, {}, -charges.front(), betas, mus};
  const Complex i(0.0, 1.0);
  for (int j = 0; j < nres; ++j) {
    open.energy_fluxes.push_back(-i * commutator(h_total, open.h_res[j]));
    open.charge_fluxes.push_back(-i * commutator(h_total, open.n_res[j]));
  }
  return open;
}

ControlledFamily open_system_family(const OpenSystemSpec& spec, double beta_eq, double mu_eq,
                                    bool charge_sector) {
  // Copy by value: the family owns its data.
  return [spec, beta_eq, mu_eq, charge_sector](const RealVector& x) -> ForcedSystem {
    OpenSystem base = build_open_system(spec);
    const int nres = static_cast<int>(spec.reservoirs.size());
    const int total = base.sys.dim();
    Matrix n_total = tensor_embed({{spec.n_sample.matrix(), 0}}, base.dims);
    for (int j = 0; j < nres; ++j) n_total += base.n_res[j];

    Matrix exponent =
        -beta_eq * (base.sys.hamiltonian().matrix() - mu_eq * n_total);
    for (int j = 0; j < nres; ++j) {
      if (j < x.size()) exponent += x[j] * base.h_res[j];
      if (charge_sector && nres + j < x.size()) exponent += x[nres + j] * base.n_res[j];
    }
    const double log_z = log_partition(exponent);
    DensityMatrix omega_x(
        hermitian_exp(exponent - log_z * Matrix::Identity(total, total)), 1e-9);

    std::optional<TimeReversal> theta;
    if (base.sys.hamiltonian().matrix().imag().cwiseAbs().maxCoeff() < 1e-12 &&
        omega_x.matrix().imag().cwiseAbs().maxCoeff() < 1e-12)
      theta = TimeReversal();

    ForcedSystem fs{QuantumDynamicalSystem(base.sys.hamiltonian(), omega_x, theta), {}};
    for (int j = 0; j < nres; ++j) fs.fluxes.push_back(base.energy_fluxes[j]);
    if (charge_sector)
      for (int j = 0; j < nres; ++j) fs.fluxes.push_back(base.charge_fluxes[j]);
    return fs;
  };
}

}  // namespace entroflux
