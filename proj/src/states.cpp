#include "entroflux/states.hpp"

#include <cmath>

namespace entroflux {

DensityMatrix::DensityMatrix(Matrix m, double trace_tol, double ktol)
    : op_(std::move(m)), support_rank_(0), faithful_(false), cut_(0.0) {
  const double tr = op_.matrix().trace().real();
  if (std::abs(tr - 1.0) > trace_tol * op_.dim())
    throw DomainError("DensityMatrix: trace differs from 1 by " + std::to_string(tr - 1.0));
  const auto& dec = op_.spectral();
  const double lmax = dec.eigenvalues.maxCoeff();
  if (lmax <= 0.0) throw DomainError("DensityMatrix: no positive spectrum");
  cut_ = ktol * lmax;
  RealVector clamped = dec.eigenvalues;
  for (Eigen::Index i = 0; i < clamped.size(); ++i) {
    if (clamped[i] < -cut_)
      throw DomainError("DensityMatrix: negative eigenvalue " + std::to_string(clamped[i]));
    if (clamped[i] < cut_) clamped[i] = 0.0;
  }
  clamped /= clamped.sum();
  op_ = HermitianOperator(dec.eigenvectors * clamped.asDiagonal() * dec.eigenvectors.adjoint(),
                          1e-10);
  const auto& final_dec = op_.spectral();
  for (Eigen::Index i = 0; i < final_dec.eigenvalues.size(); ++i)
    if (final_dec.eigenvalues[i] > cut_) ++support_rank_;
  faithful_ = (support_rank_ == dim());
}

Matrix DensityMatrix::on_support(const std::function<double(double)>& f) const {
  const auto& dec = op_.spectral();
  RealVector vals = RealVector::Zero(dec.eigenvalues.size());
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    if (dec.eigenvalues[i] > cut_) vals[i] = f(dec.eigenvalues[i]);
  return dec.eigenvectors * vals.asDiagonal() * dec.eigenvectors.adjoint();
}

Matrix DensityMatrix::log_on_support() const {
  return on_support([](double x) { return std::log(x); });
}

Matrix DensityMatrix::power(double x) const {
  return on_support([x](double l) { return std::pow(l, x); });
}

Matrix DensityMatrix::support_projection() const {
  return on_support([](double) { return 1.0; });
}

Matrix DensityMatrix::kernel_projection() const {
  return Matrix::Identity(dim(), dim()) - support_projection();
}

QuantumChannel::QuantumChannel(std::vector<Matrix> kraus, double tol) : kraus_(std::move(kraus)) {
  if (kraus_.empty()) throw DomainError("QuantumChannel: empty Kraus family");
  const auto n = kraus_.front().rows();
  Matrix sum_vv = Matrix::Zero(n, n), sum_vvT = Matrix::Zero(n, n);
  for (const auto& v : kraus_) {
    sum_vv += v.adjoint() * v;
    sum_vvT += v * v.adjoint();
  }
  const Matrix id = Matrix::Identity(n, n);
  trace_preserving_ = (sum_vv - id).cwiseAbs().maxCoeff() <= tol;
  unital_ = (sum_vvT - id).cwiseAbs().maxCoeff() <= tol;
}

Matrix QuantumChannel::apply(const Matrix& x) const {
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  for (const auto& v : kraus_) out += v * x * v.adjoint();
  return out;
}

Matrix QuantumChannel::apply_adjoint(const Matrix& x) const {
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  for (const auto& v : kraus_) out += v.adjoint() * x * v;
  return out;
}

double vn_entropy(const DensityMatrix& rho) {
  const auto& ev = rho.op().spectral().eigenvalues;
  double s = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev[i] > rho.kernel_cut()) s -= ev[i] * std::log(ev[i]);
  return s;
}

namespace {

struct SpectralOverlaps {
  RealVector rho_eigs, nu_eigs;
  RealMatrix overlap;  // |<u_i|v_j>|^2
};

SpectralOverlaps overlaps(const DensityMatrix& rho, const DensityMatrix& nu) {
  if (rho.dim() != nu.dim()) throw DimensionMismatchError("states have different dimensions");
  SpectralOverlaps o;
  const auto& dr = rho.op().spectral();
  const auto& dn = nu.op().spectral();
  o.rho_eigs = dr.eigenvalues;
  o.nu_eigs = dn.eigenvalues;
  Matrix cross = dr.eigenvectors.adjoint() * dn.eigenvectors;
  o.overlap = cross.cwiseAbs2();
  return o;
}

}  // namespace

ExtReal relative_entropy(const DensityMatrix& rho, const DensityMatrix& nu) {
  const auto o = overlaps(rho, nu);
  // Support condition: rho restricted to the kernel of nu must vanish.
  double leak = 0.0;
  for (Eigen::Index i = 0; i < o.rho_eigs.size(); ++i)
    for (Eigen::Index j = 0; j < o.nu_eigs.size(); ++j)
      if (o.rho_eigs[i] > rho.kernel_cut() && o.nu_eigs[j] <= nu.kernel_cut())
        leak += o.rho_eigs[i] * o.overlap(i, j);
  if (leak > rho.dim() * defaults::ktol) return ExtReal::neg_infinity();

  double s = 0.0;
  for (Eigen::Index i = 0; i < o.rho_eigs.size(); ++i) {
    const double l = o.rho_eigs[i];
    if (l <= rho.kernel_cut()) continue;
    for (Eigen::Index j = 0; j < o.nu_eigs.size(); ++j) {
      const double m = o.nu_eigs[j];
      if (m <= nu.kernel_cut()) continue;
      s += l * (std::log(m) - std::log(l)) * o.overlap(i, j);
    }
  }
  return ExtReal(s);
}

ExtReal renyi_relative_entropy(const DensityMatrix& rho, const DensityMatrix& nu, double alpha) {
  const auto o = overlaps(rho, nu);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < o.rho_eigs.size(); ++i) {
    const double l = o.rho_eigs[i];
    if (l <= rho.kernel_cut()) continue;
    for (Eigen::Index j = 0; j < o.nu_eigs.size(); ++j) {
      const double m = o.nu_eigs[j];
      if (m <= nu.kernel_cut()) continue;
      sum += std::pow(l, alpha) * std::pow(m, 1.0 - alpha) * o.overlap(i, j);
    }
  }
  if (sum <= 0.0) return ExtReal::neg_infinity();
  return ExtReal(std::log(sum));
}

HypothesisTestResult hypothesis_min_error(const DensityMatrix& rho, const DensityMatrix& nu,
                                          double p) {
  if (!(p > 0.0 && p < 1.0)) throw BadProbabilityError("prior must lie strictly in (0,1)");
  const Matrix diff = (1.0 - p) * nu.matrix() - p * rho.matrix();
  HermitianOperator a(diff, 1e-9);
  const auto& dec = a.spectral();
  const int n = a.dim();
  // The minimizer accepts rho exactly where p*rho dominates, i.e. on the
  // negative spectral subspace of (1-p)nu - p*rho.
  Matrix popt = Matrix::Zero(n, n);
  double trace_norm = 0.0;
  const double cut = 1e-14 * std::max(1.0, dec.eigenvalues.cwiseAbs().maxCoeff());
  for (int i = 0; i < n; ++i) {
    trace_norm += std::abs(dec.eigenvalues[i]);
    if (dec.eigenvalues[i] < -cut)
      popt += dec.eigenvectors.col(i) * dec.eigenvectors.col(i).adjoint();
  }
  return HypothesisTestResult{0.5 * (1.0 - trace_norm), popt};
}

double hypothesis_error_of(const DensityMatrix& rho, const DensityMatrix& nu, double p,
                           const Matrix& projection) {
  const int n = rho.dim();
  const Matrix id = Matrix::Identity(n, n);
  return p * rho.expectation(id - projection) + (1.0 - p) * nu.expectation(projection);
}

ExtReal chernoff_distance(const DensityMatrix& rho, const DensityMatrix& nu, double* argmin) {
  auto value = [&](double a) {
    ExtReal s = renyi_relative_entropy(rho, nu, a);
    return s;
  };
  if (value(0.5).is_neg_infinity()) return ExtReal::pos_infinity();
  auto f = [&](double a) { return value(a).value(); };

  // Golden-section minimum of the convex S_alpha on [0, 1].
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = 1.0;
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = f(d);
    }
  }
  double amin = 0.5 * (lo + hi);
  double best = f(amin);
  for (double a : {0.0, 1.0}) {
    const double v = f(a);
    if (v < best) {
      best = v;
      amin = a;
    }
  }
  if (argmin) *argmin = amin;
  return ExtReal(-best);
}

namespace {

// Matrix elements of the optimal Kosaki path in the mixed (rho, nu)
// eigenbasis: <u_i|A(t)|v_j> = t <u_i|nu|v_j> / (r_i + t n_j).
Matrix kosaki_optimal_path(const SpectralDecomposition& dr, const SpectralDecomposition& dn,
                           const Matrix& nu, double t) {
  const Matrix nu_mixed = dr.eigenvectors.adjoint() * nu * dn.eigenvectors;
  Matrix m(nu_mixed.rows(), nu_mixed.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double denom = dr.eigenvalues[i] + t * dn.eigenvalues[j];
      m(i, j) = denom > 0 ? t * nu_mixed(i, j) / denom : Complex(0.0, 0.0);
    }
  return dr.eigenvectors * m * dn.eigenvectors.adjoint();
}

double kosaki_integral(const DensityMatrix& rho, const DensityMatrix& nu, double alpha,
                       const std::function<Matrix(double)>& path, const QuadratureSpec& quad) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw BadExponentError("Kosaki integral needs alpha in (0,1)");
  const int n = rho.dim();
  const Matrix id = Matrix::Identity(n, n);
  auto g = [&](double t) {
    const Matrix a = path(t);
    const double rho_term = rho.expectation(a * a.adjoint()) / t;
    const Matrix one_minus = id - a;
    const double nu_term = nu.expectation(one_minus.adjoint() * one_minus);
    return rho_term + nu_term;
  };
  // Split at t = 1 and absorb the t^{alpha-1} weight into the variable on
  // each side; both integrands are then regular at the compact endpoints.
  auto head = [&](double u) { return g(std::pow(u, 1.0 / alpha)); };
  auto tail = [&](double v) {
    const double t = std::pow(v, -1.0 / (1.0 - alpha));
    return t * g(t);
  };
  const double val = gauss_adaptive(head, 0.0, 1.0, quad) / alpha +
                     gauss_adaptive(tail, 0.0, 1.0, quad) / (1.0 - alpha);
  return std::sin(M_PI * alpha) / M_PI * val;
}

}  // namespace

double kosaki_value(const DensityMatrix& rho, const DensityMatrix& nu, double alpha,
                    const QuadratureSpec& quad) {
  if (!rho.faithful() && !nu.faithful())
    throw NonFaithfulDensityError("kosaki_value: one of the states must be faithful");
  const auto& dr = rho.op().spectral();
  const auto& dn = nu.op().spectral();
  auto path = [&](double t) { return kosaki_optimal_path(dr, dn, nu.matrix(), t); };
  return kosaki_integral(rho, nu, alpha, path, quad);
}

double kosaki_value_at(const DensityMatrix& rho, const DensityMatrix& nu, double alpha,
                       const std::function<Matrix(double)>& path, const QuadratureSpec& quad) {
  return kosaki_integral(rho, nu, alpha, path, quad);
}

TraceInequalityGaps trace_inequality_gaps(const HermitianOperator& a, const HermitianOperator& b) {
  TraceInequalityGaps g{};
  const Matrix ea = hermitian_exp(a.matrix());
  const Matrix eb = hermitian_exp(b.matrix());
  const double tr_eb = eb.trace().real();
  g.peierls_bogoliubov =
      std::log((ea * eb).trace().real() / tr_eb) - (a.matrix() * eb).trace().real() / tr_eb;
  g.golden_thompson = std::log((ea * eb).trace().real()) - log_tr_exp(a.matrix() + b.matrix());

  // Klein needs positive operators; the kernel convention follows the
  // spectral sum with 0 log 0 = 0 and a +inf sentinel on support mismatch.
  const auto& da = a.spectral();
  const auto& db = b.spectral();
  const double cut_a = defaults::ktol * std::max(1.0, da.eigenvalues.cwiseAbs().maxCoeff());
  const double cut_b = defaults::ktol * std::max(1.0, db.eigenvalues.cwiseAbs().maxCoeff());
  if (da.eigenvalues.minCoeff() < -cut_a || db.eigenvalues.minCoeff() < -cut_b)
    throw DomainError("Klein gap requires positive operators");
  const Matrix cross = da.eigenvectors.adjoint() * db.eigenvectors;
  const RealMatrix w = cross.cwiseAbs2();
  double klein = 0.0;
  bool singular = false;
  for (Eigen::Index i = 0; i < da.eigenvalues.size(); ++i) {
    const double l = std::max(da.eigenvalues[i], 0.0);
    for (Eigen::Index j = 0; j < db.eigenvalues.size(); ++j) {
      const double m = std::max(db.eigenvalues[j], 0.0);
      if (w(i, j) < 1e-16) continue;
      if (m <= cut_b) {
        if (l > cut_a) singular = true;
        continue;
      }
      if (l > cut_a) klein += l * std::log(l / m) * w(i, j);
      klein -= (l - m) * w(i, j);
    }
  }
  g.klein = singular ? std::numeric_limits<double>::infinity() : klein;
  return g;
}

GibbsVariationalReport gibbs_variational_check(const HermitianOperator& a, int trials, Rng& rng) {
  const double log_z = log_tr_exp(a.matrix());
  auto gap_at = [&](const DensityMatrix& rho) {
    return log_z - rho.expectation(a.matrix()) - vn_entropy(rho);
  };
  GibbsVariationalReport rep;
  rep.min_gap = std::numeric_limits<double>::infinity();
  rep.max_gap = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < trials; ++k) {
    const double gap = gap_at(sample_density(rng, a.dim()));
    rep.min_gap = std::min(rep.min_gap, gap);
    rep.max_gap = std::max(rep.max_gap, gap);
  }
  Matrix gibbs = hermitian_exp(a.matrix() - log_z * Matrix::Identity(a.dim(), a.dim()));
  rep.gap_at_maximizer = gap_at(DensityMatrix(gibbs, 1e-9));
  return rep;
}

DensityMatrix sample_density(Rng& rng, int dim) { return DensityMatrix(rng.density(dim), 1e-9); }

DensityMatrix sample_faithful_density(Rng& rng, int dim) {
  return DensityMatrix(rng.faithful_density(dim), 1e-9);
}

}  // namespace entroflux
