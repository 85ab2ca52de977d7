#include "entroflux/quasifree.hpp"

#include <bit>
#include <cmath>

#include <nlohmann/json.hpp>

namespace entroflux {

namespace {

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

// log det(1 + P) for Hermitian positive semidefinite P: softplus over the
// logarithms of the eigenvalues, overflow-safe.
double log_det_one_plus_positive(const Matrix& p_hermitian) {
  HermitianOperator h(p_hermitian, 1e-8);
  const RealVector& ev = h.spectral().eigenvalues;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] <= 0.0) continue;  // clipped rounding noise adds log(1) = 0
    acc += softplus(std::log(ev[i]));
  }
  return acc;
}

// log det(1 + X) for Hermitian X with spectrum above -1.
double log_det_one_plus_hermitian(const Matrix& x_hermitian) {
  HermitianOperator h(x_hermitian, 1e-8);
  const RealVector& ev = h.spectral().eigenvalues;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] <= -1.0) throw DomainError("log det(1 + X): spectrum reaches -1");
    acc += std::log1p(ev[i]);
  }
  return acc;
}

}  // namespace

FockSpace::FockSpace(int d) : d_(d), dim_(1 << d) {
  if (d < 1 || d > 10) throw DimensionTooLargeError("FockSpace supports 1 <= d <= 10");
  create_.reserve(d_);
  for (int i = 0; i < d_; ++i) {
    Matrix a = Matrix::Zero(dim_, dim_);
    for (int s = 0; s < dim_; ++s) {
      if (s & (1 << i)) continue;
      // Parity of the occupied orbitals below i fixes the fermionic sign.
      const int below = s & ((1 << i) - 1);
      const double sign = (std::popcount(static_cast<unsigned>(below)) % 2) ? -1.0 : 1.0;
      a(s | (1 << i), s) = sign;
    }
    create_.push_back(std::move(a));
  }
}

Matrix FockSpace::creation_of(const Vector& psi) const {
  Matrix out = Matrix::Zero(dim_, dim_);
  for (int i = 0; i < d_; ++i) out += psi[i] * create_[i];
  return out;
}

Matrix FockSpace::annihilation_of(const Vector& psi) const {
  return creation_of(psi).adjoint();
}

Matrix FockSpace::d_gamma(const Matrix& a) const {
  Matrix out = Matrix::Zero(dim_, dim_);
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j)
      if (a(i, j) != Complex(0.0, 0.0)) out += a(i, j) * create_[i] * create_[j].adjoint();
  return out;
}

namespace {

void set_bits(int mask, std::vector<int>& out) {
  out.clear();
  for (int b = 0; mask >> b; ++b)
    if (mask & (1 << b)) out.push_back(b);
}

}  // namespace

Matrix FockSpace::gamma(const Matrix& a) const {
  Matrix out = Matrix::Zero(dim_, dim_);
  std::vector<int> rows, cols;
  for (int sc = 0; sc < dim_; ++sc) {
    set_bits(sc, cols);
    const int n = static_cast<int>(cols.size());
    for (int sr = 0; sr < dim_; ++sr) {
      if (std::popcount(static_cast<unsigned>(sr)) != n) continue;
      set_bits(sr, rows);
      if (n == 0) {
        out(sr, sc) = 1.0;
        continue;
      }
      Matrix minor(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) minor(i, j) = a(rows[i], cols[j]);
      out(sr, sc) = minor.determinant();
    }
  }
  return out;
}

Matrix FockSpace::quasifree_density(const Matrix& t) const {
  HermitianOperator th(t, 1e-9);
  const RealVector& ev = th.spectral().eigenvalues;
  if (ev.minCoeff() <= 0.0 || ev.maxCoeff() >= 1.0)
    throw NonFaithfulDensityError("quasifree_density needs 0 < T < 1");
  const Matrix k = matfun(th, [](double x) { return std::log(x / (1.0 - x)); }).matrix();
  Matrix rho = hermitian_exp(d_gamma(k));
  return rho / rho.trace().real();
}

Complex quasifree_expectation(const Matrix& t, const std::vector<Vector>& create_phis,
                              const std::vector<Vector>& annihilate_psis) {
  if (create_phis.size() != annihilate_psis.size()) return Complex(0.0, 0.0);
  const int n = static_cast<int>(create_phis.size());
  if (n == 0) return Complex(1.0, 0.0);
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = annihilate_psis[i].dot(t * create_phis[j]);
  return m.determinant();
}

double qf_relative_entropy(const Matrix& t1, const Matrix& t2) {
  HermitianOperator h1(t1, 1e-9), h2(t2, 1e-9);
  auto log_of = [](const HermitianOperator& h) {
    return matfun(h, OperatorFunction([](double x) { return std::log(x); }, "log",
                                      OperatorFunction::Policy::Error, 1e-300))
        .matrix();
  };
  const int n = static_cast<int>(t1.rows());
  const Matrix id = Matrix::Identity(n, n);
  HermitianOperator c1(id - t1, 1e-9), c2(id - t2, 1e-9);
  const Matrix term1 = t1 * (log_of(h2) - log_of(h1));
  const Matrix term2 = (id - t1) * (log_of(c2) - log_of(c1));
  return (term1 + term2).trace().real();
}

QfRelativeHamiltonian qf_relative_hamiltonian(const Matrix& t1, const Matrix& t) {
  HermitianOperator h1(t1, 1e-9), h(t, 1e-9);
  auto check_faithful = [](const HermitianOperator& x) {
    const RealVector& ev = x.spectral().eigenvalues;
    if (ev.minCoeff() <= 0.0 || ev.maxCoeff() >= 1.0)
      throw NonFaithfulDensityError("qf_relative_hamiltonian needs 0 < T < 1");
  };
  check_faithful(h1);
  check_faithful(h);
  auto k_of = [](const HermitianOperator& x) {
    return matfun(x, [](double l) { return std::log(l / (1.0 - l)); }).matrix();
  };
  auto log_det_one_minus = [](const HermitianOperator& x) {
    const RealVector& ev = x.spectral().eigenvalues;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) acc += std::log1p(-ev[i]);
    return acc;
  };
  QfRelativeHamiltonian out;
  out.scalar = log_det_one_minus(h1) - log_det_one_minus(h);
  out.one_particle = k_of(h1) - k_of(h);
  return out;
}

Matrix OnePartModel::k0() const {
  HermitianOperator t(t0, 1e-9);
  const RealVector& ev = t.spectral().eigenvalues;
  if (ev.minCoeff() <= 0.0 || ev.maxCoeff() >= 1.0)
    throw NonFaithfulDensityError("model density must satisfy 0 < T < 1");
  return matfun(t, [](double l) { return std::log(l / (1.0 - l)); }).matrix();
}

Matrix OnePartModel::kt(double t) const {
  return evolve(k0(), HermitianOperator(h, 1e-9), Complex(-t, 0.0));
}

Matrix OnePartModel::evolve_density(double t) const {
  return evolve(t0, HermitianOperator(h, 1e-9), Complex(-t, 0.0));
}

Matrix OnePartModel::charge_k(const RealVector& alpha) const {
  const int n = static_cast<int>(leads.size());
  if (alpha.size() != 1 + 2 * n)
    throw DimensionMismatchError("charge exponent needs (a_S, a_1..a_n, a_{n+1}..a_{2n})");
  const Matrix base = k0();
  Matrix out = Matrix::Zero(dim(), dim());
  out.topLeftCorner(sample_dim, sample_dim) =
      alpha[0] * base.topLeftCorner(sample_dim, sample_dim);
  for (int j = 0; j < n; ++j) {
    const auto& l = leads[j];
    out.block(l.offset, l.offset, l.size, l.size) =
        -alpha[1 + j] * l.beta * h0.block(l.offset, l.offset, l.size, l.size) +
        alpha[1 + n + j] * l.beta * l.mu * Matrix::Identity(l.size, l.size);
  }
  return out;
}

RealVector OnePartModel::diagonal_alpha(double a) const {
  return a * RealVector::Ones(1 + 2 * static_cast<Eigen::Index>(leads.size()));
}

Matrix OnePartModel::lead_projection(int j) const {
  const auto& l = leads[j];
  Matrix p = Matrix::Zero(dim(), dim());
  p.block(l.offset, l.offset, l.size, l.size) = Matrix::Identity(l.size, l.size);
  return p;
}

Matrix OnePartModel::lead_hamiltonian(int j) const {
  const auto& l = leads[j];
  Matrix p = Matrix::Zero(dim(), dim());
  p.block(l.offset, l.offset, l.size, l.size) = h0.block(l.offset, l.offset, l.size, l.size);
  return p;
}

Matrix OnePartModel::energy_flux(int j) const {
  const Complex i(0.0, 1.0);
  return -i * commutator(h, lead_hamiltonian(j));
}

Matrix OnePartModel::charge_flux(int j) const {
  const Complex i(0.0, 1.0);
  return -i * commutator(h, lead_projection(j));
}

double qf_e_pt(const OnePartModel& model, double t, double alpha, double p) {
  if (!(p >= 1.0)) throw BadExponentError("qf_e_pt requires p >= 1");
  const Matrix k_0 = model.k0();
  const Matrix k_t = model.kt(t);
  const double denom = log_det_one_plus_exp(k_0);
  if (std::isinf(p))
    return log_det_one_plus_exp((1.0 - alpha) * k_0 + alpha * k_t) - denom;

  const Matrix outer = hermitian_exp(k_0 * ((1.0 - alpha) / p));
  const Matrix inner = hermitian_exp(k_t * (2.0 * alpha / p));
  HermitianOperator core(outer * inner * outer, 1e-8);
  const RealVector& ev = core.spectral().eigenvalues;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] <= 0.0) throw DomainError("qf_e_pt: nonpositive core eigenvalue");
    acc += softplus(0.5 * p * std::log(ev[i]));
  }
  return acc - denom;
}

double qf_e2_multi(const OnePartModel& model, double t, const RealVector& alpha) {
  const Matrix k_0 = model.k0();
  const Matrix ka = model.charge_k(alpha);
  const Matrix kat = evolve(ka, HermitianOperator(model.h, 1e-9), Complex(-t, 0.0));
  // [k0, k(alpha)] = 0 blockwise, so the determinant Hermitianizes as
  // e^{(k0-ka)/2} e^{ka_t} e^{(k0-ka)/2}.
  const Matrix half = hermitian_exp(0.5 * (k_0 - ka));
  return log_det_one_plus_positive(half * hermitian_exp(kat) * half) -
         log_det_one_plus_exp(k_0);
}

double qf_naive(const OnePartModel& model, double t, const RealVector& alpha) {
  const Matrix ka = model.charge_k(alpha);
  const Matrix ka_back = evolve(ka, HermitianOperator(model.h, 1e-9), Complex(t, 0.0));
  const Matrix e_diff = hermitian_exp(ka_back - ka);
  HermitianOperator t0h(model.t0, 1e-9);
  const Matrix root = matfun(t0h, [](double x) { return std::sqrt(x); }).matrix();
  // 1 + T0 (E - 1) is similar to 1 + (T0^{1/2} E T0^{1/2} - T0), Hermitian
  // with spectrum above -1.
  const Matrix sym = root * e_diff * root - model.t0;
  return log_det_one_plus_hermitian(sym);
}

OnePartModel ebb_build(const Matrix& h_sample, const Matrix& t_sample,
                       const std::vector<LeadBuildSpec>& leads, double lambda) {
  const int ds = static_cast<int>(h_sample.rows());
  int total = ds;
  for (const auto& l : leads) {
    if (l.sites < 1) throw DimensionMismatchError("lead needs at least one site");
    total += l.sites;
  }
  OnePartModel m;
  m.sample_dim = ds;
  m.h0 = Matrix::Zero(total, total);
  m.t0 = Matrix::Zero(total, total);
  m.h0.topLeftCorner(ds, ds) = h_sample;
  m.t0.topLeftCorner(ds, ds) = t_sample;

  int offset = ds;
  for (const auto& l : leads) {
    Matrix hj = Matrix::Identity(l.sites, l.sites);
    for (int x = 0; x + 1 < l.sites; ++x) hj(x, x + 1) = hj(x + 1, x) = -0.5;
    m.h0.block(offset, offset, l.sites, l.sites) = hj;
    const Matrix fermi =
        matfun(HermitianOperator(hj),
               [&](double e) { return 1.0 / (1.0 + std::exp(l.beta * (e - l.mu))); })
            .matrix();
    m.t0.block(offset, offset, l.sites, l.sites) = fermi;
    m.leads.push_back({offset, l.sites, l.beta, l.mu});
    offset += l.sites;
  }

  m.h = m.h0;
  offset = ds;
  for (const auto& l : leads) {
    // contact: |chi><delta_0| + h.c. at the lead's first site
    for (int i = 0; i < ds; ++i) {
      m.h(i, offset) += lambda * l.chi[i];
      m.h(offset, i) += lambda * std::conj(l.chi[i]);
    }
    offset += l.sites;
  }
  return m;
}

OnePartModel ebb_chain(int l, int m, double beta_l, double beta_r, double mu_l, double mu_r,
                       double beta_sample) {
  const int ds = 2 * l + 1;
  Matrix hs = Matrix::Identity(ds, ds);
  for (int x = 0; x + 1 < ds; ++x) hs(x, x + 1) = hs(x + 1, x) = -0.5;
  const Matrix ts =
      matfun(HermitianOperator(hs),
             [&](double e) { return 1.0 / (1.0 + std::exp(beta_sample * e)); })
          .matrix();
  Vector chi_l = Vector::Zero(ds), chi_r = Vector::Zero(ds);
  chi_l[0] = 1.0;
  chi_r[ds - 1] = 1.0;
  const int sites = m - l;
  return ebb_build(hs, ts,
                   {{sites, beta_l, mu_l, chi_l}, {sites, beta_r, mu_r, chi_r}}, -0.5);
}

double qf_flux_expectation(const OnePartModel& model, const Matrix& flux, double t) {
  return (model.evolve_density(t) * flux).trace().real();
}

FluxAverager::FluxAverager(const OnePartModel& model, const Matrix& flux) {
  HermitianOperator h(model.h, 1e-9);
  const auto& dec = h.spectral();
  const Matrix t0e = dec.eigenvectors.adjoint() * model.t0 * dec.eigenvectors;
  const Matrix fe = dec.eigenvectors.adjoint() * flux * dec.eigenvectors;
  weights_ = t0e.cwiseProduct(fe.transpose());
  freq_ = dec.eigenvalues;
}

double FluxAverager::at(double t) const {
  // tr(e^{-ith} T0 e^{ith} F) = sum_ab e^{-it(d_a - d_b)} T0'_ab F'_ba
  Complex acc = 0.0;
  const Eigen::Index n = freq_.size();
  Vector phase(n);
  for (Eigen::Index a = 0; a < n; ++a) phase[a] = std::exp(Complex(0.0, -t * freq_[a]));
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      acc += phase[a] * std::conj(phase[b]) * weights_(a, b);
  return acc.real();
}

double FluxAverager::time_average(double t, int nodes) const {
  // midpoint rule; the integrand is an almost-periodic trigonometric sum
  double acc = 0.0;
  for (int i = 0; i < nodes; ++i) acc += at((i + 0.5) * t / nodes);
  return acc / nodes;
}

namespace {

Matrix lead_exponent(const std::vector<LeadSpec>& leads, double xi) {
  const int n = static_cast<int>(leads.size());
  const double eps = 1.0 - std::cos(xi);
  Matrix k = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) k(j, j) = -leads[j].beta * (eps - leads[j].mu);
  return k;
}

void check_unitarity(const Matrix& s, double tol) {
  const int n = static_cast<int>(s.rows());
  const double defect = (s.adjoint() * s - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (defect > tol) throw DomainError("scattering matrix is not unitary at a node");
}

// integral of f(xi) sin(xi) dxi / (2 pi) over (0, pi)
double scattering_integral(const std::function<double(double)>& f, const QuadratureSpec& quad) {
  return gauss_adaptive([&](double xi) { return f(xi) * std::sin(xi) / (2.0 * M_PI); }, 0.0,
                        M_PI, quad);
}

}  // namespace

double ebb_eplus(const std::vector<LeadSpec>& leads, const ScatteringData& sc, double alpha,
                 double p, const QuadratureSpec& quad) {
  if (!(p >= 1.0)) throw BadExponentError("ebb_eplus requires p >= 1");
  auto value_at = [&](double xi) {
    const Matrix k = lead_exponent(leads, xi);
    const Matrix s = sc.s(xi);
    check_unitarity(s, sc.unitarity_tol);
    double numer;
    if (std::isinf(p)) {
      numer = log_det_one_plus_exp((1.0 - alpha) * k + alpha * s * k * s.adjoint());
    } else {
      const Matrix outer = hermitian_exp(k * ((1.0 - alpha) / p));
      const Matrix inner = s * hermitian_exp(k * (2.0 * alpha / p)) * s.adjoint();
      HermitianOperator core(outer * inner * outer, 1e-8);
      const RealVector& ev = core.spectral().eigenvalues;
      numer = 0.0;
      for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev[i] <= 0.0) throw DomainError("ebb_eplus: nonpositive core eigenvalue");
        numer += softplus(0.5 * p * std::log(ev[i]));
      }
    }
    return numer - log_det_one_plus_exp(k);
  };
  return scattering_integral(value_at, quad);
}

double ebb_e2plus_multi(const std::vector<LeadSpec>& leads, const ScatteringData& sc,
                        const RealVector& alpha, const QuadratureSpec& quad) {
  const int n = static_cast<int>(leads.size());
  if (alpha.size() != 2 * n)
    throw DimensionMismatchError("ebb_e2plus_multi needs (a_1..a_n, a_{n+1}..a_{2n})");
  auto value_at = [&](double xi) {
    const Matrix k = lead_exponent(leads, xi);
    const double eps = 1.0 - std::cos(xi);
    Matrix ka = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j)
      ka(j, j) = -leads[j].beta * (alpha[j] * eps - alpha[n + j] * leads[j].mu);
    const Matrix s = sc.s(xi);
    check_unitarity(s, sc.unitarity_tol);
    const Matrix half = hermitian_exp(0.5 * (k - ka));
    const Matrix core = half * s * hermitian_exp(ka) * s.adjoint() * half;
    return log_det_one_plus_positive(core) - log_det_one_plus_exp(k);
  };
  return scattering_integral(value_at, quad);
}

double ebb_two_lead_closed(double beta_l, double beta_r, double mu_l, double mu_r, double alpha,
                           double p, const QuadratureSpec& quad) {
  if (!(p >= 1.0)) throw BadExponentError("ebb_two_lead_closed requires p >= 1");
  auto integrand = [&](double eps) {
    const double delta = beta_r * (eps - mu_r) - beta_l * (eps - mu_l);
    const double arg =
        1.0 - std::sinh(0.5 * alpha * delta) * std::sinh(0.5 * (1.0 - alpha) * delta) /
                  (std::cosh(0.5 * beta_l * (eps - mu_l)) *
                   std::cosh(0.5 * beta_r * (eps - mu_r)));
    if (arg <= 0.0) throw DomainError("ebb_two_lead_closed: alpha outside the finite domain");
    return std::log(arg);
  };
  return gauss_adaptive(integrand, 0.0, 2.0, quad) / (2.0 * M_PI);
}

LbFluxes landauer_buttiker(const std::vector<LeadSpec>& leads, const ScatteringData& sc,
                           const QuadratureSpec& quad) {
  const int n = static_cast<int>(leads.size());
  auto fermi = [&](int j, double eps) {
    return 1.0 / (1.0 + std::exp(leads[j].beta * (eps - leads[j].mu)));
  };
  LbFluxes out;
  for (int j = 0; j < n; ++j) {
    auto flux = [&](double xi, bool with_energy) {
      const double eps = 1.0 - std::cos(xi);
      const Matrix s = sc.s(xi);
      check_unitarity(s, sc.unitarity_tol);
      double acc = 0.0;
      for (int k = 0; k < n; ++k) {
        const Complex skj = s(j, k) - (j == k ? 1.0 : 0.0);
        acc += std::norm(skj) * (fermi(j, eps) - fermi(k, eps));
      }
      return acc * (with_energy ? eps : 1.0);
    };
    out.energy.push_back(scattering_integral([&](double xi) { return flux(xi, true); }, quad));
    out.charge.push_back(scattering_integral([&](double xi) { return flux(xi, false); }, quad));
  }
  out.entropy_production = 0.0;
  for (int j = 0; j < n; ++j)
    out.entropy_production -= leads[j].beta * (out.energy[j] - leads[j].mu * out.charge[j]);
  return out;
}

double levitov_lesovik_rate(const std::vector<LeadSpec>& leads, const ScatteringData& sc,
                            const RealVector& nu, const QuadratureSpec& quad) {
  const int n = static_cast<int>(leads.size());
  if (nu.size() != n) throw DimensionMismatchError("one counting field per lead expected");
  auto value_at = [&](double xi) {
    const Matrix k = lead_exponent(leads, xi);
    const Matrix t =
        matfun(HermitianOperator(k), [](double x) { return 1.0 / (1.0 + std::exp(-x)); })
            .matrix();
    const Matrix s = sc.s(xi);
    check_unitarity(s, sc.unitarity_tol);
    Matrix s_nu = s;
    for (int j = 0; j < n; ++j)
      for (int kk = 0; kk < n; ++kk) s_nu(j, kk) *= std::exp(nu[kk] - nu[j]);
    const Matrix d = Matrix::Identity(n, n) + t * (s.adjoint() * s_nu - Matrix::Identity(n, n));
    const Complex det = d.determinant();
    if (det.real() <= 0.0 || std::abs(det.imag()) > 1e-9 * std::abs(det))
      throw DomainError("levitov_lesovik_rate: determinant left the positive axis");
    return std::log(det.real());
  };
  return scattering_integral(value_at, quad);
}

ScatteringData swap_scattering(int half_width, int sign) {
  ScatteringData sc;
  sc.n = 2;
  sc.s = [half_width, sign](double xi) {
    Matrix s = Matrix::Zero(2, 2);
    const Complex phase = std::exp(Complex(0.0, sign * 2.0 * half_width * xi));
    s(0, 1) = phase;
    s(1, 0) = phase;
    return s;
  };
  return sc;
}

Matrix xy_one_particle(int size, double coupling, double field) {
  Matrix h = Matrix::Zero(size, size);
  for (int x = 0; x + 1 < size; ++x) h(x, x + 1) = h(x + 1, x) = coupling / 2.0;
  h -= field * Matrix::Identity(size, size);
  return h;
}

OnePartModel xy_map(int size, double coupling, double field, double beta) {
  OnePartModel m;
  m.sample_dim = size;
  m.h = xy_one_particle(size, coupling, field);
  m.h0 = m.h;
  m.t0 = matfun(HermitianOperator(m.h),
                [&](double e) { return 1.0 / (1.0 + std::exp(beta * e)); })
             .matrix();
  return m;
}

OnePartModel xy_open_chain(int n, int m, double beta_l, double beta_sample, double beta_r,
                           double coupling, double field) {
  if (!(m > n && n >= 0)) throw DimensionMismatchError("xy_open_chain needs m > n >= 0");
  const int total = 2 * m + 1;
  const int ds = 2 * n + 1;
  const int lead_sites = m - n;
  OnePartModel model;
  model.sample_dim = ds;
  Matrix h_line = xy_one_particle(total, coupling, field);

  // reorder [-m, m] as (sample, left lead, right lead) blocks
  std::vector<int> perm;
  for (int x = -n; x <= n; ++x) perm.push_back(x + m);
  for (int x = -n - 1; x >= -m; --x) perm.push_back(x + m);
  for (int x = n + 1; x <= m; ++x) perm.push_back(x + m);
  Matrix p = Matrix::Zero(total, total);
  for (int i = 0; i < total; ++i) p(i, perm[i]) = 1.0;
  model.h = p * h_line * p.adjoint();

  model.h0 = model.h;
  // Dirichlet decoupling of the contacts
  model.h0(0, ds) = model.h0(ds, 0) = 0.0;
  model.h0(ds - 1, ds + lead_sites) = model.h0(ds + lead_sites, ds - 1) = 0.0;
  model.leads.push_back({ds, lead_sites, beta_l, 0.0});
  model.leads.push_back({ds + lead_sites, lead_sites, beta_r, 0.0});

  auto fermi = [](const Matrix& h, double beta) {
    return matfun(HermitianOperator(h),
                  [&](double e) { return 1.0 / (1.0 + std::exp(beta * e)); })
        .matrix();
  };
  model.t0 = Matrix::Zero(total, total);
  model.t0.topLeftCorner(ds, ds) = fermi(model.h0.topLeftCorner(ds, ds), beta_sample);
  model.t0.block(ds, ds, lead_sites, lead_sites) =
      fermi(model.h0.block(ds, ds, lead_sites, lead_sites), beta_l);
  model.t0.block(ds + lead_sites, ds + lead_sites, lead_sites, lead_sites) =
      fermi(model.h0.block(ds + lead_sites, ds + lead_sites, lead_sites, lead_sites), beta_r);
  return model;
}

namespace {

Matrix pauli_at(int which, int site, int size) {
  Matrix s(2, 2);
  switch (which) {
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, Complex(0, -1), Complex(0, 1), 0; break;
    default: s << 1, 0, 0, -1; break;
  }
  Matrix out = Matrix::Identity(1, 1);
  for (int x = 0; x < size; ++x) out = kron(out, x == site ? s : Matrix::Identity(2, 2));
  return out;
}

}  // namespace

Matrix xy_spin_hamiltonian(int size, double coupling, double field) {
  if (size > 10) throw DimensionTooLargeError("spin oracle supports size <= 10");
  const int dim = 1 << size;
  Matrix h = Matrix::Zero(dim, dim);
  for (int x = 0; x + 1 < size; ++x) {
    h -= 0.25 * coupling * (pauli_at(1, x, size) * pauli_at(1, x + 1, size) +
                            pauli_at(2, x, size) * pauli_at(2, x + 1, size));
  }
  for (int x = 0; x < size; ++x) h -= 0.5 * field * pauli_at(3, x, size);
  return h;
}

double xy_magnetization(int size, double beta, double coupling, double field) {
  double acc = 0.0;
  for (int k = 1; k <= size; ++k) {
    const double xi = k * M_PI / (size + 1);
    acc += std::tanh(0.5 * beta * (field - coupling * std::cos(xi)));
  }
  return acc / size;
}

double xy_magnetization_spin_oracle(int size, double beta, double coupling, double field) {
  const Matrix h = xy_spin_hamiltonian(size, coupling, field);
  Matrix rho = hermitian_exp(-beta * h);
  rho /= rho.trace().real();
  double acc = 0.0;
  for (int x = 0; x < size; ++x) acc += (rho * pauli_at(3, x, size)).trace().real();
  return acc / size;
}

double xy_magnetization_td(double beta, double coupling, double field,
                           const QuadratureSpec& quad) {
  auto integrand = [&](double xi) {
    return 1.0 / (std::cosh(0.5 * beta * field) +
                  std::cosh(beta * (coupling * std::cos(xi) - 0.5 * field)));
  };
  return 2.0 * std::sinh(0.5 * beta * field) / M_PI * gauss_adaptive(integrand, 0.0, M_PI, quad);
}

double xy_eplus(double beta_l, double beta_r, double coupling, double field, double alpha,
                double p, const QuadratureSpec& quad) {
  if (!(p >= 1.0)) throw BadExponentError("xy_eplus requires p >= 1");
  if (coupling == 0.0) throw DomainError("xy_eplus needs a nonzero coupling");
  const double dbeta = beta_r - beta_l;
  auto integrand = [&](double u) {
    const double arg =
        1.0 - std::sinh(alpha * u * dbeta) * std::sinh((1.0 - alpha) * u * dbeta) /
                  (std::cosh(u * beta_l) * std::cosh(u * beta_r));
    if (arg <= 0.0) throw DomainError("xy_eplus: alpha outside the finite domain");
    return std::log(arg);
  };
  const double u_minus = 0.5 * (field - coupling);
  const double u_plus = 0.5 * (field + coupling);
  return gauss_adaptive(integrand, u_minus, u_plus, quad) / (coupling * M_PI);
}

double xy_eplus_scattering(double beta_l, double beta_r, double coupling, double field,
                           double alpha, double p, int half_width, const QuadratureSpec& quad) {
  if (!(p >= 1.0)) throw BadExponentError("xy_eplus_scattering requires p >= 1");
  const ScatteringData sc = swap_scattering(half_width, coupling > 0 ? -1 : +1);
  auto value_at = [&](double xi) {
    // lead exponent for the chain dispersion J cos(xi) - field
    const double disp = coupling * std::cos(xi) - field;
    Matrix k = Matrix::Zero(2, 2);
    k(0, 0) = -beta_l * disp;
    k(1, 1) = -beta_r * disp;
    const Matrix s = sc.s(xi);
    double numer;
    if (std::isinf(p)) {
      numer = log_det_one_plus_exp((1.0 - alpha) * k + alpha * s * k * s.adjoint());
    } else {
      const Matrix outer = hermitian_exp(k * ((1.0 - alpha) / p));
      const Matrix inner = s * hermitian_exp(k * (2.0 * alpha / p)) * s.adjoint();
      HermitianOperator core(outer * inner * outer, 1e-8);
      const RealVector& ev = core.spectral().eigenvalues;
      numer = 0.0;
      for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev[i] <= 0.0) throw DomainError("xy_eplus_scattering: domain exit");
        numer += softplus(0.5 * p * std::log(ev[i]));
      }
    }
    return numer - log_det_one_plus_exp(k);
  };
  // the measure (J/2) sin(xi) dxi matches du under u = (field - J cos xi)/2
  return gauss_adaptive(
             [&](double xi) { return value_at(xi) * std::sin(xi) / (2.0 * M_PI); }, 0.0, M_PI,
             quad);
}

double xy_eplus_gen(double beta, double x_l, double x_r, double y_l, double y_r, double coupling,
                    double field, const QuadratureSpec& quad) {
  if (coupling == 0.0) throw DomainError("xy_eplus_gen needs a nonzero coupling");
  const double dx = x_r - x_l;
  const double dy = y_r - y_l;
  auto integrand = [&](double u) {
    const double arg = 1.0 - std::sinh(u * dy) * std::sinh(u * (dx - dy)) /
                                 (std::cosh(u * (beta - x_l)) * std::cosh(u * (beta - x_r)));
    if (arg <= 0.0) throw DomainError("xy_eplus_gen: forces outside the finite domain");
    return std::log(arg);
  };
  const double u_minus = 0.5 * (field - coupling);
  const double u_plus = 0.5 * (field + coupling);
  return gauss_adaptive(integrand, u_minus, u_plus, quad) / (coupling * M_PI);
}

double xy_steady_current(double beta_l, double beta_r, double coupling, double field,
                         const QuadratureSpec& quad) {
  if (coupling == 0.0) throw DomainError("xy_steady_current needs a nonzero coupling");
  // Orientation fixed by -d/dY_L of the generalized pressure: the flux out
  // of the left part is positive when the left part is hotter.
  auto integrand = [&](double u) {
    return u * (std::tanh(beta_r * u) - std::tanh(beta_l * u));
  };
  const double u_minus = 0.5 * (field - coupling);
  const double u_plus = 0.5 * (field + coupling);
  return gauss_adaptive(integrand, u_minus, u_plus, quad) / (coupling * M_PI);
}

OnePartModel load_model_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  const std::string type = doc.value("type", "ebb");
  if (type == "xy") {
    const double coupling = doc.at("J").get<double>();
    const double field = doc.at("field").get<double>();
    if (doc.contains("leads")) {
      const auto& leads = doc.at("leads");
      if (leads.size() != 2) throw DomainError("xy model expects two leads");
      const int m = leads[0].value("M", 60);
      const int n = doc.value("sample_half_width", 0);
      return xy_open_chain(n, m, leads[0].at("beta").get<double>(),
                           doc.value("beta_sample", 1.0), leads[1].at("beta").get<double>(),
                           coupling, field);
    }
    return xy_map(doc.value("sites", 8), coupling, field, doc.value("beta", 1.0));
  }
  if (type != "ebb") throw DomainError("unknown model type '" + type + "'");

  const auto& sample = doc.at("sample");
  const auto& hs_rows = sample.at("h");
  const int ds = static_cast<int>(hs_rows.size());
  Matrix hs = Matrix::Zero(ds, ds);
  for (int i = 0; i < ds; ++i)
    for (int j = 0; j < ds; ++j) hs(i, j) = hs_rows[i][j].get<double>();
  Matrix ts;
  if (sample.contains("beta")) {
    const double beta_s = sample.at("beta").get<double>();
    ts = matfun(HermitianOperator(hs),
                [&](double e) { return 1.0 / (1.0 + std::exp(beta_s * e)); })
             .matrix();
  } else {
    ts = 0.5 * Matrix::Identity(ds, ds);
  }
  std::vector<LeadBuildSpec> leads;
  int contact = 0;
  for (const auto& l : doc.at("leads")) {
    Vector chi = Vector::Zero(ds);
    const int site = l.value("contact", contact++);
    if (site < 0 || site >= ds) throw DomainError("lead contact site out of range");
    chi[site] = 1.0;
    leads.push_back({l.value("M", 30), l.at("beta").get<double>(), l.value("mu", 0.0), chi});
  }
  return ebb_build(hs, ts, leads, doc.value("lambda", 1.0));
}

}  // namespace entroflux
