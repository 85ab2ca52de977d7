#include "entroflux/modular.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <ostream>

namespace entroflux {

namespace {

bool loc_less(const RealVector& a, const RealVector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

}  // namespace

AtomicMeasure::AtomicMeasure(std::vector<Atom> atoms, double btol) : btol_(btol) {
  if (atoms.empty()) {
    atoms_ = std::move(atoms);
    return;
  }
  double scale = 1.0;
  for (const auto& a : atoms) scale = std::max(scale, a.location.cwiseAbs().maxCoeff());
  const double tol = btol * scale;

  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return loc_less(a.location, b.location); });

  // Windowed union-find clustering: the first coordinate is sorted, so any
  // mergeable pair sits within a tol-window of it, but later coordinates may
  // interleave arbitrarily and need the backward scan.
  const int n = static_cast<int>(atoms.size());
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  std::function<int(int)> find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i - 1; j >= 0; --j) {
      if (atoms[i].location[0] - atoms[j].location[0] > tol) break;
      if ((atoms[i].location - atoms[j].location).cwiseAbs().maxCoeff() <= tol)
        parent[find(i)] = find(j);
    }
  }
  // Cluster locations are |weight|-averaged, which stays inside the cluster
  // hull even when signed weights nearly cancel.
  std::vector<int> slot(n, -1);
  std::vector<Atom> merged;
  std::vector<double> abs_mass;
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(merged.size());
      merged.push_back({RealVector::Zero(atoms[i].location.size()), 0.0});
      abs_mass.push_back(0.0);
    }
    Atom& m = merged[slot[r]];
    const double aw = std::abs(atoms[i].weight);
    m.location += aw * atoms[i].location;
    m.weight += atoms[i].weight;
    abs_mass[slot[r]] += aw;
  }
  for (size_t k = 0; k < merged.size(); ++k)
    if (abs_mass[k] > 0.0) merged[k].location /= abs_mass[k];
  std::sort(merged.begin(), merged.end(),
            [](const Atom& a, const Atom& b) { return loc_less(a.location, b.location); });
  for (auto& a : merged)
    if (a.weight != 0.0) atoms_.push_back(std::move(a));
}

double AtomicMeasure::total_mass() const {
  double m = 0.0;
  for (const auto& a : atoms_) m += a.weight;
  return m;
}

double AtomicMeasure::mean() const {
  double m = 0.0;
  for (const auto& a : atoms_) m += a.weight * a.location[0];
  return m;
}

double AtomicMeasure::second_moment() const {
  double m = 0.0;
  for (const auto& a : atoms_) m += a.weight * a.location[0] * a.location[0];
  return m;
}

double AtomicMeasure::mass_at_least(double threshold) const {
  double m = 0.0;
  for (const auto& a : atoms_)
    if (a.location[0] >= threshold) m += a.weight;
  return m;
}

double AtomicMeasure::laplace(const RealVector& alpha_t) const {
  double m = 0.0;
  for (const auto& a : atoms_) m += a.weight * std::exp(-alpha_t.dot(a.location));
  return m;
}

AtomicMeasure AtomicMeasure::reflected() const {
  std::vector<Atom> out = atoms_;
  for (auto& a : out) a.location = -a.location;
  return AtomicMeasure(std::move(out), btol_);
}

AtomicMeasure AtomicMeasure::marginal(int component) const {
  std::vector<Atom> out;
  out.reserve(atoms_.size());
  for (const auto& a : atoms_) {
    RealVector loc(1);
    loc[0] = a.location[component];
    out.push_back({loc, a.weight});
  }
  return AtomicMeasure(std::move(out), btol_);
}

void AtomicMeasure::write_csv(std::ostream& os) const {
  const int m = location_dim();
  for (int c = 0; c < m; ++c) os << "loc_" << (c + 1) << ",";
  os << "weight\n";
  os.precision(17);
  for (const auto& a : atoms_) {
    for (int c = 0; c < m; ++c) os << a.location[c] << ",";
    os << a.weight << "\n";
  }
}

void AtomicMeasure::write_json(std::ostream& os) const {
  os.precision(17);
  os << "{\"btol\":" << btol_ << ",\"atoms\":[";
  bool first = true;
  for (const auto& a : atoms_) {
    if (!first) os << ",";
    first = false;
    os << "{\"loc\":[";
    for (Eigen::Index c = 0; c < a.location.size(); ++c) {
      if (c) os << ",";
      os << a.location[c];
    }
    os << "],\"weight\":" << a.weight << "}";
  }
  os << "]}";
}

double total_variation(const AtomicMeasure& a, const AtomicMeasure& b) {
  std::vector<AtomicMeasure::Atom> signed_atoms = a.atoms();
  for (auto atom : b.atoms()) {
    atom.weight = -atom.weight;
    signed_atoms.push_back(atom);
  }
  // Merging with signed weights leaves only the genuine discrepancies.
  AtomicMeasure net(std::move(signed_atoms),
                    std::max(a.binning_tolerance(), b.binning_tolerance()));
  double tv = 0.0;
  for (const auto& atom : net.atoms()) tv += std::abs(atom.weight);
  return 0.5 * tv;
}

RelativeModularSpectrum relative_modular_spectrum(const DensityMatrix& rho,
                                                  const DensityMatrix& nu) {
  if (rho.dim() != nu.dim()) throw DimensionMismatchError("states have different dimensions");
  const auto& dr = rho.op().spectral();
  const auto& dn = nu.op().spectral();
  const Matrix cross = dr.eigenvectors.adjoint() * dn.eigenvectors;
  const RealMatrix w = cross.cwiseAbs2();
  RelativeModularSpectrum out;
  for (Eigen::Index j = 0; j < dn.eigenvalues.size(); ++j) {
    const double b = dn.eigenvalues[j];
    if (b <= nu.kernel_cut()) continue;
    for (Eigen::Index i = 0; i < dr.eigenvalues.size(); ++i) {
      const double weight = b * w(i, j);
      if (weight == 0.0) continue;
      const double a = dr.eigenvalues[i];
      out.atoms.push_back({a > rho.kernel_cut() ? a / b : 0.0, weight});
    }
  }
  return out;
}

double RelativeModularSpectrum::total_weight() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.weight;
  return s;
}

ExtReal RelativeModularSpectrum::renyi(double alpha) const {
  double s = 0.0;
  for (const auto& a : atoms)
    if (a.ratio > 0.0) s += std::pow(a.ratio, alpha) * a.weight;
  if (s <= 0.0) return ExtReal::neg_infinity();
  return ExtReal(std::log(s));
}

AtomicMeasure modular_spectral_measure(const DensityMatrix& rho, const DensityMatrix& nu) {
  const auto spec = relative_modular_spectrum(rho, nu);
  std::vector<AtomicMeasure::Atom> atoms;
  atoms.reserve(spec.atoms.size());
  for (const auto& a : spec.atoms) {
    RealVector loc(1);
    loc[0] = a.ratio;
    atoms.push_back({loc, a.weight});
  }
  return AtomicMeasure(std::move(atoms));
}

AtomicMeasure fcs_spectral_measure(const QuantumDynamicalSystem& sys, double t) {
  if (!sys.omega().faithful())
    throw NonFaithfulDensityError("fcs_spectral_measure needs a faithful reference state");
  if (t == 0.0) {
    RealVector loc = RealVector::Zero(1);
    return AtomicMeasure({{loc, 1.0}});
  }
  const auto spec = relative_modular_spectrum(sys.omega_t_state(t), sys.omega());
  std::vector<AtomicMeasure::Atom> atoms;
  atoms.reserve(spec.atoms.size());
  const double scale = -1.0 / std::abs(t);
  for (const auto& a : spec.atoms) {
    RealVector loc(1);
    loc[0] = scale * std::log(a.ratio);
    atoms.push_back({loc, a.weight});
  }
  return AtomicMeasure(std::move(atoms));
}

JointDiagonalization simultaneous_diagonalize(const std::vector<Matrix>& ops, double ctol) {
  if (ops.empty()) throw DomainError("simultaneous_diagonalize: empty family");
  const int n = static_cast<int>(ops.front().rows());
  double scale = 1.0;
  for (const auto& a : ops) scale = std::max(scale, a.cwiseAbs().maxCoeff());
  double max_defect = 0.0;
  for (size_t i = 0; i < ops.size(); ++i)
    for (size_t j = i + 1; j < ops.size(); ++j)
      max_defect = std::max(max_defect, commutator_norm(ops[i], ops[j]));
  if (max_defect > ctol * scale * scale) throw NonCommutingFamilyError(max_defect);

  JointDiagonalization out;
  out.basis = Matrix::Identity(n, n);
  std::vector<std::pair<int, int>> blocks = {{0, n}};
  const double split_tol = 1e-7 * std::max(1.0, scale);
  for (const auto& op : ops) {
    std::vector<std::pair<int, int>> next_blocks;
    for (const auto& [start, len] : blocks) {
      if (len == 1) {
        next_blocks.emplace_back(start, 1);
        continue;
      }
      Matrix cols = out.basis.middleCols(start, len);
      HermitianOperator h(Matrix(cols.adjoint() * op * cols), 1e-6);
      const auto& dec = h.spectral();
      out.basis.middleCols(start, len) = cols * dec.eigenvectors;
      int run_start = 0;
      for (int i = 1; i <= len; ++i) {
        if (i == len || dec.eigenvalues[i] - dec.eigenvalues[i - 1] > split_tol) {
          next_blocks.emplace_back(start + run_start, i - run_start);
          run_start = i;
        }
      }
    }
    blocks = std::move(next_blocks);
  }
  out.values.resize(n, static_cast<int>(ops.size()));
  for (size_t k = 0; k < ops.size(); ++k) {
    Matrix diag = out.basis.adjoint() * ops[k] * out.basis;
    for (int i = 0; i < n; ++i) out.values(i, static_cast<int>(k)) = diag(i, i).real();
  }
  return out;
}

AtomicMeasure two_time_distribution(const DensityMatrix& omega, const HermitianOperator& h,
                                    double t, const std::vector<Matrix>& observables,
                                    double ctol) {
  const int m = static_cast<int>(observables.size());
  if (m == 0) throw DomainError("two_time_distribution: no observables");
  if (t == 0.0) {
    RealVector loc = RealVector::Zero(m);
    return AtomicMeasure({{loc, 1.0}});
  }
  const JointDiagonalization jd = simultaneous_diagonalize(observables, ctol);
  const int n = h.dim();

  // Pair weights tr(U omega P_i U* P_j) over the joint eigenbasis: two
  // matrix products, then an entrywise combination. Off-diagonal pieces
  // inside a degenerate joint eigenspace land on the same atom location and
  // merge back to the projection-level weight.
  const Matrix u = matfun_complex(h, [t](double x) { return std::exp(Complex(0, -t) * x); });
  const Matrix a = jd.basis.adjoint() * (u * omega.matrix()) * jd.basis;
  const Matrix c = jd.basis.adjoint() * u.adjoint() * jd.basis;

  std::vector<AtomicMeasure::Atom> atoms;
  atoms.reserve(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double w = (a(j, i) * c(i, j)).real();
      if (w == 0.0) continue;
      RealVector loc = (jd.values.row(j) - jd.values.row(i)).transpose() / t;
      atoms.push_back({loc, w});
    }
  }
  AtomicMeasure measure(std::move(atoms));
  // degenerate cross terms cancel on merge; what remains must be a
  // probability distribution
  std::vector<AtomicMeasure::Atom> cleaned;
  for (const auto& atom : measure.atoms()) {
    if (atom.weight < -1e-10) throw Error("two_time_distribution: negative weight survived");
    if (atom.weight > 0.0) cleaned.push_back(atom);
  }
  return AtomicMeasure(std::move(cleaned));
}

AtomicMeasure multi_fcs(const QuantumDynamicalSystem& sys, double t) {
  if (!sys.has_charges()) throw DomainError("multi_fcs needs a charge decomposition");
  const int n = sys.dim();
  const auto& charges = sys.charges();
  const int m = static_cast<int>(charges.size());
  if (t == 0.0) {
    RealVector loc = RealVector::Zero(m);
    return AtomicMeasure({{loc, 1.0}});
  }

  // The j-th relative modular logarithm acts on the matrix space as
  // X -> tau^{-t}(Q_j) X - X Q_j; vectorized column-major this is
  // I (x) tau^{-t}(Q_j) - Q_j^T (x) I.
  const Matrix id = Matrix::Identity(n, n);
  std::vector<Matrix> ks;
  ks.reserve(m);
  for (const auto& q : charges) {
    const Matrix q_back = sys.heisenberg(q, -t);
    ks.push_back(kron(id, q_back) - kron(q.transpose(), id));
  }
  const JointDiagonalization jd = simultaneous_diagonalize(ks, 10 * defaults::ctol);

  const Matrix sqrt_omega = sys.omega().power(0.5);
  Vector xi(n * n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) xi[c * n + r] = sqrt_omega(r, c);

  std::vector<AtomicMeasure::Atom> atoms;
  const double scale = -1.0 / std::abs(t);
  for (int i = 0; i < n * n; ++i) {
    const double w = std::norm(jd.basis.col(i).dot(xi));
    if (w == 0.0) continue;
    RealVector loc = scale * jd.values.row(i).transpose();
    atoms.push_back({loc, w});
  }
  return AtomicMeasure(std::move(atoms));
}

double araki_masuda_norm(const Matrix& xi, const DensityMatrix& omega, double p) {
  if (!(p >= 1.0)) throw BadExponentError("araki_masuda_norm requires p >= 1");
  if (!omega.faithful())
    throw NonFaithfulDensityError("araki_masuda_norm needs a faithful reference state");
  const double expo = std::isinf(p) ? -0.5 : 1.0 / p - 0.5;
  return schatten_norm(xi * omega.power(expo), p);
}

TransferCheck transfer_functional_check(const QuantumDynamicalSystem& sys, double t, double alpha,
                                        double p) {
  TransferCheck c{};
  c.lhs = e_pt(sys, t, alpha, p);
  // Closed form of the transfer-evolved reference vector.
  const DensityMatrix omega_t = sys.omega_t_state(t);
  const Matrix xi = omega_t.power(alpha / p) * sys.omega().power(0.5 - alpha / p);
  c.rhs = p * std::log(araki_masuda_norm(xi, sys.omega(), p));
  c.gap = std::abs(c.lhs - c.rhs);
  return c;
}

}  // namespace entroflux
