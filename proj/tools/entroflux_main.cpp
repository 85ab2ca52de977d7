// Command-line front end: reproduces the library's model curves as CSV,
// runs the verification suite, and writes a manifest next to every output.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "entroflux/classical.hpp"
#include "entroflux/dynsys.hpp"
#include "entroflux/ldp.hpp"
#include "entroflux/modular.hpp"
#include "entroflux/quasifree.hpp"

namespace ef = entroflux;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

int thread_cap() {
  const char* env = std::getenv("ENTROFLUX_THREADS");
  int cap = static_cast<int>(std::thread::hardware_concurrency());
  if (env) {
    const int v = std::atoi(env);
    if (v > 0) cap = v;
  }
  return std::max(1, cap);
}

// Deterministic parallel map: results land by index, reduction order fixed.
template <class F>
void parallel_for(int n, F&& body) {
  const int workers = std::min(thread_cap(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  for (auto& th : pool) th.join();
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class RunManifest {
 public:
  RunManifest(std::string command, json parameters)
      : start_(std::chrono::steady_clock::now()) {
    doc_["command"] = std::move(command);
    doc_["parameters"] = std::move(parameters);
    doc_["library_version"] = kVersion;
  }

  void write_output(const std::string& path, const std::string& bytes) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ef::Error("cannot open output file " + path);
    os << bytes;
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a(bytes)));
    doc_["outputs"].push_back({{"path", path}, {"fnv1a64", hex}});
  }

  void finalize(const std::string& out_path) {
    const auto elapsed = std::chrono::steady_clock::now() - start_;
    doc_["wall_time_s"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count() / 1000.0;
    std::ofstream os(out_path + ".manifest.json");
    os << doc_.dump(2) << "\n";
  }

  json& doc() { return doc_; }

 private:
  json doc_;
  std::chrono::steady_clock::time_point start_;
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  if (out.empty()) throw CLI::ValidationError("expected a comma-separated list of numbers");
  return out;
}

// -- built-in quantum toy for the fcs command ---------------------------

ef::QuantumDynamicalSystem qubit_toy(unsigned seed) {
  ef::Rng rng(seed);
  ef::RealMatrix h = rng.real_symmetric(2);
  std::vector<int> dims = {2, 2, 2};
  ef::Matrix sz(2, 2), sx(2, 2);
  sz << 1, 0, 0, -1;
  sx << 0, 1, 1, 0;
  ef::Matrix full = ef::tensor_embed({{h.cast<ef::Complex>(), 0}}, dims) +
                    ef::tensor_embed({{sz, 1}}, dims) + 0.8 * ef::tensor_embed({{sz, 2}}, dims) +
                    0.4 * ef::tensor_embed({{sx, 0}, {sx, 1}}, dims) +
                    0.3 * ef::tensor_embed({{sx, 0}, {sx, 2}}, dims);
  auto gibbs = [&](double beta, const ef::Matrix& hh) {
    ef::Matrix w = ef::hermitian_exp(-beta * hh);
    return ef::Matrix(w / w.trace().real());
  };
  ef::Matrix omega = ef::kron(gibbs(1.0, h.cast<ef::Complex>()), ef::kron(gibbs(0.6, sz), gibbs(1.5, 0.8 * sz)));
  return ef::QuantumDynamicalSystem(ef::HermitianOperator(full),
                                    ef::DensityMatrix(omega, 1e-9), ef::TimeReversal());
}

// -- subcommand bodies ---------------------------------------------------

int run_chain_sigma(int n, int m, double beta_l, double beta_r, double t_max, double dt,
                    const std::string& out) {
  json params = {{"n", n},       {"m", m},       {"beta_l", beta_l},
                 {"beta_r", beta_r}, {"t_max", t_max}, {"dt", dt}};
  RunManifest manifest("chain-sigma", params);

  ef::ChainConfig cfg;
  cfg.n = n;
  cfg.m = m;
  cfg.beta = 1.0;
  cfg.beta_l = beta_l;
  cfg.beta_r = beta_r;
  auto ops = ef::chain_build(cfg);
  ef::MeanEntropyProduction ep(ops);
  const double steady = ef::chain_steady(beta_l, beta_r).entropy_production;

  const int count = static_cast<int>(t_max / dt) + 1;
  std::vector<double> values(count);
  parallel_for(count, [&](int i) { values[i] = i == 0 ? 0.0 : ep.at(i * dt); });

  std::ostringstream csv;
  csv << "time,mean_ep,steady_ref\n";
  for (int i = 0; i < count; ++i)
    csv << fmt(i * dt) << "," << fmt(values[i]) << "," << fmt(steady) << "\n";
  manifest.write_output(out, csv.str());
  manifest.finalize(out);
  return 0;
}

int run_chain_eofalpha(int n, int m, double beta_l, double beta_r,
                       const std::vector<double>& ts, const std::vector<double>& alphas,
                       const std::string& out) {
  json params = {{"n", n},           {"m", m},          {"beta_l", beta_l},
                 {"beta_r", beta_r}, {"t_list", ts},    {"alpha_grid", alphas}};
  RunManifest manifest("chain-eofalpha", params);

  ef::ChainConfig cfg;
  cfg.n = n;
  cfg.m = m;
  cfg.beta = 1.0;
  cfg.beta_l = beta_l;
  cfg.beta_r = beta_r;
  auto ops = ef::chain_build(cfg);

  std::vector<std::vector<ef::ExtReal>> curves(ts.size());
  parallel_for(static_cast<int>(ts.size()),
               [&](int i) { curves[i] = ef::chain_et_diagonal(ops, ts[i], alphas); });

  std::ostringstream csv;
  csv << "alpha";
  for (double t : ts) csv << ",e_t_over_t_" << fmt(t);
  csv << ",e_closed\n";
  for (size_t a = 0; a < alphas.size(); ++a) {
    csv << fmt(alphas[a]);
    for (size_t i = 0; i < ts.size(); ++i)
      csv << "," << fmt(curves[i][a].as_double() / ts[i]);
    csv << "," << fmt(ef::chain_e_closed(1.0 / beta_l, 1.0 / beta_r, alphas[a]).as_double());
    csv << "\n";
  }
  manifest.write_output(out, csv.str());
  manifest.finalize(out);
  return 0;
}

int run_chain_rate(double beta, double x_l, double x_r, double theta_max, int points,
                   const std::string& out) {
  json params = {{"beta", beta}, {"x_l", x_l}, {"x_r", x_r},
                 {"theta_max", theta_max}, {"points", points}};
  RunManifest manifest("chain-rate", params);

  const double flux_eq = ef::chain_steady(beta - x_l, beta - x_r).flux;
  std::ostringstream csv;
  csv << "s,rate,equilibrium_rate,steady_flux_ref\n";
  for (int i = 0; i < points; ++i) {
    const double theta = -theta_max + 2.0 * theta_max * i / (points - 1);
    const auto pt = ef::chain_rate(beta, x_l, x_r, theta);
    const auto eq = ef::chain_rate(beta, 0.0, 0.0, theta);
    csv << fmt(pt.s_l) << "," << fmt(pt.rate) << "," << fmt(eq.rate) << "," << fmt(flux_eq)
        << "\n";
  }
  manifest.write_output(out, csv.str());
  manifest.finalize(out);
  return 0;
}

int run_ebb_e2plus(double beta_l, double beta_r, double mu_l, double mu_r, int half_width,
                   const std::vector<double>& alphas, const std::string& out) {
  json params = {{"beta_l", beta_l},   {"beta_r", beta_r}, {"mu_l", mu_l},
                 {"mu_r", mu_r},       {"l", half_width},  {"alpha_grid", alphas}};
  RunManifest manifest("ebb-e2plus", params);

  std::vector<ef::LeadSpec> leads = {{beta_l, mu_l}, {beta_r, mu_r}};
  auto sc = ef::swap_scattering(half_width);
  std::vector<double> values(alphas.size());
  std::vector<int> domain(alphas.size(), 1);
  parallel_for(static_cast<int>(alphas.size()), [&](int i) {
    try {
      values[i] = ef::ebb_e2plus(leads, sc, alphas[i]);
    } catch (const ef::DomainError&) {
      domain[i] = 0;
      values[i] = std::numeric_limits<double>::infinity();
    }
  });

  std::ostringstream csv;
  csv << "alpha,value,in_domain\n";
  for (size_t i = 0; i < alphas.size(); ++i)
    csv << fmt(alphas[i]) << "," << fmt(values[i]) << "," << domain[i] << "\n";
  manifest.write_output(out, csv.str());
  manifest.finalize(out);
  return 0;
}

int run_xy_eplus(double beta_l, double beta_r, double coupling, double field,
                 const std::vector<double>& alphas, const std::string& out) {
  json params = {{"beta_l", beta_l}, {"beta_r", beta_r}, {"J", coupling},
                 {"field", field},   {"alpha_grid", alphas}};
  RunManifest manifest("xy-eplus", params);

  std::vector<double> values(alphas.size());
  std::vector<int> domain(alphas.size(), 1);
  parallel_for(static_cast<int>(alphas.size()), [&](int i) {
    try {
      values[i] = ef::xy_eplus(beta_l, beta_r, coupling, field, alphas[i], 2.0);
    } catch (const ef::DomainError&) {
      domain[i] = 0;
      values[i] = std::numeric_limits<double>::infinity();
    }
  });

  std::ostringstream csv;
  csv << "alpha,value,in_domain\n";
  for (size_t i = 0; i < alphas.size(); ++i)
    csv << fmt(alphas[i]) << "," << fmt(values[i]) << "," << domain[i] << "\n";
  manifest.write_output(out, csv.str());
  manifest.finalize(out);
  return 0;
}

int run_fcs(const std::string& model, const std::string& model_file, double t, unsigned seed,
            const std::string& out) {
  json params = {{"model", model}, {"model_file", model_file}, {"t", t}, {"seed", seed}};
  RunManifest manifest("fcs", params);

  auto from_one_particle = [&](const ef::OnePartModel& m) {
    if (m.dim() > 10)
      throw CLI::ValidationError("fcs needs a one-particle dimension of at most 10");
    ef::FockSpace fock(m.dim());
    ef::QuantumDynamicalSystem sys(ef::HermitianOperator(fock.d_gamma(m.h)),
                                   ef::DensityMatrix(fock.quasifree_density(m.t0), 1e-9));
    return ef::fcs_spectral_measure(sys, t);
  };

  ef::AtomicMeasure measure({});
  if (!model_file.empty()) {
    std::ifstream is(model_file);
    if (!is) throw CLI::ValidationError("cannot read model file " + model_file);
    std::stringstream buf;
    buf << is.rdbuf();
    measure = from_one_particle(ef::load_model_json(buf.str()));
  } else if (model == "qubit-toy") {
    measure = ef::fcs_spectral_measure(qubit_toy(seed), t);
  } else if (model == "ebb2") {
    // one-site sample between two short leads, Fock-space statistics
    ef::Matrix hs(1, 1), ts(1, 1);
    hs << 0.3;
    ts << 0.5;
    ef::Vector chi(1);
    chi << 1.0;
    measure = from_one_particle(
        ef::ebb_build(hs, ts, {{2, 0.8, 0.1, chi}, {2, 1.4, -0.1, chi}}, 0.6));
  } else if (model == "xy") {
    measure = from_one_particle(ef::xy_open_chain(0, 3, 0.6, 1.0, 1.3, 0.9, 1.2));
  } else {
    throw CLI::ValidationError("unknown model '" + model +
                               "' (use qubit-toy, ebb2, xy, or --model-file)");
  }

  std::ostringstream csv;
  measure.write_csv(csv);
  manifest.write_output(out, csv.str());
  manifest.finalize(out);
  return 0;
}

struct CheckResult {
  std::string name;
  bool pass;
  double detail;
};

int run_qsys_verify(unsigned seed, const std::string& out) {
  json params = {{"seed", seed}};
  RunManifest manifest("qsys-verify", params);
  std::vector<CheckResult> results;

  auto tri_system = [&](ef::Rng& rng, int dim) {
    ef::RealMatrix h = rng.real_symmetric(dim);
    ef::RealMatrix w = rng.real_density(dim);
    return ef::QuantumDynamicalSystem(ef::HermitianOperator(h.cast<ef::Complex>()),
                                      ef::DensityMatrix(w.cast<ef::Complex>(), 1e-9),
                                      ef::TimeReversal());
  };

  {
    // finite-time fluctuation symmetry across p and t
    ef::Rng rng(seed);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      auto sys = tri_system(rng, 2 + (k % 5));
      for (double p : {1.0, 2.0, 4.0, std::numeric_limits<double>::infinity()})
        for (double t : {0.5, 2.0})
          for (double a : {0.2, 0.4})
            worst = std::max(worst, std::abs(ef::e_pt(sys, t, a, p) -
                                             ef::e_pt(sys, t, 1.0 - a, p)));
    }
    results.push_back({"fluctuation_symmetry", worst <= 1e-10, worst});
  }
  {
    // measurement statistics match the backward modular measure
    ef::Rng rng(seed + 1);
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
      auto sys = tri_system(rng, 2 + k);
      for (double t : {0.7, 2.5}) {
        auto p = ef::two_time_distribution(sys.omega(), sys.hamiltonian(), t,
                                           {ef::Matrix(-sys.log_omega())});
        worst = std::max(worst, ef::total_variation(p, ef::fcs_spectral_measure(sys, -t)));
      }
    }
    results.push_back({"measurement_statistics", worst <= 1e-10, worst});
  }
  {
    // transfer-group expression of the pressure
    ef::Rng rng(seed + 2);
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
      ef::QuantumDynamicalSystem sys(ef::HermitianOperator(rng.hermitian(3 + (k % 3))),
                                     ef::sample_faithful_density(rng, 3 + (k % 3)));
      for (double p : {2.0, 4.0})
        worst = std::max(worst, ef::transfer_functional_check(sys, 1.0, 0.35, p).gap);
    }
    results.push_back({"transfer_identity", worst <= 1e-9, worst});
  }
  {
    // trace inequalities
    ef::Rng rng(seed + 3);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      ef::HermitianOperator a(rng.hermitian(4) + 4.0 * ef::Matrix::Identity(4, 4));
      ef::HermitianOperator b(rng.hermitian(4) + 4.0 * ef::Matrix::Identity(4, 4));
      auto gaps = ef::trace_inequality_gaps(a, b);
      worst = std::min({gaps.peierls_bogoliubov, gaps.klein, gaps.golden_thompson});
      if (worst < -1e-11) break;
    }
    results.push_back({"trace_inequalities", worst >= -1e-11, worst});
  }
  {
    // optimal discrimination beats random tests
    ef::Rng rng(seed + 4);
    double margin = 0.0;
    bool pass = true;
    for (int k = 0; k < 5; ++k) {
      auto rho = ef::sample_density(rng, 4);
      auto nu = ef::sample_density(rng, 4);
      auto opt = ef::hypothesis_min_error(rho, nu, 0.4);
      for (int j = 0; j < 100; ++j) {
        const ef::Matrix proj = rng.projection(4, 1 + (j % 3));
        const double diff = ef::hypothesis_error_of(rho, nu, 0.4, proj) - opt.min_error;
        margin = std::min(margin, diff);
        pass = pass && diff >= -1e-11;
      }
    }
    results.push_back({"hypothesis_testing", pass, margin});
  }
  {
    // entropy balance of a small open system
    ef::Matrix sz(2, 2);
    sz << 1, 0, 0, -1;
    ef::Matrix hr = ef::Matrix::Zero(2, 2);
    hr(0, 0) = 0.9;
    hr(1, 1) = -0.3;
    ef::Matrix nr = ef::Matrix::Zero(2, 2);
    nr(0, 0) = 1.0;
    ef::Matrix v = ef::Matrix::Zero(4, 4);
    v(1, 2) = v(2, 1) = 1.0;
    ef::Matrix ws = ef::hermitian_exp(-0.5 * sz);
    ws /= ws.trace().real();
    ef::OpenSystemSpec spec{ef::HermitianOperator(0.7 * sz),
                            ef::HermitianOperator(nr),
                            ef::DensityMatrix(ws, 1e-9),
                            {{ef::HermitianOperator(hr), ef::HermitianOperator(nr), 0.8, 0.1},
                             {ef::HermitianOperator(hr), ef::HermitianOperator(nr), 1.4, -0.1}},
                            {v, v},
                            0.45};
    auto open = ef::build_open_system(spec);
    const double t = 1.0;
    const ef::DensityMatrix omega_t = open.sys.omega_t_state(t);
    const double srel = ef::relative_entropy(omega_t, open.sys.omega()).value();
    const ef::Matrix ell = ef::relative_hamiltonian(open.sys, t);
    const double balance = -omega_t.expectation(ell);
    const double gap = std::abs(srel - balance);
    results.push_back({"entropy_balance", gap <= 1e-9, gap});
  }

  {
    // Kubo-Mari positivity and the chaotic-state reduction
    ef::Rng rng(seed + 6);
    bool pass = true;
    double worst = 0.0;
    auto rho = ef::sample_faithful_density(rng, 4);
    for (int k = 0; k < 20; ++k) {
      const ef::Matrix x = rng.ginibre(4);
      const double val = ef::kubo_mari(rho, x, x).real();
      worst = std::min(worst, val);
      pass = pass && val >= -1e-12;
    }
    results.push_back({"canonical_correlation", pass, worst});
  }
  {
    // Renyi swap symmetry and monotonicity under mixing channels
    ef::Rng rng(seed + 7);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      auto rho = ef::sample_faithful_density(rng, 3);
      auto nu = ef::sample_faithful_density(rng, 3);
      for (double a : {0.25, 0.6})
        worst = std::max(worst,
                         std::abs(ef::renyi_relative_entropy(rho, nu, a).value() -
                                  ef::renyi_relative_entropy(nu, rho, 1.0 - a).value()));
    }
    results.push_back({"renyi_swap_symmetry", worst <= 1e-12, worst});
  }
  {
    // joint counting statistics carries unit mass and the correct Laplace
    // transform
    ef::Rng rng(seed + 8);
    (void)rng;
    auto open = ef::build_open_system([&] {
      ef::Matrix sz(2, 2);
      sz << 1, 0, 0, -1;
      ef::Matrix hr = ef::Matrix::Zero(2, 2);
      hr(0, 0) = 1.0;
      hr(1, 1) = -0.2;
      ef::Matrix nr = ef::Matrix::Zero(2, 2);
      nr(0, 0) = 1.0;
      ef::Matrix v = ef::Matrix::Zero(4, 4);
      v(1, 2) = v(2, 1) = 1.0;
      ef::Matrix ws = ef::hermitian_exp(-0.4 * sz);
      ws /= ws.trace().real();
      return ef::OpenSystemSpec{
          ef::HermitianOperator(0.6 * sz),
          ef::HermitianOperator(nr),
          ef::DensityMatrix(ws, 1e-9),
          {{ef::HermitianOperator(hr), ef::HermitianOperator(nr), 0.7, 0.0},
           {ef::HermitianOperator(hr), ef::HermitianOperator(nr), 1.5, 0.0}},
          {v, v},
          0.5};
    }());
    const double t = 1.2;
    auto p = ef::multi_fcs(open.sys, t);
    double worst = std::abs(p.total_mass() - 1.0);
    ef::RealVector a(open.sys.charges().size());
    a.setConstant(0.4);
    worst = std::max(worst, std::abs(std::log(p.laplace(ef::RealVector(t * a))) -
                                     ef::e_pt_multi(open.sys, t, a, 2.0)));
    results.push_back({"joint_counting_statistics", worst <= 1e-8, worst});
  }
  {
    // stationary junction pressure: symmetry and midpoint minimum
    std::vector<ef::LeadSpec> leads = {{0.8, 0.1}, {1.3, -0.1}};
    auto sc = ef::swap_scattering(1);
    double worst = 0.0;
    for (double a : {0.2, 0.4})
      worst = std::max(worst, std::abs(ef::ebb_e2plus(leads, sc, a) -
                                       ef::ebb_e2plus(leads, sc, 1.0 - a)));
    results.push_back({"junction_symmetry", worst <= 1e-9, worst});
  }

  bool all = true;
  json checks = json::array();
  for (const auto& r : results) {
    all = all && r.pass;
    checks.push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << " (" << r.detail << ")\n";
  }
  json report = {{"seed", seed}, {"all_pass", all}, {"checks", checks}};
  manifest.write_output(out, report.dump(2) + "\n");
  manifest.finalize(out);
  return all ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entropic fluctuation toolkit"};
  app.require_subcommand(1);

  // chain-sigma
  auto* sigma = app.add_subcommand("chain-sigma", "mean entropy production rate of the chain");
  int n = 20, m = 300;
  double beta_l = 0.5, beta_r = 1.0, t_max = 60.0, dt = 0.25;
  std::string out = "chain_sigma.csv";
  sigma->add_option("--n", n, "system half-width");
  sigma->add_option("--m", m, "lattice half-width");
  sigma->add_option("--beta-l", beta_l, "left inverse temperature");
  sigma->add_option("--beta-r", beta_r, "right inverse temperature");
  sigma->add_option("--t-max", t_max, "largest time");
  sigma->add_option("--dt", dt, "time step")->check(CLI::PositiveNumber);
  sigma->add_option("--out", out, "output CSV path");

  // chain-eofalpha
  auto* eof = app.add_subcommand("chain-eofalpha", "normalized pressure along the diagonal");
  int en = 20, em = 300;
  double ebl = 0.5, ebr = 1.0;
  std::string t_list = "10,20,30", alpha_list;
  std::string eout = "chain_eofalpha.csv";
  eof->add_option("--n", en, "system half-width");
  eof->add_option("--m", em, "lattice half-width");
  eof->add_option("--beta-l", ebl, "left inverse temperature");
  eof->add_option("--beta-r", ebr, "right inverse temperature");
  eof->add_option("--t-list", t_list, "comma-separated times");
  eof->add_option("--alpha-grid", alpha_list, "comma-separated alphas (default 0..1 step 0.05)");
  eof->add_option("--out", eout, "output CSV path");

  // chain-rate
  auto* rate = app.add_subcommand("chain-rate", "rate function on the antidiagonal");
  double rbeta = 1.0, rxl = 0.5, rxr = 0.0, theta_max = 2.5;
  int rpoints = 201;
  std::string rout = "chain_rate.csv";
  rate->add_option("--beta", rbeta, "reference inverse temperature");
  rate->add_option("--x-l", rxl, "left force");
  rate->add_option("--x-r", rxr, "right force");
  rate->add_option("--theta-max", theta_max, "parameter range")->check(CLI::PositiveNumber);
  rate->add_option("--points", rpoints, "grid size")->check(CLI::Range(3, 100000));
  rate->add_option("--out", rout, "output CSV path");

  // ebb-e2plus
  auto* ebb = app.add_subcommand("ebb-e2plus", "stationary pressure of the two-lead junction");
  double bbl = 0.8, bbr = 1.4, bml = 0.0, bmr = 0.0;
  int half_width = 1;
  std::string balpha, bout = "ebb_e2plus.csv";
  ebb->add_option("--beta-l", bbl, "left inverse temperature");
  ebb->add_option("--beta-r", bbr, "right inverse temperature");
  ebb->add_option("--mu-l", bml, "left chemical potential");
  ebb->add_option("--mu-r", bmr, "right chemical potential");
  ebb->add_option("--l", half_width, "sample half-width entering the phase");
  ebb->add_option("--alpha-grid", balpha, "comma-separated alphas");
  ebb->add_option("--out", bout, "output CSV path");

  // xy-eplus
  auto* xy = app.add_subcommand("xy-eplus", "stationary pressure of the open spin chain");
  double xbl = 0.6, xbr = 1.1, xj = 0.9, xf = 1.3;
  std::string xalpha, xout = "xy_eplus.csv";
  xy->add_option("--beta-l", xbl, "left inverse temperature");
  xy->add_option("--beta-r", xbr, "right inverse temperature");
  xy->add_option("--j", xj, "nearest-neighbor coupling");
  xy->add_option("--field", xf, "transverse field");
  xy->add_option("--alpha-grid", xalpha, "comma-separated alphas");
  xy->add_option("--out", xout, "output CSV path");

  // fcs
  auto* fcs = app.add_subcommand("fcs", "counting statistics of a named model");
  std::string model = "qubit-toy", model_file;
  double ft = 1.0;
  unsigned fseed = 42;
  std::string fout = "fcs.csv";
  fcs->add_option("--model", model, "built-in model name");
  fcs->add_option("--model-file", model_file, "JSON model description");
  fcs->add_option("--t", ft, "measurement time");
  fcs->add_option("--seed", fseed, "sampling seed");
  fcs->add_option("--out", fout, "output CSV path");

  // qsys-verify
  auto* verify = app.add_subcommand("qsys-verify", "run the property suite");
  unsigned vseed = 7;
  std::string vout = "qsys_verify.json";
  verify->add_option("--seed", vseed, "sampling seed");
  verify->add_option("--out", vout, "output JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sigma) return run_chain_sigma(n, m, beta_l, beta_r, t_max, dt, out);
    if (*eof) {
      std::vector<double> alphas;
      if (alpha_list.empty())
        for (double a = 0.0; a <= 1.0 + 1e-12; a += 0.05) alphas.push_back(a);
      else
        alphas = parse_list(alpha_list);
      return run_chain_eofalpha(en, em, ebl, ebr, parse_list(t_list), alphas, eout);
    }
    if (*rate) return run_chain_rate(rbeta, rxl, rxr, theta_max, rpoints, rout);
    if (*ebb) {
      std::vector<double> alphas;
      if (balpha.empty())
        for (double a = 0.0; a <= 1.0 + 1e-12; a += 0.02) alphas.push_back(a);
      else
        alphas = parse_list(balpha);
      return run_ebb_e2plus(bbl, bbr, bml, bmr, half_width, alphas, bout);
    }
    if (*xy) {
      std::vector<double> alphas;
      if (xalpha.empty())
        for (double a = 0.0; a <= 1.0 + 1e-12; a += 0.02) alphas.push_back(a);
      else
        alphas = parse_list(xalpha);
      return run_xy_eplus(xbl, xbr, xj, xf, alphas, xout);
    }
    if (*fcs) return run_fcs(model, model_file, ft, fseed, fout);
    if (*verify) return run_qsys_verify(vseed, vout);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
