#include "cbsq/harness.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <iostream>
#include <map>
#include <sstream>

#include "cbsq/checkpoint.hpp"
#include "cbsq/diagnostics.hpp"
#include "cbsq/errors.hpp"
#include "cbsq/io.hpp"
#include "cbsq/linear_oracle.hpp"
#include "cbsq/multiplier.hpp"
#include "cbsq/parallel.hpp"
#include "cbsq/solver.hpp"
#include "cbsq/spectral_ops.hpp"
#include "cbsq/sweep.hpp"

namespace cbsq {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

json num(double x) { return std::isfinite(x) ? json(x) : json(format_double(x)); }

// Collects written artifacts so the manifest can list their hashes.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}
  const fs::path& dir() const { return dir_; }
  void text(const std::string& name, const std::string& body) {
    io::write_atomic(dir_ / name, body);
    hashes_[name] = io::git_blob_hash(body);
  }
  void bytes(const std::string& name, const std::vector<std::uint8_t>& body) {
    io::write_atomic(dir_ / name, std::span<const std::uint8_t>(body));
    hashes_[name] = io::git_blob_hash(std::span<const std::uint8_t>(body));
  }
  void json_file(const std::string& name, const json& j) { text(name, j.dump(2) + "\n"); }
  const std::map<std::string, std::string>& hashes() const { return hashes_; }

 private:
  fs::path dir_;
  std::map<std::string, std::string> hashes_;
};

json physics_json(const PhysicsParams& p) {
  return json{{"nu", num(p.nu)},     {"mu", num(p.mu)},       {"sigma", p.sigma}, {"b", num(p.b)},
              {"beta", num(p.beta)}, {"alpha", num(p.alpha)}, {"delta", num(p.delta)}};
}

InitialDataSpec data_spec(const RunConfig& c) {
  InitialDataSpec spec = threshold_data_spec(c.physics, c.epsilon, c.seed);
  if (c.theta_zero) {
    spec.theta_hb = 0.0;
    spec.theta_dx13.reset();
  }
  return spec;
}

StepperConfig stepper(const RunConfig& c) {
  StepperConfig s;
  s.dt_max = c.dt_max;
  s.cfl_safety = c.cfl_safety;
  s.scheme = c.scheme;
  s.confinement_threshold = c.confinement_threshold;
  return s;
}

std::vector<double> report_times(double t0, double t_end, double every) {
  std::vector<double> ts{t0};
  for (long n = static_cast<long>(std::floor(t0 / every)) + 1;; ++n) {
    const double t = n * every;
    if (t >= t_end) break;
    if (t > t0) ts.push_back(t);
  }
  if (t_end > t0) ts.push_back(t_end);
  return ts;
}

void run_linear(const RunConfig& c, Outputs& out, json& summary) {
  const auto& lat = c.lattice;
  const SimState init = make_initial_data(lat, c.physics, data_spec(c));
  const LinearState s0{init.omega, init.theta, c.physics, 0.0};
  const double t_end = effective_t_end(c);
  std::vector<EnergyReport> reports;
  std::string modes = "t,k,theta_l2_k,omega_l2_k\n";
  for (double t : report_times(0.0, t_end, c.report_every)) {
    const LinearState s = t == 0.0 ? s0 : evolve_coupled_exact(s0, t, c.quad_tol);
    EnergyReport r = energy_report(s.omega, s.theta, c.physics);
    r.t = t;
    if (!reports.empty()) accumulate_time_integrals(reports.back(), r);
    reports.push_back(r);
    const auto th = mode_norms(s.theta);
    const auto om = mode_norms(s.omega);
    for (int k = 0; k <= lat.kmax; ++k)
      modes += format_double(t) + ',' + std::to_string(k) + ',' + format_double(th[k + lat.kmax]) + ',' +
               format_double(om[k + lat.kmax]) + '\n';
  }
  out.text("linear_modes.csv", modes);
  out.text("energy.csv", energy_csv(reports));
  summary["t_end"] = num(t_end);
  summary["reports"] = reports.size();
  summary["bundle_lhs"] = num(linear_bundle_lhs(reports, c.physics));
  summary["bundle_rhs"] = num(linear_bundle_rhs(reports.front(), c.physics));
}

void run_simulate(const RunConfig& c, const RunOptions& o, Outputs& out, json& summary) {
  SimState init;
  if (o.resume_from) {
    init = checkpoint::read(*o.resume_from, c.physics);
    if (!(init.omega.lattice() == c.lattice))
      throw Error(ErrorKind::config, "resume: checkpoint lattice differs from the configured lattice");
    const auto& p = init.params;
    if (p.nu != c.physics.nu || p.mu != c.physics.mu || p.sigma != c.physics.sigma || p.b != c.physics.b)
      throw Error(ErrorKind::config, "resume: checkpoint physics (nu, mu, sigma, b) differ from the configuration");
    summary["resumed_from"] = o.resume_from->string();
    summary["resumed_hash"] = checkpoint::state_hash(init);
  } else {
    init = make_initial_data(c.lattice, c.physics, data_spec(c));
  }
  const double t_end = effective_t_end(c);
  const InitialDataSpec spec = data_spec(c);

  std::vector<EnergyReport> reports;
  std::string last_checkpoint;
  SimulateOptions opts;
  opts.checkpoint_every = c.checkpoint_every;
  opts.on_report = [&](const SimState&, const EnergyReport& r) { reports.push_back(r); };
  opts.on_checkpoint = [&](const SimState& s) {
    const std::string name = "checkpoint_t" + format_double(s.t) + ".cbsq";
    out.bytes(name, checkpoint::encode(s));
    last_checkpoint = name;
  };

  auto write_series = [&]() {
    out.text("energy.csv", energy_csv(reports));
    double sup_w = 0.0, sup_t = 0.0;
    for (const auto& r : reports) {
      sup_w = std::max(sup_w, r.omega.lambda_b_l2);
      sup_t = std::max(sup_t, r.theta.lambda_b_l2);
    }
    summary["sup_lambda_b_omega"] = num(sup_w);
    summary["sup_lambda_b_theta"] = num(sup_t);
    summary["omega_target"] = num(spec.omega_hb);
    summary["theta_target"] = num(spec.theta_hb);
    summary["omega_ratio"] = num(spec.omega_hb > 0.0 ? sup_w / spec.omega_hb : 0.0);
    summary["theta_ratio"] = num(spec.theta_hb > 0.0 ? sup_t / spec.theta_hb : 0.0);
  };

  SimulationResult res;
  try {
    res = simulate(init, stepper(c), t_end, c.report_every, opts);
  } catch (const Error& e) {
    write_series();
    summary["status"] = "aborted";
    summary["abort"] = e.what();
    if (!last_checkpoint.empty()) summary["last_good_checkpoint"] = last_checkpoint;
    out.json_file("summary.json", summary);
    if (e.kind() == ErrorKind::nan_abort || e.kind() == ErrorKind::confinement) {
      std::string msg = e.what();
      msg += last_checkpoint.empty() ? "; no checkpoint written" : "; last good checkpoint " + last_checkpoint;
      throw Error(e.kind(), msg);
    }
    throw;
  }
  write_series();
  out.bytes("final.cbsq", checkpoint::encode(res.final_state));
  summary["status"] = "ok";
  summary["t_final"] = num(res.final_state.t);
  summary["steps"] = res.final_state.step_count;
  summary["final_state_hash"] = checkpoint::state_hash(res.final_state);
  summary["theta_identically_zero"] = res.final_state.theta.is_zero();
  out.json_file("summary.json", summary);
}

void run_sweep(const RunConfig& c, const RunOptions& o, Outputs& out, json& summary) {
  SweepSetup setup;
  setup.lattice = c.lattice;
  setup.base = c.physics;
  setup.stepper = stepper(c);
  setup.epsilon = c.epsilon;
  setup.growth_factor = c.growth_factor;
  setup.report_every = c.report_every;
  setup.theta_zero = c.theta_zero;
  const ThresholdTable table = threshold_sweep(setup, c.beta_grid, c.nu_grid, c.horizon_efolds, c.seed, o.jobs);
  out.text("threshold.csv", threshold_csv(table));
  std::map<std::string, int> counts;
  for (const auto& cell : table.cells) ++counts[std::string(to_string(cell.classification))];
  summary["growth_factor"] = num(table.growth_factor);
  summary["cells"] = table.cells.size();
  summary["classification_counts"] = counts;
}

void run_verify_multiplier(const RunConfig& c, Outputs& out, json& summary) {
  json reports = json::array();
  bool pass = true;
  for (double nu : c.nu_grid) {
    const auto rep = multiplier::verify_enhanced_bound(multiplier::build_table(c.lattice, nu));
    pass = pass && rep.pass();
    json rows = json::array();
    for (const auto& r : rep.rows) {
      if (!r.applicable) {
        rows.push_back({{"k", r.k}, {"applicable", false}});
        continue;
      }
      rows.push_back({{"k", r.k},
                      {"applicable", true},
                      {"min_slack_m1", num(r.min_slack_m1)},
                      {"xi_at_min_m1", num(r.xi_at_min_m1)},
                      {"min_slack_full", num(r.min_slack_full)},
                      {"xi_at_min_full", num(r.xi_at_min_full)}});
    }
    json viol = json::array();
    for (std::size_t i = 0; i < rep.violations.size() && i < 100; ++i) {
      const auto& v = rep.violations[i];
      viol.push_back({{"what", v.what}, {"k", v.k}, {"xi", num(v.xi)}, {"value", num(v.value)}});
    }
    reports.push_back({{"nu", num(nu)},
                       {"pass", rep.pass()},
                       {"m_min", num(rep.m_min)},
                       {"m_max", num(rep.m_max)},
                       {"violation_count", rep.violations.size()},
                       {"violations", viol},
                       {"rows", rows}});
  }
  const json report{{"pass", pass}, {"kmax", c.lattice.kmax}, {"jmax", c.lattice.jmax},
                    {"ly", num(c.lattice.ly)}, {"results", reports}};
  out.json_file("multiplier_report.json", report);
  std::cout << report.dump(2) << "\n";
  summary["pass"] = pass;
  if (!pass) throw Error(ErrorKind::verification, "multiplier bounds violated; see multiplier_report.json");
}

// Per-mode L2_y norm of a unit-width Gaussian profile in eta under the exact scalar flow.
std::vector<DecayFit> oracle_decay_scan(const RunConfig& c) {
  std::vector<DecayFit> fits;
  const auto& lat = c.lattice;
  for (double nu : c.nu_grid)
    for (int k : c.k_list) {
      const double scale = std::pow(nu, -1.0 / 3.0) * std::pow(std::abs(double(k)), -2.0 / 3.0);
      const double h = scale / 400.0;
      std::vector<double> ts, vs;
      for (int i = 0; i <= 20 * 400; ++i) {
        const double t = i * h;
        double s = 0.0;
        for (int j = -lat.jmax; j <= lat.jmax; ++j) {
          const double eta = lat.eta(j);
          const double a = std::exp(-0.5 * eta * eta);
          s += a * a * std::exp(-2.0 * nu * shear_heat_phase(k, eta, t, c.physics.sigma));
        }
        ts.push_back(t);
        vs.push_back(std::sqrt(lat.ly * s));
        if (vs.back() < 0.3 * vs.front()) break;
      }
      fits.push_back(fit_efold(ts, vs, k, nu));
    }
  return fits;
}

std::vector<DecayFit> decay_from_csv(const RunConfig& c) {
  const std::string text = io::read_text(c.series_path);
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorKind::io, "fit-decay: empty series file");
  std::vector<std::string> header;
  {
    std::istringstream hs(line);
    std::string col;
    while (std::getline(hs, col, ',')) header.push_back(col);
  }
  auto col_of = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw Error(ErrorKind::io, "fit-decay: series file lacks column '" + name + "'");
  };
  const std::size_t ct = col_of("t"), ck = col_of("k"), cv = col_of("theta_l2_k");
  std::map<int, std::pair<std::vector<double>, std::vector<double>>> series;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != header.size()) throw Error(ErrorKind::io, "fit-decay: malformed row " + std::to_string(lineno));
    try {
      const int k = std::stoi(f[ck]);
      series[k].first.push_back(std::stod(f[ct]));
      series[k].second.push_back(std::stod(f[cv]));
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::io, "fit-decay: malformed number on row " + std::to_string(lineno));
    }
  }
  std::vector<DecayFit> fits;
  for (const auto& [k, tv] : series) {
    if (k == 0 || tv.second.empty() || !(tv.second.front() > 0.0)) continue;
    fits.push_back(fit_efold(tv.first, tv.second, k, c.physics.nu));
  }
  return fits;
}

void run_fit_decay(const RunConfig& c, Outputs& out, json& summary) {
  const auto fits = c.series_path.empty() ? oracle_decay_scan(c) : decay_from_csv(c);
  out.text("decay_fits.csv", decay_csv(fits));
  summary["source"] = c.series_path.empty() ? "oracle" : c.series_path;
  summary["fits"] = fits.size();
  try {
    const ScalingFit s = scaling_regression(fits);
    summary["scaling"] = {{"p_nu", num(s.p_nu)}, {"q_k", num(s.q_k)}, {"c0", num(s.c0)}, {"r2", num(s.r2)}};
  } catch (const Error& e) {
    summary["scaling"] = nullptr;
    summary["scaling_skipped"] = e.what();
  }
}

}  // namespace

void run_or_throw(const RunConfig& config, const RunOptions& options) {
  validate_config(config);
  if (options.resume_from && config.mode != Mode::simulate)
    throw Error(ErrorKind::usage, "--resume is only valid for simulate");
  if (options.jobs < 1) throw Error(ErrorKind::usage, "--jobs must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  Outputs out(config.output_dir);
  std::error_code ec;
  fs::create_directories(out.dir(), ec);
  if (ec) throw Error(ErrorKind::io, "cannot create output directory " + out.dir().string());

  const std::string config_text = emit_config(config);
  json summary{{"mode", std::string(to_string(config.mode))}, {"physics", physics_json(config.physics)}};
  json manifest{{"tool", "cbsq"},
                {"version", version_string},
                {"mode", std::string(to_string(config.mode))},
                {"threads", parallel::max_threads()},
                {"jobs", options.jobs},
                {"config", config_text},
                {"config_hash", io::git_blob_hash(config_text)}};
  json inputs = json::object();
  if (options.resume_from) inputs[options.resume_from->string()] = io::git_blob_hash(std::span<const std::uint8_t>(io::read_bytes(*options.resume_from)));
  if (config.mode == Mode::fit_decay && !config.series_path.empty())
    inputs[config.series_path] = io::git_blob_hash(io::read_text(config.series_path));
  manifest["inputs"] = inputs;

  auto finish = [&](const std::string& status) {
    manifest["status"] = status;
    manifest["outputs"] = out.hashes();
    manifest["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    io::write_atomic(out.dir() / "manifest.json", manifest.dump(2) + "\n");
  };

  try {
    switch (config.mode) {
      case Mode::linear: run_linear(config, out, summary); break;
      case Mode::simulate: run_simulate(config, options, out, summary); break;
      case Mode::sweep: run_sweep(config, options, out, summary); break;
      case Mode::verify_multiplier: run_verify_multiplier(config, out, summary); break;
      case Mode::fit_decay: run_fit_decay(config, out, summary); break;
    }
    if (config.mode != Mode::simulate) out.json_file("summary.json", summary);
  } catch (const Error& e) {
    if (config.mode == Mode::verify_multiplier) out.json_file("summary.json", summary);
    finish(std::string("error: ") + std::string(to_string(e.kind())));
    throw;
  }
  finish("ok");
}

int run(const RunConfig& config, const RunOptions& options) {
  try {
    run_or_throw(config, options);
    return 0;
  } catch (const Error& e) {
    std::cerr << "cbsq: " << to_string(e.kind()) << " error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "cbsq: unexpected error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace cbsq
