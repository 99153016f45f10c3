#include "fauio/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "fauio/config.hpp"
#include "fauio/manifest.hpp"
#include "fauio/matrixio.hpp"
#include "fauio/sdp.hpp"
#include "fauio/sim.hpp"
#include "fauio/synth.hpp"

namespace fauio {

namespace {

namespace fsys = std::filesystem;

constexpr int kOk = 0;
constexpr int kAnalysisFailure = 1;
constexpr int kInputError = 2;

std::string resolve_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("FAUIO_OUTPUT_DIR"); env && *env) return env;
  return ".";
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fsys::create_directories(dir, ec);
  if (ec)
    throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os << content;
  if (!os) throw std::runtime_error("write to '" + path + "' failed");
}

std::string read_text(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::vector<double> parse_grid(const std::string& csv, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &pos);
    } catch (...) {
      pos = 0;
    }
    if (pos != item.size() || item.empty())
      throw std::invalid_argument(flag + ": '" + item + "' is not a number");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument(flag + ": empty grid");
  return out;
}

std::string sanitize(const std::string& name) {
  std::string out = name;
  for (char& c : out)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '-' && c != '_')
      c = '-';
  return out;
}

std::string mode_name(DesignSpec::Mode m) {
  switch (m) {
    case DesignSpec::Mode::MinMu:
      return "min_mu";
    case DesignSpec::Mode::DecayCapped:
      return "decay_capped";
    case DesignSpec::Mode::Feasibility:
      return "feasibility";
  }
  return "?";
}

// ---------------------------------------------------------------- validate --

struct CommonOpts {
  std::string config;
  std::string out_dir;
};

int cmd_validate(const CommonOpts& o) {
  ToolConfig cfg;
  try {
    cfg = load_config(o.config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  const std::string out = resolve_out_dir(o.out_dir);
  RunManifest man;
  try {
    ensure_dir(out);
    man = make_manifest("validate", o.config, {});
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }

  ConditionReport rep = validate_assumptions(cfg.plant);
  std::string note;
  if (rep.all_pass()) {
    try {
      const DescriptorModel desc = augment_descriptor(cfg.plant);
      const auto [L1, F] = compute_L1_F(desc);
      rep.add("matching condition L1*T + F*C_bar = I", true, 0.0,
              "residual within 1e-8");
      const ConditionReport existence = check_existence_conditions(desc, L1);
      for (const auto& chk : existence.checks) rep.checks.push_back(chk);
    } catch (const std::exception& e) {
      rep.add("matching condition L1*T + F*C_bar = I", false, 0.0, e.what());
    }
  } else {
    note = "existence conditions skipped: structural assumptions failed\n";
  }

  std::ostringstream os;
  os << "# manifest=" << man.run_hash << "\n";
  os << "model: " << cfg.plant.name << "\n";
  os << rep.to_text() << note;
  const std::string text = os.str();
  std::cout << text;
  try {
    write_text(out + "/validate_report.txt", text);
    write_manifest(out + "/manifest_validate.json", man);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return rep.all_pass() ? kOk : kAnalysisFailure;
}

// ------------------------------------------------------------------- synth --

struct SynthOpts : CommonOpts {
  int theorem = 1;
  double epsilon = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  bool has_epsilon = false, has_beta = false, has_delta = false;
  std::string grid, grid_delta;
};

std::string instance_line(const std::string& label, const SdpSolution& sol) {
  std::ostringstream os;
  os << label << ": status=" << sol.status << " iterations=" << sol.iterations
     << " objective=" << fmt17(sol.objective) << " sqrt_mu=" << fmt17(sol.sqrt_mu)
     << " r_prim=" << fmt17(sol.r_prim) << " r_dual=" << fmt17(sol.r_dual);
  return os.str();
}

std::string worst_residual_line(const AssembledProblem& prob, const VectorXd& x) {
  const CertificateCheck chk = verify_certificate(prob, x);
  const VertexResidual* worst = nullptr;
  for (const auto& r : chk.rows)
    if (!worst || r.lambda_max > worst->lambda_max) worst = &r;
  if (!worst) return "no vertex constraints to report";
  std::ostringstream os;
  os << "worst vertex residual at the returned point: " << worst->name
     << " lambda_max=" << fmt17(worst->lambda_max) << " ratio=" << fmt17(worst->ratio);
  return os.str();
}

int cmd_synth(const SynthOpts& o) {
  ToolConfig cfg;
  try {
    cfg = load_config(o.config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }

  SynthesisBlock blk;
  if (o.theorem == 1 && cfg.theorem1) blk = *cfg.theorem1;
  if (o.theorem == 2 && cfg.theorem2) blk = *cfg.theorem2;
  if (o.has_epsilon) blk.epsilon = o.epsilon;
  if (o.has_beta) blk.beta = o.beta;
  if (o.has_delta) {
    blk.delta = o.delta;
    blk.has_delta = true;
  }
  if (o.theorem == 2 && !blk.has_delta) {
    std::cerr << "error: --theorem 2 needs a delta; pass --delta or set "
                 "synthesis.theorem2.delta in the config\n";
    return kInputError;
  }

  const std::string out = resolve_out_dir(o.out_dir);
  std::vector<std::pair<std::string, std::string>> params = {
      {"theorem", std::to_string(o.theorem)},
      {"epsilon", fmt17(blk.epsilon)},
      {"beta", fmt17(blk.beta)}};
  if (o.theorem == 2) {
    params.emplace_back("delta", fmt17(blk.delta));
    std::string chan = "all";
    if (blk.certificate_channels.size()) {
      chan.clear();
      for (Eigen::Index i = 0; i < blk.certificate_channels.size(); ++i)
        chan += (i ? "," : "") + fmt17(blk.certificate_channels(i));
    }
    params.emplace_back("certificate_channels", chan);
  }
  params.emplace_back("design_mode", mode_name(blk.design.mode));
  if (blk.design.mode == DesignSpec::Mode::DecayCapped) {
    params.emplace_back("alpha", fmt17(blk.design.alpha));
    params.emplace_back("mu_fix", fmt17(blk.design.mu_fix));
    params.emplace_back("rho1", fmt17(blk.design.rho1));
    params.emplace_back("rho2", fmt17(blk.design.rho2));
  }
  if (!o.grid.empty()) params.emplace_back("grid", o.grid);
  if (!o.grid_delta.empty()) params.emplace_back("grid_delta", o.grid_delta);

  RunManifest man;
  try {
    ensure_dir(out);
    man = make_manifest("synth", o.config, params);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  const std::string k = std::to_string(o.theorem);

  std::ostringstream rpt;
  rpt << "# manifest=" << man.run_hash << "\n";
  rpt << "synthesis, observer form " << k << " on model '" << cfg.plant.name << "'\n";
  rpt << "epsilon=" << fmt17(blk.epsilon) << " beta=" << fmt17(blk.beta);
  if (o.theorem == 2) rpt << " delta=" << fmt17(blk.delta);
  rpt << "\n\n";

  try {
    const DescriptorModel desc = augment_descriptor(cfg.plant);
    const auto [L1, F] = compute_L1_F(desc);

    ProblemSpec cert;
    cert.desc = desc;
    cert.L1 = L1;
    cert.F = F;
    cert.theorem = o.theorem;
    cert.epsilon = blk.epsilon;
    cert.delta = blk.delta;
    cert.beta = blk.beta;
    cert.bounds = cfg.plant.lipschitz_bounds;
    if (o.theorem == 2) cert.channel_mask = blk.certificate_channels;
    cert.design = DesignSpec{};  // minimize mu

    const AssembledProblem cert_prob = build_problem(cert);
    const SdpSolution cert_sol = solve(cert_prob, cfg.solver);
    const std::string cert_line = instance_line("certificate instance", cert_sol);
    std::cout << cert_line << "\n";
    rpt << cert_line << "\n";
    if (cert_sol.status != "optimal") {
      const std::string why = worst_residual_line(cert_prob, cert_sol.x);
      std::cerr << "synthesis failed: certificate instance is " << cert_sol.status << "\n"
                << why << "\n";
      rpt << why << "\n";
      write_text(out + "/synth_thm" + k + ".txt", rpt.str());
      write_manifest(out + "/manifest_synth.json", man);
      return kAnalysisFailure;
    }
    std::cout << "sqrt_mu = " << fmt17(cert_sol.sqrt_mu) << "\n";
    const CertificateCheck cert_chk = verify_certificate(cert_prob, cert_sol.x);
    rpt << "certificate residuals:\n" << cert_chk.report.to_text();
    rpt << "min eigenvalues: P1=" << fmt17(cert_chk.min_eig_P1)
        << " P2=" << fmt17(cert_chk.min_eig_P2) << " Z=" << fmt17(cert_chk.min_eig_Z) << "\n\n";

    // Optional epsilon/delta grid around the certificate instance.
    if (!o.grid.empty()) {
      const std::vector<double> eg = parse_grid(o.grid, "--grid");
      std::vector<double> dg;
      if (!o.grid_delta.empty()) dg = parse_grid(o.grid_delta, "--grid-delta");
      if (o.theorem == 2 && dg.empty()) dg.push_back(blk.delta);
      const SearchResult sr = scalar_search(cert, eg, dg, cfg.solver);
      write_text(out + "/grid_thm" + k + ".csv",
                 "# manifest=" + man.run_hash + "\n" + search_to_csv(sr));
      if (sr.any_feasible()) {
        const SearchEntry& b = sr.best();
        std::ostringstream gl;
        gl << "grid best: epsilon=" << fmt17(b.epsilon);
        if (o.theorem == 2) gl << " delta=" << fmt17(b.delta);
        gl << " sqrt_mu=" << fmt17(b.sqrt_mu);
        std::cout << gl.str() << "\n";
        rpt << gl.str() << "\n\n";
      } else {
        std::cout << "grid: no feasible point\n";
        rpt << "grid: no feasible point\n\n";
      }
    }

    // Design instance: full disturbance channels plus the configured design
    // refinements; its gains and storage function go to the gain file.
    ProblemSpec des = cert;
    des.channel_mask = VectorXd();
    des.design = blk.design;
    const AssembledProblem des_prob = build_problem(des);
    const SdpSolution des_sol = solve(des_prob, cfg.solver);
    const std::string des_line =
        instance_line("design instance (" + mode_name(blk.design.mode) + ")", des_sol);
    std::cout << des_line << "\n";
    rpt << des_line << "\n";
    if (des_sol.status != "optimal") {
      const std::string why = worst_residual_line(des_prob, des_sol.x);
      std::cerr << "synthesis failed: design instance is " << des_sol.status << "\n"
                << why << "\n";
      rpt << why << "\n";
      write_text(out + "/synth_thm" + k + ".txt", rpt.str());
      write_manifest(out + "/manifest_synth.json", man);
      return kAnalysisFailure;
    }
    const CertificateCheck des_chk = verify_certificate(des_prob, des_sol.x);
    rpt << "design residuals:\n" << des_chk.report.to_text();
    rpt << "min eigenvalues: P1=" << fmt17(des_chk.min_eig_P1)
        << " P2=" << fmt17(des_chk.min_eig_P2) << " Z=" << fmt17(des_chk.min_eig_Z) << "\n\n";

    const ObserverGains gains =
        recover_gains(desc, L1, F, des_sol.blocks, blk.beta, des_sol.mu);
    const ConditionReport design_rep = certify_design(desc, gains, cfg.plant.lipschitz_bounds);
    rpt << "recovered design:\n" << design_rep.to_text();

    const std::string gains_path = out + "/gains_thm" + k + ".txt";
    save_gains(gains_path, gains, "observer gain set (manifest " + man.run_hash + ")");
    std::cout << "gains written to " << gains_path << "\n";

    std::ostringstream csv;
    csv << "# manifest=" << man.run_hash << "\n";
    csv << "instance,constraint,vertex,lambda_max,norm,ratio\n";
    for (const auto& [label, chk] :
         {std::pair<const char*, const CertificateCheck*>{"certificate", &cert_chk},
          {"design", &des_chk}})
      for (const auto& r : chk->rows)
        csv << label << ',' << r.name << ',' << r.vertex << ',' << fmt17(r.lambda_max) << ','
            << fmt17(r.norm) << ',' << fmt17(r.ratio) << "\n";
    write_text(out + "/certificate_thm" + k + ".csv", csv.str());
    write_text(out + "/synth_thm" + k + ".txt", rpt.str());
    write_manifest(out + "/manifest_synth.json", man);

    if (!cert_chk.all_pass() || !des_chk.all_pass() || !design_rep.all_pass()) {
      std::cerr << "synthesis completed but a recovered-design check failed (see synth_thm" << k
                << ".txt)\n";
      return kAnalysisFailure;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kAnalysisFailure;
  }
  return kOk;
}

// ---------------------------------------------------------------- simulate --

struct SimulateOpts : CommonOpts {
  std::string gains;
  std::string scenario;
};

std::string settle_value(const SettlingOutcome& s) {
  switch (s.status) {
    case SettlingOutcome::Status::Settled:
      return fmt17(s.time);
    case SettlingOutcome::Status::NotSettled:
      return "not-settled";
    case SettlingOutcome::Status::NoSamples:
      return "no-samples";
  }
  return "?";
}

int cmd_simulate(const SimulateOpts& o) {
  ToolConfig cfg;
  ObserverGains gains;
  ScenarioConfig sc;
  try {
    cfg = load_config(o.config);
    gains = load_gains(o.gains);
    const auto presets = scenario_preset_names();
    if (std::find(presets.begin(), presets.end(), o.scenario) != presets.end()) {
      sc = scenario_preset(o.scenario);
    } else if (fsys::exists(o.scenario)) {
      ScenarioConfig defaults;
      defaults.dt = cfg.sim_dt;
      defaults.tau = cfg.sim_tau;
      defaults.store_stride = cfg.sim_store_stride;
      sc = load_scenario(o.scenario, cfg.plant, defaults);
    } else {
      std::string known;
      for (const auto& kn : presets) known += (known.empty() ? "" : ", ") + kn;
      throw std::runtime_error("scenario '" + o.scenario +
                               "' is neither a preset (" + known + ") nor a file");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }

  const std::string out = resolve_out_dir(o.out_dir);
  const std::vector<std::pair<std::string, std::string>> params = {
      {"scenario", sc.name},
      {"gains", o.gains},
      {"horizon", fmt17(sc.horizon)},
      {"dt", fmt17(sc.dt)},
      {"tau", fmt17(sc.tau)},
      {"store_stride", std::to_string(sc.store_stride)}};
  RunManifest man;
  try {
    ensure_dir(out);
    man = make_manifest("simulate", o.config, params);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }

  Trajectory traj;
  try {
    traj = integrate(cfg.plant, gains, sc);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kAnalysisFailure;
  }

  const HInfCertificate hc = hinf_check(traj, gains);
  const std::string prefix = sanitize(sc.name);

  std::ostringstream csv;
  csv << "# manifest=" << man.run_hash << "\n";
  csv << "metric,value\n";
  csv << "rmse_fa," << fmt17(traj.rmse_fa) << "\n";
  csv << "rmse_fs," << fmt17(traj.rmse_fs) << "\n";
  for (double ev : traj.events_fa)
    csv << "settling_fa_event_" << fmt17(ev) << ","
        << settle_value(settling_time(traj, ErrorSelector::Actuator, ev)) << "\n";
  for (double ev : traj.events_fs)
    csv << "settling_fs_event_" << fmt17(ev) << ","
        << settle_value(settling_time(traj, ErrorSelector::Sensor, ev)) << "\n";
  csv << "hinf_valid," << (hc.valid ? 1 : 0) << "\n";
  if (hc.valid) {
    csv << "hinf_nu," << fmt17(hc.nu) << "\n";
    csv << "hinf_mu," << fmt17(hc.mu) << "\n";
    csv << "hinf_lhs," << fmt17(hc.lhs) << "\n";
    csv << "hinf_rhs," << fmt17(hc.rhs) << "\n";
    csv << "hinf_w_max," << fmt17(hc.w_max) << "\n";
    csv << "energy_e," << fmt17(hc.energy_e) << "\n";
    csv << "energy_wbar," << fmt17(hc.energy_wbar) << "\n";
  }

  std::ostringstream txt;
  txt << "scenario " << sc.name << ": horizon=" << fmt17(traj.horizon)
      << " dt=" << fmt17(traj.dt) << " tau=" << fmt17(traj.tau)
      << " wall_seconds=" << fmt17(traj.wall_seconds) << "\n";
  txt << "rmse_fa=" << fmt17(traj.rmse_fa) << " rmse_fs=" << fmt17(traj.rmse_fs) << "\n";
  for (double ev : traj.events_fa)
    txt << "settling fa after t=" << fmt17(ev) << ": "
        << settle_value(settling_time(traj, ErrorSelector::Actuator, ev)) << "\n";
  for (double ev : traj.events_fs)
    txt << "settling fs after t=" << fmt17(ev) << ": "
        << settle_value(settling_time(traj, ErrorSelector::Sensor, ev)) << "\n";
  if (hc.valid)
    txt << "energy bound: lhs=" << fmt17(hc.lhs) << " rhs=" << fmt17(hc.rhs) << " ("
        << (hc.pass() ? "holds" : "VIOLATED") << "), running-integral max=" << fmt17(hc.w_max)
        << "\n";
  else
    txt << "energy bound: gains carry no storage-function certificate\n";

  try {
    write_trajectory_csv(out + "/" + prefix + "_trajectory.csv", traj, man.run_hash);
    write_plots(out, prefix, traj, man.run_hash);
    write_text(out + "/" + prefix + "_metrics.csv", csv.str());
    write_text(out + "/" + prefix + "_metrics.txt",
               "# manifest=" + man.run_hash + "\n" + txt.str());
    write_manifest(out + "/manifest_simulate.json", man);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  std::cout << txt.str();
  std::cout << "outputs written to " << out << "/" << prefix << "_*\n";

  if (hc.valid && !hc.pass()) {
    std::cerr << "energy bound violated: lhs=" << fmt17(hc.lhs) << " > rhs=" << fmt17(hc.rhs)
              << "\n";
    return kAnalysisFailure;
  }
  return kOk;
}

// ------------------------------------------------------------------ report --

int cmd_report(const CommonOpts& o) {
  ToolConfig cfg;
  try {
    cfg = load_config(o.config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  const std::string out = resolve_out_dir(o.out_dir);
  RunManifest man;
  try {
    ensure_dir(out);
    man = make_manifest("report", o.config, {});
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }

  std::vector<std::string> missing;
  std::ostringstream md;
  md << "# Observer synthesis report\n\n";
  md << "<!-- manifest=" << man.run_hash << " -->\n\n";
  md << "Model: `" << cfg.plant.name << "` (n=" << cfg.plant.n() << ", p=" << cfg.plant.p()
     << ", a1=" << cfg.plant.a1() << ", a2=" << cfg.plant.a2() << ", q1=" << cfg.plant.q1()
     << ", q2=" << cfg.plant.q2() << ")\n\n";

  md << "## Validation\n\n";
  if (fsys::exists(out + "/validate_report.txt")) {
    md << "```\n" << read_text(out + "/validate_report.txt") << "```\n\n";
  } else {
    missing.push_back("validate_report.txt");
  }

  md << "## Synthesis\n\n";
  for (const std::string k : {"1", "2"}) {
    const std::string synth = out + "/synth_thm" + k + ".txt";
    if (fsys::exists(synth)) {
      md << "### Form " << k << "\n\n```\n" << read_text(synth) << "```\n\n";
    } else {
      missing.push_back("synth_thm" + k + ".txt");
    }
    if (!fsys::exists(out + "/gains_thm" + k + ".txt"))
      missing.push_back("gains_thm" + k + ".txt");
    const std::string cert = out + "/certificate_thm" + k + ".csv";
    if (fsys::exists(cert)) {
      // Reduce the residual table to its worst row per instance.
      std::ifstream is(cert);
      std::string line;
      std::map<std::string, std::pair<std::string, double>> worst;
      while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("instance,", 0) == 0) continue;
        std::stringstream ls(line);
        std::string inst, cname, vertex, lam, norm, ratio;
        std::getline(ls, inst, ',');
        std::getline(ls, cname, ',');
        std::getline(ls, vertex, ',');
        std::getline(ls, lam, ',');
        std::getline(ls, norm, ',');
        std::getline(ls, ratio, ',');
        const double lv = std::strtod(lam.c_str(), nullptr);
        auto it = worst.find(inst);
        if (it == worst.end() || lv > it->second.second) worst[inst] = {cname, lv};
      }
      for (const auto& [inst, row] : worst)
        md << "- form " << k << " " << inst << ": worst vertex residual " << row.second << " ("
           << row.first << ")\n";
      md << "\n";
    } else {
      missing.push_back("certificate_thm" + k + ".csv");
    }
  }

  md << "## Simulations\n\n";
  bool any_sim = false;
  std::vector<std::string> metric_files;
  if (fsys::exists(out))
    for (const auto& entry : fsys::directory_iterator(out)) {
      const std::string name = entry.path().filename().string();
      if (name.size() > 12 && name.substr(name.size() - 12) == "_metrics.csv")
        metric_files.push_back(name);
    }
  std::sort(metric_files.begin(), metric_files.end());
  for (const auto& name : metric_files) {
    any_sim = true;
    md << "### " << name.substr(0, name.size() - 12) << "\n\n";
    std::ifstream is(out + "/" + name);
    std::string line;
    md << "| metric | value |\n|---|---|\n";
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '#' || line.rfind("metric,", 0) == 0) continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) continue;
      md << "| " << line.substr(0, comma) << " | " << line.substr(comma + 1) << " |\n";
    }
    md << "\n";
  }
  if (!any_sim) missing.push_back("*_metrics.csv (no simulation outputs)");

  if (!missing.empty()) {
    md << "## Missing artifacts\n\n";
    for (const auto& m : missing) md << "- " << m << "\n";
    md << "\n";
  }

  try {
    write_text(out + "/report.md", md.str());
    write_manifest(out + "/manifest_report.json", man);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  std::cout << "report written to " << out << "/report.md\n";
  for (const auto& m : missing) std::cout << "missing: " << m << "\n";
  return kOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{
      "fauio: synthesis and validation of fast adaptive unknown-input observers\n"
      "for Lipschitz nonlinear systems with actuator/sensor fault estimation"};
  app.require_subcommand(1);
  app.footer(
      "Output files (in --out-dir, or $FAUIO_OUTPUT_DIR, default .):\n"
      "  validate: validate_report.txt, manifest_validate.json\n"
      "  synth:    gains_thm<k>.txt, synth_thm<k>.txt, certificate_thm<k>.csv,\n"
      "            [grid_thm<k>.csv], manifest_synth.json\n"
      "  simulate: <scenario>_trajectory.csv, <scenario>_{fa,fs,fat,fst}.svg,\n"
      "            <scenario>_metrics.{csv,txt}, manifest_simulate.json\n"
      "  report:   report.md, manifest_report.json\n"
      "CSV contract: every CSV starts with '# manifest=<run-hash>'.\n"
      "  trajectory CSV columns: t, x*, eta*, zeta_hat*, fa*, fa_hat*, fs*,\n"
      "  fs_hat*, ytilde*, e* (one row per stored sample, 17 significant\n"
      "  digits, byte-identical across reruns of the same inputs).\n"
      "  metrics CSV rows: metric,value (rmse_fa, rmse_fs, settling_*,\n"
      "  hinf_*, energy_*).\n"
      "Exit codes: 0 success; 1 analysis failure (infeasible synthesis,\n"
      "failed assumption, diverging run, violated energy bound); 2 input\n"
      "error (bad flags or malformed files).");

  CommonOpts vopt;
  CLI::App* validate = app.add_subcommand(
      "validate", "check model assumptions and observer existence conditions");
  validate->add_option("--config", vopt.config, "model/config JSON file")->required();
  validate->add_option("--out-dir", vopt.out_dir, "output directory");

  SynthOpts sopt;
  CLI::App* synth =
      app.add_subcommand("synth", "solve the synthesis LMIs and recover observer gains");
  synth->add_option("--config", sopt.config, "model/config JSON file")->required();
  synth->add_option("--out-dir", sopt.out_dir, "output directory");
  synth->add_option("--theorem", sopt.theorem, "observer form: 1 (nominal) or 2 (disturbance)")
      ->check(CLI::IsMember({1, 2}));
  CLI::Option* ep = synth->add_option("--epsilon", sopt.epsilon, "slack weight epsilon");
  CLI::Option* bt = synth->add_option("--beta", sopt.beta, "adaptation rate beta");
  CLI::Option* dl = synth->add_option("--delta", sopt.delta, "derivative coupling delta");
  synth->add_option("--grid", sopt.grid, "comma-separated epsilon grid to sweep");
  synth->add_option("--grid-delta", sopt.grid_delta, "comma-separated delta grid (form 2)");

  SimulateOpts mopt;
  CLI::App* simulate =
      app.add_subcommand("simulate", "integrate the closed loop on a fault scenario");
  simulate->add_option("--config", mopt.config, "model/config JSON file")->required();
  simulate->add_option("--out-dir", mopt.out_dir, "output directory");
  simulate->add_option("--gains", mopt.gains, "gain file from synth")->required();
  simulate->add_option("--scenario", mopt.scenario, "preset name or scenario JSON file")
      ->required();

  CommonOpts ropt;
  CLI::App* report =
      app.add_subcommand("report", "aggregate the artifacts in the output directory");
  report->add_option("--config", ropt.config, "model/config JSON file")->required();
  report->add_option("--out-dir", ropt.out_dir, "output directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e);  // --help and friends
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  sopt.has_epsilon = ep->count() > 0;
  sopt.has_beta = bt->count() > 0;
  sopt.has_delta = dl->count() > 0;

  try {
    if (validate->parsed()) return cmd_validate(vopt);
    if (synth->parsed()) return cmd_synth(sopt);
    if (simulate->parsed()) return cmd_simulate(mopt);
    if (report->parsed()) return cmd_report(ropt);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kAnalysisFailure;
  }
  return kInputError;
}

}  // namespace fauio
