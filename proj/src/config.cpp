#include "fauio/config.hpp"

#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace fauio {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error("config '" + path + "': " + what);
}

json load_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(path, "cannot open file");
  json j;
  try {
    is >> j;
  } catch (const json::parse_error& e) {
    fail(path, std::string("not valid JSON (") + e.what() + ")");
  }
  if (!j.is_object()) fail(path, "top level must be an object");
  return j;
}

const json& need(const json& j, const std::string& key, const std::string& ctx,
                 const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) fail(path, ctx + " is missing field '" + key + "'");
  return *it;
}

double num(const json& j, const std::string& field, const std::string& path) {
  if (!j.is_number()) fail(path, "'" + field + "' must be a number");
  return j.get<double>();
}

MatrixXd parse_matrix(const json& j, const std::string& field, const std::string& path) {
  if (!j.is_array() || j.empty() || !j.front().is_array())
    fail(path, "'" + field + "' must be a non-empty 2-D array");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j.front().size());
  MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      fail(path, "'" + field + "' rows must all have " + std::to_string(cols) + " entries");
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = num(row[static_cast<std::size_t>(c)], field, path);
  }
  return m;
}

VectorXd parse_vector(const json& j, const std::string& field, const std::string& path) {
  if (!j.is_array()) fail(path, "'" + field + "' must be an array of numbers");
  VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v(i) = num(j[static_cast<std::size_t>(i)], field, path);
  return v;
}

PlantModel parse_plant(const json& j, const std::string& name, const std::string& path) {
  PlantModel pl;
  pl.name = name;
  pl.A = parse_matrix(need(j, "A", "plant", path), "plant.A", path);
  pl.C = parse_matrix(need(j, "C", "plant", path), "plant.C", path);
  const int n = pl.n();
  const int p_rows = pl.p();
  pl.B = j.contains("B") ? parse_matrix(j["B"], "plant.B", path) : MatrixXd::Zero(n, 0);
  pl.G = parse_matrix(need(j, "G", "plant", path), "plant.G", path);
  pl.E_f = parse_matrix(need(j, "E_f", "plant", path), "plant.E_f", path);
  pl.D_f = parse_matrix(need(j, "D_f", "plant", path), "plant.D_f", path);
  pl.E1 = j.contains("E1") ? parse_matrix(j["E1"], "plant.E1", path) : MatrixXd::Zero(n, 0);
  pl.D1 = j.contains("D1") ? parse_matrix(j["D1"], "plant.D1", path) : MatrixXd::Zero(p_rows, 0);
  const json& hs = need(j, "H", "plant", path);
  if (!hs.is_array() || hs.empty()) fail(path, "'plant.H' must be a non-empty array of matrices");
  for (std::size_t i = 0; i < hs.size(); ++i)
    pl.H.push_back(parse_matrix(hs[i], "plant.H[" + std::to_string(i) + "]", path));
  pl.lipschitz_bounds =
      parse_matrix(need(j, "lipschitz_bounds", "plant", path), "plant.lipschitz_bounds", path);
  const json& nl = need(j, "nonlinearity", "plant", path);
  if (!nl.is_string()) fail(path, "'plant.nonlinearity' must be a registry name string");
  pl.nonlinearity = make_nonlinearity(nl.get<std::string>(), pl.m(), pl.nbar());
  return pl;
}

DesignSpec parse_design(const json& j, const std::string& ctx, const std::string& path) {
  DesignSpec d;
  if (j.contains("mode")) {
    const json& mj = j["mode"];
    if (!mj.is_string()) fail(path, "'" + ctx + ".mode' must be a string");
    const std::string mode = mj.get<std::string>();
    if (mode == "min_mu")
      d.mode = DesignSpec::Mode::MinMu;
    else if (mode == "decay_capped")
      d.mode = DesignSpec::Mode::DecayCapped;
    else if (mode == "feasibility")
      d.mode = DesignSpec::Mode::Feasibility;
    else
      fail(path, "'" + ctx + ".mode' must be min_mu, decay_capped, or feasibility (got '" +
                     mode + "')");
  }
  if (j.contains("alpha")) d.alpha = num(j["alpha"], ctx + ".alpha", path);
  if (j.contains("mu_fix")) d.mu_fix = num(j["mu_fix"], ctx + ".mu_fix", path);
  if (j.contains("rho1")) d.rho1 = num(j["rho1"], ctx + ".rho1", path);
  if (j.contains("rho2")) d.rho2 = num(j["rho2"], ctx + ".rho2", path);
  return d;
}

SynthesisBlock parse_synthesis(const json& j, const std::string& ctx, const std::string& path) {
  SynthesisBlock b;
  if (j.contains("epsilon")) b.epsilon = num(j["epsilon"], ctx + ".epsilon", path);
  if (j.contains("beta")) b.beta = num(j["beta"], ctx + ".beta", path);
  if (j.contains("delta")) {
    b.delta = num(j["delta"], ctx + ".delta", path);
    b.has_delta = true;
  }
  if (j.contains("certificate_channels"))
    b.certificate_channels =
        parse_vector(j["certificate_channels"], ctx + ".certificate_channels", path);
  if (j.contains("design")) b.design = parse_design(j["design"], ctx + ".design", path);
  return b;
}

double window_edge(const json& j, const std::string& field, const std::string& path) {
  if (j.is_string() && j.get<std::string>() == "inf")
    return std::numeric_limits<double>::infinity();
  return num(j, field, path);
}

Signal parse_signal(const json& channel, const std::string& field, const std::string& path) {
  if (!channel.is_array()) fail(path, "'" + field + "' must be an array of pieces");
  Signal s;
  for (std::size_t pi = 0; pi < channel.size(); ++pi) {
    const std::string pctx = field + "[" + std::to_string(pi) + "]";
    const json& pj = channel[pi];
    if (!pj.is_object()) fail(path, "'" + pctx + "' must be an object");
    const json& win = need(pj, "window", pctx, path);
    if (!win.is_array() || win.size() != 2)
      fail(path, "'" + pctx + ".window' must be [on, off]");
    SignalPiece piece;
    piece.t_on = num(win[0], pctx + ".window[0]", path);
    piece.t_off = window_edge(win[1], pctx + ".window[1]", path);
    const json& terms = need(pj, "terms", pctx, path);
    if (!terms.is_array()) fail(path, "'" + pctx + ".terms' must be an array");
    for (std::size_t ti = 0; ti < terms.size(); ++ti) {
      const std::string tctx = pctx + ".terms[" + std::to_string(ti) + "]";
      const json& tj = terms[ti];
      const json& kj = need(tj, "kind", tctx, path);
      if (!kj.is_string()) fail(path, "'" + tctx + ".kind' must be a string");
      const std::string kind = kj.get<std::string>();
      SignalTerm term{};
      if (kind == "constant") {
        term.kind = SignalTerm::Kind::Constant;
        term.a = num(need(tj, "value", tctx, path), tctx + ".value", path);
      } else if (kind == "ramp") {
        term.kind = SignalTerm::Kind::Ramp;
        term.a = num(need(tj, "slope", tctx, path), tctx + ".slope", path);
        term.b = tj.contains("origin") ? num(tj["origin"], tctx + ".origin", path) : 0.0;
      } else if (kind == "sin") {
        term.kind = SignalTerm::Kind::Sin;
        term.a = num(need(tj, "amp", tctx, path), tctx + ".amp", path);
        term.b = num(need(tj, "freq", tctx, path), tctx + ".freq", path);
      } else if (kind == "cos") {
        term.kind = SignalTerm::Kind::Cos;
        term.a = num(need(tj, "amp", tctx, path), tctx + ".amp", path);
        term.b = num(need(tj, "freq", tctx, path), tctx + ".freq", path);
      } else {
        fail(path, "'" + tctx + ".kind' must be constant, ramp, sin, or cos (got '" + kind +
                       "')");
      }
      piece.terms.push_back(term);
    }
    s.pieces.push_back(std::move(piece));
  }
  return s;
}

std::vector<Signal> parse_signal_list(const json& j, const std::string& field,
                                      const std::string& path) {
  if (!j.is_array()) fail(path, "'" + field + "' must be an array of channels");
  std::vector<Signal> out;
  for (std::size_t c = 0; c < j.size(); ++c)
    out.push_back(parse_signal(j[c], field + "[" + std::to_string(c) + "]", path));
  return out;
}

}  // namespace

ToolConfig load_config(const std::string& path) {
  const json j = load_json(path);
  ToolConfig cfg;
  if (j.contains("schema_version")) {
    const json& sv = j["schema_version"];
    if (!sv.is_number_integer()) fail(path, "'schema_version' must be an integer");
    cfg.schema_version = sv.get<int>();
    if (cfg.schema_version != 1)
      fail(path, "unsupported schema_version " + std::to_string(cfg.schema_version));
  }
  if (j.contains("name")) {
    if (!j["name"].is_string()) fail(path, "'name' must be a string");
    cfg.name = j["name"].get<std::string>();
  }
  cfg.plant = parse_plant(need(j, "plant", "config", path), cfg.name, path);
  try {
    cfg.plant.check_dimensions();
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }

  if (j.contains("sampling")) {
    const json& s = j["sampling"];
    if (s.contains("box_lo")) cfg.sampling.box_lo = num(s["box_lo"], "sampling.box_lo", path);
    if (s.contains("box_hi")) cfg.sampling.box_hi = num(s["box_hi"], "sampling.box_hi", path);
    if (s.contains("count")) cfg.sampling.count = static_cast<int>(num(s["count"], "sampling.count", path));
    if (s.contains("fd_step")) cfg.sampling.fd_step = num(s["fd_step"], "sampling.fd_step", path);
    if (s.contains("seed"))
      cfg.sampling.seed = static_cast<std::uint64_t>(num(s["seed"], "sampling.seed", path));
  }
  if (j.contains("solver")) {
    const json& s = j["solver"];
    if (s.contains("max_iter"))
      cfg.solver.max_iter = static_cast<int>(num(s["max_iter"], "solver.max_iter", path));
    if (s.contains("tol_gap_abs"))
      cfg.solver.tol_gap_abs = num(s["tol_gap_abs"], "solver.tol_gap_abs", path);
    if (s.contains("tol_gap_rel"))
      cfg.solver.tol_gap_rel = num(s["tol_gap_rel"], "solver.tol_gap_rel", path);
    if (s.contains("tol_feas")) cfg.solver.tol_feas = num(s["tol_feas"], "solver.tol_feas", path);
    if (s.contains("verbose")) {
      if (!s["verbose"].is_boolean()) fail(path, "'solver.verbose' must be a boolean");
      cfg.solver.verbose = s["verbose"].get<bool>();
    }
  }
  if (j.contains("synthesis")) {
    const json& s = j["synthesis"];
    if (s.contains("theorem1"))
      cfg.theorem1 = parse_synthesis(s["theorem1"], "synthesis.theorem1", path);
    if (s.contains("theorem2"))
      cfg.theorem2 = parse_synthesis(s["theorem2"], "synthesis.theorem2", path);
  }
  if (j.contains("simulation")) {
    const json& s = j["simulation"];
    if (s.contains("dt")) cfg.sim_dt = num(s["dt"], "simulation.dt", path);
    if (s.contains("tau")) cfg.sim_tau = num(s["tau"], "simulation.tau", path);
    if (s.contains("store_stride"))
      cfg.sim_store_stride =
          static_cast<int>(num(s["store_stride"], "simulation.store_stride", path));
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path, const PlantModel& plant,
                             const ScenarioConfig& defaults) {
  const json j = load_json(path);
  ScenarioConfig sc;
  sc.dt = defaults.dt;
  sc.tau = defaults.tau;
  sc.store_stride = defaults.store_stride;
  sc.name = j.contains("name") && j["name"].is_string() ? j["name"].get<std::string>() : path;
  sc.horizon = num(need(j, "horizon", "scenario", path), "horizon", path);
  if (j.contains("dt")) sc.dt = num(j["dt"], "dt", path);
  if (j.contains("tau")) sc.tau = num(j["tau"], "tau", path);
  if (j.contains("store_stride"))
    sc.store_stride = static_cast<int>(num(j["store_stride"], "store_stride", path));
  if (j.contains("fa")) sc.fa = parse_signal_list(j["fa"], "fa", path);
  if (j.contains("fs")) sc.fs = parse_signal_list(j["fs"], "fs", path);
  if (j.contains("w1")) sc.w1 = parse_signal_list(j["w1"], "w1", path);
  if (j.contains("w2")) sc.w2 = parse_signal_list(j["w2"], "w2", path);
  if (j.contains("u")) sc.u = parse_signal_list(j["u"], "u", path);
  if (j.contains("x0")) sc.x0 = parse_vector(j["x0"], "x0", path);
  if (j.contains("eta0")) sc.eta0 = parse_vector(j["eta0"], "eta0", path);
  if (j.contains("fa_hat0")) sc.fa_hat0 = parse_vector(j["fa_hat0"], "fa_hat0", path);
  try {
    sc.validate(plant);
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
  return sc;
}

}  // namespace fauio
