// Acceptance harness: exercises the full synthesis/validation/simulation
// pipeline on the bundled robot-arm model and prints one PASS/FAIL line per
// acceptance criterion. Exit code = number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fauio/cli.hpp"
#include "fauio/config.hpp"
#include "fauio/matrixio.hpp"
#include "fauio/polytope.hpp"
#include "fauio/sdp.hpp"
#include "fauio/sim.hpp"
#include "fauio/synth.hpp"
#include "robot_fixture.hpp"

using namespace fauio;
using fauio::testing::config_path;
using fauio::testing::robot_config;
using fauio::testing::robot_dist_config;
using fauio::testing::scratch_dir;
using fauio::testing::thm1_instance;
using fauio::testing::thm2_instance;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": " << detail
            << std::endl;
  if (!pass) ++g_failures;
}

void run_criterion(int criterion, const std::function<void(int)>& body) {
  try {
    body(criterion);
  } catch (const std::exception& e) {
    report(criterion, false, std::string("exception: ") + e.what());
  }
}

struct Solved {
  AssembledProblem prob;
  SdpSolution sol;
  double seconds = 0.0;
};

Solved timed_solve(const ProblemSpec& spec, const SolverSettings& settings) {
  Solved out{build_problem(spec), {}, 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  out.sol = solve(out.prob, settings);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Largest |signal| over a time window, sampled on a fine grid.
double window_amplitude(const std::vector<Signal>& channels, double t0, double t1) {
  double amp = 0.0;
  const int steps = 20000;
  for (int k = 0; k < steps; ++k) {
    const double t = t0 + (t1 - t0) * k / steps;
    for (const auto& s : channels) amp = std::max(amp, std::abs(s.value(t)));
  }
  return amp;
}

double window_max_abs(const VectorXd& t, const MatrixXd& err, double t0, double t1) {
  double m = 0.0;
  for (Eigen::Index k = 0; k < t.size(); ++k)
    if (t(k) >= t0 && t(k) < t1) m = std::max(m, err.col(k).cwiseAbs().maxCoeff());
  return m;
}

}  // namespace

int main() {
  const ToolConfig cfg1 = robot_config();
  const ToolConfig cfg2 = robot_dist_config();

  // Shared synthesis artifacts, populated by the early criteria.
  Solved cert1, cert2, des1, des2;
  ObserverGains gains1, gains2;
  bool have_cert1 = false, have_cert2 = false, have_gains1 = false, have_gains2 = false;
  Trajectory traj51;
  bool have_51 = false;
  std::map<int, Trajectory> case_traj;

  // 1: nominal-form certificate instance is feasible with a tight attenuation
  //    level, inside the time budget.
  run_criterion(1, [&](int c) {
    auto inst = thm1_instance(cfg1, true);
    cert1 = timed_solve(inst.spec, cfg1.solver);
    have_cert1 = cert1.sol.status == "optimal";
    const bool pass =
        have_cert1 && cert1.sol.sqrt_mu <= 1e-3 && cert1.seconds <= 60.0;
    report(c, pass,
           "nominal certificate: status=" + cert1.sol.status +
               " sqrt_mu=" + fmt(cert1.sol.sqrt_mu) + " (<= 0.001), solve " +
               fmt(cert1.seconds) + " s (<= 60)");
  });

  // 2: disturbance-form certificate instance (published channel weights).
  run_criterion(2, [&](int c) {
    auto inst = thm2_instance(cfg2, true);
    cert2 = timed_solve(inst.spec, cfg2.solver);
    have_cert2 = cert2.sol.status == "optimal";
    const bool pass =
        have_cert2 && cert2.sol.sqrt_mu <= 0.05 && cert2.seconds <= 120.0;
    report(c, pass,
           "disturbance certificate: status=" + cert2.sol.status +
               " sqrt_mu=" + fmt(cert2.sol.sqrt_mu) + " (<= 0.05), solve " +
               fmt(cert2.seconds) + " s (<= 120)");
  });

  // 3: independent residual re-verification of both certificates.
  run_criterion(3, [&](int c) {
    if (!have_cert1 || !have_cert2) {
      report(c, false, "skipped: a certificate instance did not solve");
      return;
    }
    double worst_ratio = -1e300;
    bool pass = true;
    for (const Solved* s : {&cert1, &cert2}) {
      const CertificateCheck chk = verify_certificate(s->prob, s->sol.x, 0.0, 1e-6);
      pass = pass && chk.all_pass();
      pass = pass && chk.min_eig_P1 > 0.0 && chk.min_eig_P2 > 0.0 && chk.min_eig_Z > 0.0;
      for (const auto& row : chk.rows) worst_ratio = std::max(worst_ratio, row.ratio);
    }
    report(c, pass,
           "vertex residuals lambda_max <= 1e-6 * ||constraint|| on both instances, "
           "P1/P2/Z positive definite; worst ratio " +
               fmt(worst_ratio));
  });

  // 4: gain recovery identities and vertex closed-loop spectra for both
  //    design instances.
  run_criterion(4, [&](int c) {
    auto inst1 = thm1_instance(cfg1, false);
    des1 = timed_solve(inst1.spec, cfg1.solver);
    auto inst2 = thm2_instance(cfg2, false);
    des2 = timed_solve(inst2.spec, cfg2.solver);
    if (des1.sol.status != "optimal" || des2.sol.status != "optimal") {
      report(c, false,
             "design solves: nominal=" + des1.sol.status + " disturbance=" + des2.sol.status);
      return;
    }
    gains1 = recover_gains(inst1.desc, inst1.spec.L1, inst1.spec.F, des1.sol.blocks,
                           inst1.spec.beta, des1.sol.mu);
    gains2 = recover_gains(inst2.desc, inst2.spec.L1, inst2.spec.F, des2.sol.blocks,
                           inst2.spec.beta, des2.sol.mu);
    have_gains1 = have_gains2 = true;

    bool pass = true;
    double worst_match = 0.0, worst_re = -1e300;
    const std::vector<std::pair<const fauio::testing::Instance*, const ObserverGains*>> designs =
        {{&inst1, &gains1}, {&inst2, &gains2}};
    for (const auto& [inst, gains] : designs) {
      const auto& d = inst->desc;
      const double match =
          (gains->L1 * d.T + gains->F * d.C_bar - MatrixXd::Identity(d.n_new, d.n_new)).norm();
      worst_match = std::max(worst_match, match);
      pass = pass && match <= 1e-8;
      const MatrixXd N_ref = gains->L1 * d.A_zeta - gains->K * d.C_bar;
      const MatrixXd J_ref = N_ref * gains->F + gains->K;
      pass = pass && (gains->N - N_ref).cwiseAbs().maxCoeff() <=
                         1e-12 * std::max(1.0, N_ref.cwiseAbs().maxCoeff());
      pass = pass && (gains->J - J_ref).cwiseAbs().maxCoeff() <=
                         1e-12 * std::max(1.0, J_ref.cwiseAbs().maxCoeff());
      for (const auto& v : enumerate_vertices(inst->spec.bounds).vertices) {
        const double re = max_real_eig(ideal_error_matrix(d, *gains, v));
        worst_re = std::max(worst_re, re);
        pass = pass && re < 0.0;
      }
    }
    report(c, pass,
           "matching residual " + fmt(worst_match) +
               " (<= 1e-8), N/J identities exact, every vertex error matrix Hurwitz "
               "(max Re " +
               fmt(worst_re) + ")");
  });

  // 5: baseline fault scenario: convergence inside every inter-transition
  //    segment, clean estimates once the faults vanish, visible transients at
  //    the fault edges.
  run_criterion(5, [&](int c) {
    if (!have_gains1) {
      report(c, false, "skipped: nominal design gains unavailable");
      return;
    }
    const ScenarioConfig sc = scenario_preset("robot-5.1");
    traj51 = integrate(cfg1.plant, gains1, sc);
    have_51 = true;

    // Segment boundaries = union of fault window edges.
    std::vector<double> edges;
    for (const auto& s : sc.fa) {
      const auto e = s.transitions(sc.horizon);
      edges.insert(edges.end(), e.begin(), e.end());
    }
    for (const auto& s : sc.fs) {
      const auto e = s.transitions(sc.horizon);
      edges.insert(edges.end(), e.begin(), e.end());
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    bool pass = true;
    std::string seg_note;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const double a = edges[i];
      const double b = i + 1 < edges.size() ? edges[i + 1] : sc.horizon;
      double amp = window_amplitude(sc.fa, a, b);
      amp = std::max(amp, window_amplitude(sc.fs, a, b));
      if (amp <= 0.0) continue;  // fault-free tail handled below
      // Terminal errors of the segment: last 2% of its duration.
      const double t_end = b - 0.02 * (b - a);
      const double fa_tail = window_max_abs(traj51.t_full, traj51.fa_err_full, t_end, b);
      const double fs_tail = window_max_abs(traj51.t_full, traj51.fs_err_full, t_end, b);
      const bool ok = fa_tail < 0.05 * amp && fs_tail < 0.05 * amp;
      pass = pass && ok;
      seg_note += " [" + fmt(a) + "," + fmt(b) + "): tail " + fmt(std::max(fa_tail, fs_tail)) +
                  " vs 5% of " + fmt(amp) + (ok ? "" : " <-- FAIL");
    }

    // Faults are gone after t = 35; by the final second both estimates are
    // numerically clean.
    const double quiet_fa = window_max_abs(traj51.t_full, traj51.fa_err_full, 49.0, 50.1);
    const double quiet_fs = window_max_abs(traj51.t_full, traj51.fs_err_full, 49.0, 50.1);
    pass = pass && quiet_fa <= 1e-6 && quiet_fs <= 1e-6;

    // Qualitative estimation transients right after the fault edges.
    const double spike_fa = window_max_abs(traj51.t_full, traj51.fa_err_full, 15.0, 15.2);
    const double spike_fs = window_max_abs(traj51.t_full, traj51.fs_err_full, 5.0, 5.2);
    pass = pass && spike_fa >= 0.5 && spike_fs >= 0.5;

    report(c, pass,
           "segment tails" + seg_note + "; quiet tail " + fmt(std::max(quiet_fa, quiet_fs)) +
               " (<= 1e-6); edge transients fa " + fmt(spike_fa) + " / fs " + fmt(spike_fs) +
               " (>= 0.5)");
  });

  // 6: the three disturbance cases beat the published accuracy row with
  //    margin, inside the per-run time budget.
  run_criterion(6, [&](int c) {
    if (!have_gains2) {
      report(c, false, "skipped: disturbance design gains unavailable");
      return;
    }
    const double gate_fa[3] = {0.016, 0.068, 0.038};
    const double gate_fs[3] = {0.0156, 0.059, 0.024};
    const double published_fa[3] = {0.196, 0.116, 0.121};
    const double published_fs[3] = {0.110, 0.105, 0.102};
    bool pass = true;
    std::string note;
    for (int k = 0; k < 3; ++k) {
      const ScenarioConfig sc = scenario_preset("robot-case" + std::to_string(k + 1));
      Trajectory traj = integrate(cfg2.plant, gains2, sc);
      const bool ok = traj.rmse_fa <= gate_fa[k] && traj.rmse_fs <= gate_fs[k] &&
                      traj.rmse_fa < published_fa[k] && traj.rmse_fs < published_fs[k] &&
                      traj.wall_seconds <= 60.0;
      pass = pass && ok;
      note += " case" + std::to_string(k + 1) + ": rmse_fa=" + fmt(traj.rmse_fa) +
              " (<= " + fmt(gate_fa[k]) + ") rmse_fs=" + fmt(traj.rmse_fs) + " (<= " +
              fmt(gate_fs[k]) + ") wall=" + fmt(traj.wall_seconds) + "s" + (ok ? "" : " <-- FAIL");
      case_traj[k + 1] = std::move(traj);
    }
    report(c, pass, "published comparison row dominated;" + note);
  });

  // 7: trajectory-level energy certificate and settling on the three cases.
  run_criterion(7, [&](int c) {
    if (case_traj.size() != 3) {
      report(c, false, "skipped: case trajectories unavailable");
      return;
    }
    bool pass = true;
    std::string note;
    for (auto& [k, traj] : case_traj) {
      const HInfCertificate hc = hinf_check(traj, gains2);
      bool ok = hc.valid && hc.lhs <= hc.rhs;
      ok = ok && hc.w_max <= 1e-3 * hc.energy_e;
      double worst_settle = 0.0;
      const std::vector<std::pair<ErrorSelector, const std::vector<double>*>> channels = {
          {ErrorSelector::Actuator, &traj.events_fa}, {ErrorSelector::Sensor, &traj.events_fs}};
      for (const auto& [sel, events] : channels) {
        if (events->empty()) continue;
        const SettlingOutcome so = settling_time(traj, sel, events->back());
        ok = ok && so.status == SettlingOutcome::Status::Settled && so.time < 0.5;
        if (so.status == SettlingOutcome::Status::Settled)
          worst_settle = std::max(worst_settle, so.time);
      }
      pass = pass && ok;
      note += " case" + std::to_string(k) + ": lhs=" + fmt(hc.lhs) + " rhs=" + fmt(hc.rhs) +
              " w_max=" + fmt(hc.w_max) + " settle<=" + fmt(worst_settle) + "s" +
              (ok ? "" : " <-- FAIL");
    }
    report(c, pass, "energy bound holds, running integral stays down, settling finite;" + note);
  });

  // 8: foundations: secant decomposition, integrator order, vertex convexity,
  //    exact round trips.
  run_criterion(8, [&](int c) {
    bool pass = true;
    std::string note;

    // Secant decomposition of the robot nonlinearity, 1000 random pairs.
    const ConditionReport dec =
        verify_decomposition(cfg1.plant.nonlinearity, cfg1.plant.H, cfg1.plant.lipschitz_bounds,
                             1000, cfg1.sampling);
    pass = pass && dec.all_pass();
    note += std::string("decomposition 1000 pairs ") + (dec.all_pass() ? "clean" : "VIOLATED");

    // Integrator order on a smooth scenario (errors vs a dt = 1e-5 reference).
    {
      const DescriptorModel desc = augment_descriptor(cfg1.plant);
      auto [L1, F] = compute_L1_F(desc);
      ObserverGains g;
      g.L1 = L1;
      g.F = F;
      g.K = MatrixXd::Zero(desc.n_new, desc.p);
      g.L2 = MatrixXd::Zero(desc.a1, desc.p);
      g.N = L1 * desc.A_zeta;
      g.J = g.N * F;
      g.beta = 100.0;
      auto run = [&](double dt) {
        ScenarioConfig sc;
        sc.name = "order";
        sc.horizon = 2.0;
        sc.dt = dt;
        sc.tau = 1e-3;
        sc.store_stride = 1;
        sc.fa = {Signal::sinusoid(1.0, 0.5, 0.0, 0.0, 0.0, 1e30)};
        sc.x0 = (VectorXd(4) << 0.05, 0.0, -0.02, 0.01).finished();
        const Trajectory traj = integrate(cfg1.plant, g, sc);
        VectorXd fin(9);
        fin << traj.x.col(traj.x.cols() - 1), traj.eta.col(traj.eta.cols() - 1);
        return fin;
      };
      const VectorXd ref = run(1e-5);
      const double e1 = (run(1e-3) - ref).norm();
      const double e2 = (run(5e-4) - ref).norm();
      const double e3 = (run(2.5e-4) - ref).norm();
      const double r1 = e1 / e2, r2 = e2 / e3;
      pass = pass && r1 >= 8.0 && r2 >= 8.0;
      note += "; step-halving ratios " + fmt(r1) + ", " + fmt(r2) + " (>= 8)";
    }

    // Interior points of the coefficient box stay feasible at the solved
    // certificate, and the constraint is affine along the box.
    if (have_cert1) {
      DetRng rng(4242);
      const MatrixXd& bounds = cfg1.plant.lipschitz_bounds;
      auto inst = thm1_instance(cfg1, true);
      const auto& layout = cert1.prob.layout;
      MatrixXd eval0, eval1;
      for (const auto& con : cert1.prob.constraints) {
        if (con.name == "vertex-0") eval0 = con.expr.evaluate(cert1.sol.x);
        if (con.name == "vertex-1") eval1 = con.expr.evaluate(cert1.sol.x);
      }
      double worst = -1e300, worst_aff = 0.0;
      for (int trial = 0; trial < 50; ++trial) {
        MatrixXd h = bounds;
        for (Eigen::Index i = 0; i < h.rows(); ++i)
          for (Eigen::Index j = 0; j < h.cols(); ++j)
            if (h(i, j) > 0.0) h(i, j) *= rng.uniform(0.0, 1.0);
        const AffineMatrixExpr e = assemble_thm1(inst.desc, inst.spec.L1, layout, h,
                                                 inst.spec.epsilon, inst.spec.beta, 0.0,
                                                 cert1.prob.mu);
        const MatrixXd em = e.evaluate(cert1.sol.x);
        const MatrixXd sym = 0.5 * (em + em.transpose());
        worst = std::max(worst, sym_eig_max(sym) / sym.norm());
        // Affinity along the single free slot: E(h) is the matching convex
        // combination of the vertex evaluations.
        const double theta = h(0, 0) / bounds(0, 0);
        const MatrixXd mix = (1.0 - theta) * eval0 + theta * eval1;
        worst_aff = std::max(worst_aff,
                             (em - mix).cwiseAbs().maxCoeff() /
                                 std::max(1.0, mix.cwiseAbs().maxCoeff()));
      }
      pass = pass && worst <= 1e-6 && worst_aff <= 1e-10;
      note += "; 50 interior points feasible (worst ratio " + fmt(worst) +
              "), affine-combination deviation " + fmt(worst_aff);
    } else {
      pass = false;
      note += "; interior-point check skipped (no certificate)";
    }

    // Exact round trips: decision packing and pseudo-inverse identities.
    {
      DetRng rng(99);
      const DecisionLayout layout(5, 1, 3, 1, 4, DecisionLayout::ScalarKind::Mu);
      VectorXd x(layout.nvar());
      for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.uniform(-2.0, 2.0);
      const double pack_err = (layout.pack(layout.unpack(x)) - x).cwiseAbs().maxCoeff();
      const MatrixXd A = rng.uniform_matrix(5, 3, -1.0, 1.0);
      const MatrixXd Ap = pinv(A);
      const double pinv_err = std::max((A * Ap * A - A).cwiseAbs().maxCoeff(),
                                       (Ap * A * Ap - Ap).cwiseAbs().maxCoeff());
      pass = pass && pack_err <= 1e-10 && pinv_err <= 1e-10;
      note += "; pack/unpack deviation " + fmt(pack_err) + ", pinv identity deviation " +
              fmt(pinv_err);
    }

    report(c, pass, note);
  });

  // 9: the whole pipeline is bit-reproducible: identical command sequences in
  //    two directories give byte-identical data files.
  run_criterion(9, [&](int c) {
    namespace fsys = std::filesystem;
    const std::string dir_a = scratch_dir("accept_rep_a");
    const std::string dir_b = scratch_dir("accept_rep_b");

    auto run_pipeline = [&](const std::string& dir) {
      int rc = 0;
      rc |= cli_main({"synth", "--config", config_path("robot_arm.json"), "--theorem", "1",
                      "--out-dir", dir});
      rc |= cli_main({"simulate", "--config", config_path("robot_arm.json"), "--gains",
                      dir + "/gains_thm1.txt", "--scenario", "robot-5.1", "--out-dir", dir});
      rc |= cli_main({"synth", "--config", config_path("robot_arm_dist.json"), "--theorem", "2",
                      "--out-dir", dir});
      rc |= cli_main({"simulate", "--config", config_path("robot_arm_dist.json"), "--gains",
                      dir + "/gains_thm2.txt", "--scenario", "robot-case1", "--out-dir", dir});
      return rc;
    };
    const int rc_a = run_pipeline(dir_a);
    const int rc_b = run_pipeline(dir_b);
    if (rc_a != 0 || rc_b != 0) {
      report(c, false, "pipeline runs returned " + std::to_string(rc_a) + " / " +
                           std::to_string(rc_b));
      return;
    }

    auto csv_files = [](const std::string& dir) {
      std::vector<std::string> names;
      for (const auto& entry : fsys::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.size() > 4 && name.substr(name.size() - 4) == ".csv") names.push_back(name);
      }
      std::sort(names.begin(), names.end());
      return names;
    };
    auto slurp = [](const std::string& path) {
      std::ifstream is(path, std::ios::binary);
      std::ostringstream os;
      os << is.rdbuf();
      return os.str();
    };

    const auto names_a = csv_files(dir_a);
    const auto names_b = csv_files(dir_b);
    bool pass = names_a == names_b && !names_a.empty();
    int mismatches = 0;
    if (pass)
      for (const auto& name : names_a)
        if (slurp(dir_a + "/" + name) != slurp(dir_b + "/" + name)) {
          ++mismatches;
          pass = false;
        }
    report(c, pass,
           std::to_string(names_a.size()) + " data files per run, " +
               (pass ? "all byte-identical across the two runs"
                     : std::to_string(mismatches) + " files differ (or file sets differ)"));
  });

  std::cout << (g_failures == 0 ? "all criteria passed" : std::to_string(g_failures) +
                                                              " criteria failed")
            << std::endl;
  return g_failures;
}
