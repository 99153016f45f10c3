#pragma once

// Closed-loop integration of plant + observer + adaptation on a fixed RK4
// grid, scripted fault/disturbance signals with analytic derivatives, and
// the trajectory-level metrics (RMSE, settling, energy certificate).

#include <string>
#include <vector>

#include "fauio/model.hpp"
#include "fauio/synth.hpp"

namespace fauio {

// ---------------------------------------------------------------------------
// Scripted signal algebra: a sum of windowed pieces, each a sum of
// elementary terms. Windows are half-open [t_on, t_off); t_off may be
// infinite. value() and derivative() are analytic inside a window; window
// edges are handled by the integrator's jump detection (for the fault-rate
// channel) and land on grid points by preset construction.
struct SignalTerm {
  enum class Kind { Constant, Ramp, Sin, Cos };
  Kind kind = Kind::Constant;
  double a = 0.0;  // value / slope / amplitude
  double b = 0.0;  // ramp origin, or angular frequency

  double value(double t) const;
  double derivative(double t) const;
};

struct SignalPiece {
  double t_on = 0.0;
  double t_off = 0.0;
  std::vector<SignalTerm> terms;
};

struct Signal {
  std::vector<SignalPiece> pieces;  // empty = identically zero

  double value(double t) const;
  double derivative(double t) const;
  // Window edges strictly inside (0, horizon), sorted, deduplicated.
  std::vector<double> transitions(double horizon) const;

  static Signal zero();
  static Signal constant(double v, double on, double off);
  static Signal ramp(double slope, double origin, double on, double off);
  // amp_sin*sin(w_sin*t) + amp_cos*cos(w_cos*t) on [on, off)
  static Signal sinusoid(double amp_sin, double w_sin, double amp_cos, double w_cos, double on,
                         double off);
};

// ---------------------------------------------------------------------------
struct ScenarioConfig {
  std::string name;
  double horizon = 50.0;
  double dt = 1e-4;
  double tau = 0.0;      // derivative-filter constant; <= 0 resolves to 10*dt
  int store_stride = 10;  // keep every k-th sample in the dense series
  std::vector<Signal> fa;  // a1 channels (empty = zero)
  std::vector<Signal> fs;  // a2 channels
  std::vector<Signal> w1;  // q1 channels
  std::vector<Signal> w2;  // q2 channels
  std::vector<Signal> u;   // s channels
  VectorXd x0, eta0, fa_hat0;  // empty = zeros

  // Throws std::invalid_argument naming the offending field.
  void validate(const PlantModel& plant) const;
};

// Catalog of the bundled robot-arm scenarios:
//   "robot-5.1"    sinusoidal actuator fault on [15,30), sensor ramp on
//                  [5,35), no disturbance
//   "robot-case1"  impulsive ramps (0.1 s windows) with disturbance
//   "robot-case2"  abrupt constant faults with disturbance
//   "robot-case3"  sinusoidal faults with disturbance
ScenarioConfig scenario_preset(const std::string& name);
std::vector<std::string> scenario_preset_names();

// ---------------------------------------------------------------------------
// Energy accounting computed along the run with the storage function carried
// by the gains: P = blkdiag(P1, P2/beta), nu = cond(P), and the running
// integral W(t) = V(t) - V(0) + int_0^t (||e||^2 - mu ||wbar||^2).
struct HInfAccounting {
  bool valid = false;  // gains carried a (P1, P2, mu) certificate
  double mu = 0.0;
  double nu = 0.0;          // lambda_max(P) / lambda_min(P)
  double v0 = 0.0;          // V at t = 0
  double e0_norm2 = 0.0;    // ||e(0)||^2 (full error incl. fault error)
  double energy_e = 0.0;    // rectangle-rule integral of ||e||^2
  double energy_wbar = 0.0; // rectangle-rule integral of ||wbar||^2
  double w_max = 0.0;       // max of the running W integral
};

struct Trajectory {
  // Strided series: one column per stored sample.
  VectorXd t;
  MatrixXd x, eta, zeta_hat, fa, fa_hat, fs, fs_hat, ytilde, e, wbar;
  // Full-rate signed fault-estimation errors (every integrator step),
  // kept for settling-time and RMSE evaluation.
  VectorXd t_full;
  MatrixXd fa_err_full;  // a1 x (nsteps + 1)
  MatrixXd fs_err_full;  // a2 x (nsteps + 1)
  std::vector<double> events_fa, events_fs;  // scripted window edges

  double dt = 0.0, horizon = 0.0, tau = 0.0;
  int store_stride = 1;
  double rmse_fa = 0.0, rmse_fs = 0.0;  // full-horizon values
  HInfAccounting hinf;
  double wall_seconds = 0.0;
};

// Fixed-step RK4 on the coupled plant/observer/adaptation/filter state.
// Deterministic; throws std::runtime_error naming the first step at which
// the state stops being finite.
Trajectory integrate(const PlantModel& plant, const ObserverGains& gains,
                     const ScenarioConfig& scenario);

// ---------------------------------------------------------------------------
enum class ErrorSelector { Actuator, Sensor };

// Root-mean-square of the selected estimation error over samples with
// w0 <= t < w1 (full-rate grid, rectangle rule). Throws on an empty window.
double rmse(const Trajectory& traj, ErrorSelector sel, double w0, double w1);

// First time after event_time at which |error| enters and stays within
// band * (peak after the event) until the next scripted event of the same
// channel (or the end of the horizon).
struct SettlingOutcome {
  enum class Status { Settled, NotSettled, NoSamples };
  Status status = Status::NoSamples;
  double time = 0.0;  // meaningful when Settled
};
SettlingOutcome settling_time(const Trajectory& traj, ErrorSelector sel, double event_time,
                              double band = 0.02);

// Packaged energy certificate: lhs = L2 norm of the estimation error, rhs =
// sqrt(nu*||e0||^2 + mu*||wbar||_L2^2), with nu = cond(P) as documented in
// HInfAccounting.
struct HInfCertificate {
  bool valid = false;
  double nu = 0.0, mu = 0.0;
  double lhs = 0.0, rhs = 0.0;
  double w_max = 0.0;
  double energy_e = 0.0, energy_wbar = 0.0;

  bool pass() const { return valid && lhs <= rhs; }
};
HInfCertificate hinf_check(const Trajectory& traj, const ObserverGains& gains);

// ---------------------------------------------------------------------------
// CSV export of the strided series. First line "# manifest=<tag>", then a
// header row, then one row per stored sample:
//   t, x*, eta*, zeta_hat*, fa*, fa_hat*, fs*, fs_hat*, ytilde*, e*
// (17 significant digits; byte-stable across reruns of the same inputs).
void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const std::string& manifest_tag);

// Four standalone SVG line charts (channel 0 of each series):
//   <prefix>_fa.svg   fault vs estimate (actuator)
//   <prefix>_fs.svg   fault vs estimate (sensor)
//   <prefix>_fat.svg  actuator estimation error
//   <prefix>_fst.svg  sensor estimation error
void write_plots(const std::string& dir, const std::string& prefix, const Trajectory& traj,
                 const std::string& manifest_tag);

}  // namespace fauio
