#pragma once

#include <optional>
#include <string>

#include "fauio/lmi.hpp"
#include "fauio/model.hpp"
#include "fauio/polytope.hpp"
#include "fauio/sdp.hpp"
#include "fauio/sim.hpp"

namespace fauio {

// Per-theorem synthesis settings as loaded from the config file. The
// certificate instance is solved with `epsilon`/`beta` (plus `delta` and the
// masked channels for the disturbance-attenuation form); the design instance
// additionally applies `design`.
struct SynthesisBlock {
  double epsilon = 0.1;
  double beta = 100.0;
  double delta = 0.0;              // disturbance form only
  bool has_delta = false;          // whether the file actually set delta
  VectorXd certificate_channels;   // width 2q+a1 mask; empty = all ones
  DesignSpec design;
};

struct ToolConfig {
  int schema_version = 1;
  std::string name;
  PlantModel plant;
  SamplingPlan sampling;
  SolverSettings solver;
  std::optional<SynthesisBlock> theorem1;
  std::optional<SynthesisBlock> theorem2;
  double sim_dt = 1e-4;
  double sim_tau = 0.0;  // <= 0: resolved to 10*dt at integration time
  int sim_store_stride = 10;
};

// Parses and dimension-checks a model/config file. Diagnostics name the
// offending field. Rank-level assumptions are NOT enforced here; run the
// validation pass for those.
ToolConfig load_config(const std::string& path);

// Scenario script file: name, horizon, optional dt/tau/store_stride, and per
// signal (fa, fs, w1, w2, u) a list of channels, each channel a list of
// pieces {"window": [on, off], "terms": [...]}. "off" may be the string
// "inf". Term kinds: constant{value}, ramp{slope, origin}, sin{amp, freq},
// cos{amp, freq}. Optional x0/eta0/fa_hat0 arrays. Fields the file omits
// fall back to `defaults` (dt, tau, store_stride).
ScenarioConfig load_scenario(const std::string& path, const PlantModel& plant,
                             const ScenarioConfig& defaults = {});

}  // namespace fauio
