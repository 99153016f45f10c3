#pragma once

// Conic solve of the assembled synthesis problems plus independent
// certificate re-verification and the (epsilon, delta) grid search.

#include <string>
#include <vector>

#include "fauio/lmi.hpp"
#include "fauio/report.hpp"

namespace fauio {

struct SolverSettings {
  int max_iter = 200;
  double tol_gap_abs = 1e-8;
  double tol_gap_rel = 1e-8;
  double tol_feas = 1e-8;
  bool verbose = false;
};

// Raw outcome of one conic solve. status is one of
//   "optimal"            solved (including the almost-solved grade)
//   "infeasible"         primal infeasibility certificate found
//   "numerical-failure"  no conclusion (dual infeasible, iteration cap, NaN)
struct ConeSolution {
  std::string status;
  int solver_status = -1;  // raw solver status code
  VectorXd x;
  double objective = 0.0;
  int iterations = 0;
  double r_prim = 0.0;
  double r_dual = 0.0;
  double solve_seconds = 0.0;
};

ConeSolution solve_cone_program(const ConeProgram& prog, const SolverSettings& settings = {});

// Structured solution of an assembled problem: the cone solve plus the
// unpacked decision blocks and the mu actually present in the vertex LMIs
// (the optimized variable for MinMu, the fixed value otherwise).
struct SdpSolution {
  std::string status;
  int solver_status = -1;
  DecisionLayout::Assignment blocks;
  double mu = 0.0;
  double sqrt_mu = 0.0;
  double objective = 0.0;  // minimized objective (mu or kappa)
  VectorXd x;
  int iterations = 0;
  double r_prim = 0.0;
  double r_dual = 0.0;
  double solve_seconds = 0.0;
};

SdpSolution solve(const AssembledProblem& prob, const SolverSettings& settings = {});

// One row per vertex constraint, recomputed from the pre-lowering
// expressions (independent of the solver's own residuals).
struct VertexResidual {
  std::string name;
  int vertex = -1;
  double lambda_max = 0.0;
  double norm = 0.0;  // Frobenius norm of the evaluated constraint
  double ratio = 0.0; // lambda_max / norm
};

struct CertificateCheck {
  ConditionReport report;
  std::vector<VertexResidual> rows;
  double min_eig_P1 = 0.0;
  double min_eig_P2 = 0.0;
  double min_eig_Z = 0.0;

  bool all_pass() const { return report.all_pass(); }
};

// Re-evaluates every vertex LMI at x and accepts lambda_max <= tol_abs +
// tol_rel * ||E||_F; also requires P1, P2 and Z positive definite.
CertificateCheck verify_certificate(const AssembledProblem& prob, const VectorXd& x,
                                    double tol_abs = 1e-7, double tol_rel = 0.0);

// CSV dump of the residual rows: constraint,vertex,lambda_max,norm,ratio.
std::string certificate_to_csv(const CertificateCheck& check);

// Grid search over the scalar synthesis knobs. Every grid point is solved
// and recorded; the feasible point with the smallest sqrt(mu) wins, ties
// broken toward smaller epsilon, then smaller delta. Theorem 1 ignores the
// delta grid (pass {}).
struct SearchEntry {
  double epsilon = 0.0;
  double delta = 0.0;
  std::string status;
  double mu = 0.0;
  double sqrt_mu = 0.0;
  double solve_seconds = 0.0;
};

struct SearchResult {
  std::vector<SearchEntry> table;
  int best_index = -1;  // -1 when no grid point was feasible

  bool any_feasible() const { return best_index >= 0; }
  const SearchEntry& best() const;
};

SearchResult scalar_search(const ProblemSpec& base, const std::vector<double>& eps_grid,
                           const std::vector<double>& delta_grid = {},
                           const SolverSettings& settings = {});

// CSV dump of the grid: epsilon,delta,status,mu,sqrt_mu. Timing stays out
// so reruns of the same grid emit identical bytes.
std::string search_to_csv(const SearchResult& result);

}  // namespace fauio
