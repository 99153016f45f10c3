#include "fauio/sdp.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "fauio/matrixio.hpp"

// C ABI of the bundled conic solver (solver/src/lib.rs).
extern "C" {

struct ShimSettings {
  std::uint32_t max_iter;
  double tol_gap_abs;
  double tol_gap_rel;
  double tol_feas;
  std::int32_t verbose;
};

struct ShimResult {
  std::int32_t status;
  double obj;
  std::uint32_t iterations;
  double r_prim;
  double r_dual;
};

std::int32_t conic_shim_solve(std::size_t nvar, const double* q, std::size_t nrows,
                              const std::size_t* a_colptr, const std::size_t* a_rowidx,
                              const double* a_vals, const double* b, std::size_t ncones,
                              const std::int32_t* cone_tags, const std::size_t* cone_dims,
                              const ShimSettings* settings, double* x_out, ShimResult* result);

}  // extern "C"

namespace fauio {

namespace {

std::string map_status(int code) {
  switch (code) {
    case 0:
    case 1:
      return "optimal";  // solved / almost-solved
    case 2:
      return "infeasible";
    default:
      return "numerical-failure";
  }
}

}  // namespace

ConeSolution solve_cone_program(const ConeProgram& prog, const SolverSettings& settings) {
  if (prog.nvar <= 0) throw std::invalid_argument("solve_cone_program: empty program");
  if (prog.q.size() != prog.nvar || prog.A.cols() != prog.nvar)
    throw std::invalid_argument("solve_cone_program: objective/matrix width mismatch");
  int rows = 0;
  for (const auto& c : prog.cones) rows += c.rows();
  if (rows != prog.nrows() || prog.A.rows() != prog.nrows())
    throw std::invalid_argument("solve_cone_program: cone rows do not match b");

  Eigen::SparseMatrix<double> A = prog.A;
  A.makeCompressed();
  const int nvar = prog.nvar;
  std::vector<std::size_t> colptr(nvar + 1), rowidx(A.nonZeros());
  for (int k = 0; k <= nvar; ++k) colptr[k] = static_cast<std::size_t>(A.outerIndexPtr()[k]);
  for (Eigen::Index k = 0; k < A.nonZeros(); ++k)
    rowidx[k] = static_cast<std::size_t>(A.innerIndexPtr()[k]);

  std::vector<std::int32_t> tags;
  std::vector<std::size_t> dims;
  tags.reserve(prog.cones.size());
  dims.reserve(prog.cones.size());
  for (const auto& c : prog.cones) {
    tags.push_back(static_cast<std::int32_t>(c.tag));
    dims.push_back(static_cast<std::size_t>(c.dim));
  }

  ShimSettings set{static_cast<std::uint32_t>(settings.max_iter), settings.tol_gap_abs,
                   settings.tol_gap_rel, settings.tol_feas, settings.verbose ? 1 : 0};
  ShimResult res{};
  ConeSolution out;
  out.x = VectorXd::Zero(nvar);

  const auto t0 = std::chrono::steady_clock::now();
  const std::int32_t rc = conic_shim_solve(
      static_cast<std::size_t>(nvar), prog.q.data(), static_cast<std::size_t>(prog.nrows()),
      colptr.data(), rowidx.data(), A.valuePtr(), prog.b.data(), prog.cones.size(), tags.data(),
      dims.data(), &set, out.x.data(), &res);
  const auto t1 = std::chrono::steady_clock::now();
  if (rc != 0)
    throw std::runtime_error("solve_cone_program: solver rejected the program (code " +
                             std::to_string(rc) + ")");

  out.solve_seconds = std::chrono::duration<double>(t1 - t0).count();
  out.solver_status = res.status;
  out.status = map_status(res.status);
  out.objective = res.obj;
  out.iterations = static_cast<int>(res.iterations);
  out.r_prim = res.r_prim;
  out.r_dual = res.r_dual;
  return out;
}

SdpSolution solve(const AssembledProblem& prob, const SolverSettings& settings) {
  const ConeSolution raw = solve_cone_program(lower_to_cone(prob), settings);
  SdpSolution out;
  out.status = raw.status;
  out.solver_status = raw.solver_status;
  out.x = raw.x;
  out.objective = raw.objective;
  out.iterations = raw.iterations;
  out.r_prim = raw.r_prim;
  out.r_dual = raw.r_dual;
  out.solve_seconds = raw.solve_seconds;
  out.blocks = prob.layout.unpack(raw.x);
  out.mu = prob.mu.var >= 0 ? raw.x(prob.mu.var) : prob.mu.value;
  out.sqrt_mu = std::sqrt(std::max(out.mu, 0.0));
  return out;
}

CertificateCheck verify_certificate(const AssembledProblem& prob, const VectorXd& x,
                                    double tol_abs, double tol_rel) {
  CertificateCheck out;
  for (const auto& c : prob.constraints) {
    if (!c.is_vertex) continue;
    const MatrixXd e = c.expr.evaluate(x);
    const MatrixXd s = 0.5 * (e + e.transpose());
    const double lam = sym_eig_max(s);
    const double norm = e.norm();
    VertexResidual row;
    row.name = c.name;
    row.vertex = c.vertex_index;
    row.lambda_max = lam;
    row.norm = norm;
    row.ratio = norm > 0.0 ? lam / norm : lam;
    out.rows.push_back(row);
    const double tol = tol_abs + tol_rel * norm;
    out.report.add(c.name + " lambda-max", lam <= tol, tol - lam,
                   "lambda_max=" + fmt17(lam) + " norm=" + fmt17(norm));
  }
  const auto as = prob.layout.unpack(x);
  out.min_eig_P1 = sym_eig_min(as.P1);
  out.min_eig_P2 = sym_eig_min(as.P2);
  out.min_eig_Z = sym_eig_min(as.Z);
  out.report.add("P1 positive definite", out.min_eig_P1 > 0.0, out.min_eig_P1,
                 "min eig " + fmt17(out.min_eig_P1));
  out.report.add("P2 positive definite", out.min_eig_P2 > 0.0, out.min_eig_P2,
                 "min eig " + fmt17(out.min_eig_P2));
  out.report.add("Z positive definite", out.min_eig_Z > 0.0, out.min_eig_Z,
                 "min eig " + fmt17(out.min_eig_Z));
  return out;
}

std::string certificate_to_csv(const CertificateCheck& check) {
  std::ostringstream os;
  os << "constraint,vertex,lambda_max,norm,ratio\n";
  for (const auto& r : check.rows)
    os << r.name << ',' << r.vertex << ',' << fmt17(r.lambda_max) << ',' << fmt17(r.norm) << ','
       << fmt17(r.ratio) << '\n';
  return os.str();
}

const SearchEntry& SearchResult::best() const {
  if (best_index < 0 || best_index >= static_cast<int>(table.size()))
    throw std::logic_error("SearchResult::best: no feasible grid point");
  return table[static_cast<std::size_t>(best_index)];
}

SearchResult scalar_search(const ProblemSpec& base, const std::vector<double>& eps_grid,
                           const std::vector<double>& delta_grid,
                           const SolverSettings& settings) {
  if (eps_grid.empty()) throw std::invalid_argument("scalar_search: epsilon grid is empty");
  std::vector<double> dgrid = delta_grid;
  if (base.theorem == 1)
    dgrid = {base.delta};  // delta plays no role in theorem 1
  else if (dgrid.empty())
    throw std::invalid_argument("scalar_search: theorem 2 requires a delta grid");

  SearchResult out;
  for (double eps : eps_grid) {
    for (double delta : dgrid) {
      ProblemSpec spec = base;
      spec.epsilon = eps;
      spec.delta = delta;
      const SdpSolution sol = solve(build_problem(spec), settings);
      SearchEntry entry{eps, delta, sol.status, sol.mu, sol.sqrt_mu, sol.solve_seconds};
      out.table.push_back(entry);
      if (sol.status != "optimal") continue;
      if (out.best_index < 0) {
        out.best_index = static_cast<int>(out.table.size()) - 1;
        continue;
      }
      const SearchEntry& cur = out.table[static_cast<std::size_t>(out.best_index)];
      const auto key = [](const SearchEntry& s) {
        return std::make_tuple(s.sqrt_mu, s.epsilon, s.delta);
      };
      if (key(entry) < key(cur)) out.best_index = static_cast<int>(out.table.size()) - 1;
    }
  }
  return out;
}

std::string search_to_csv(const SearchResult& result) {
  std::ostringstream os;
  // solve_seconds stays out of the CSV so repeated runs emit identical bytes.
  os << "epsilon,delta,status,mu,sqrt_mu\n";
  for (const auto& e : result.table)
    os << fmt17(e.epsilon) << ',' << fmt17(e.delta) << ',' << e.status << ',' << fmt17(e.mu)
       << ',' << fmt17(e.sqrt_mu) << '\n';
  return os.str();
}

}  // namespace fauio
