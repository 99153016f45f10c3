#include "fauio/model.hpp"

#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

namespace fauio {

VectorXd NonlinearityEvaluator::eval(const std::vector<VectorXd>& args) const {
  if (static_cast<int>(args.size()) != m)
    throw std::invalid_argument("nonlinearity '" + name + "': expected " + std::to_string(m) +
                                " argument vectors, got " + std::to_string(args.size()));
  for (const auto& a : args)
    if (a.size() != nbar)
      throw std::invalid_argument("nonlinearity '" + name + "': argument length " +
                                  std::to_string(a.size()) + ", expected " + std::to_string(nbar));
  VectorXd out = g(args);
  if (out.size() != m)
    throw std::runtime_error("nonlinearity '" + name + "' returned wrong output size");
  return out;
}

NonlinearityEvaluator make_nonlinearity(const std::string& name, int m, int nbar) {
  NonlinearityEvaluator ev;
  ev.name = name;
  ev.m = m;
  ev.nbar = nbar;
  if (name == "sin_v1") {
    if (m != 1)
      throw std::invalid_argument("nonlinearity 'sin_v1' requires m = 1, got " + std::to_string(m));
    ev.g = [](const std::vector<VectorXd>& args) {
      VectorXd out(1);
      out(0) = std::sin(args[0](0));
      return out;
    };
  } else if (name == "zero") {
    ev.g = [m](const std::vector<VectorXd>&) { return VectorXd::Zero(m); };
  } else {
    throw std::invalid_argument("unknown nonlinearity '" + name + "' (registry: sin_v1, zero)");
  }
  return ev;
}

void PlantModel::check_dimensions() const {
  const int nn = n();
  auto need = [&](bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw std::invalid_argument("plant '" + name + "': " + field + " " + what);
  };
  need(A.rows() == A.cols(), "A", "must be square");
  need(B.rows() == nn, "B", "row count must equal n=" + std::to_string(nn));
  need(C.cols() == nn, "C", "column count must equal n=" + std::to_string(nn));
  need(G.rows() == nn, "G", "row count must equal n=" + std::to_string(nn));
  need(E_f.rows() == nn, "E_f", "row count must equal n=" + std::to_string(nn));
  need(D_f.rows() == p(), "D_f", "row count must equal p=" + std::to_string(p()));
  if (q1() > 0) need(E1.rows() == nn, "E1", "row count must equal n=" + std::to_string(nn));
  if (q2() > 0) need(D1.rows() == p(), "D1", "row count must equal p=" + std::to_string(p()));
  need(static_cast<int>(H.size()) == m(), "H",
       "must list one selector per nonlinearity component (m=" + std::to_string(m()) + ")");
  for (std::size_t i = 0; i < H.size(); ++i) {
    need(H[i].cols() == nn, "H[" + std::to_string(i) + "]",
         "column count must equal n=" + std::to_string(nn));
    need(H[i].rows() == nbar(), "H[" + std::to_string(i) + "]",
         "row count must match the other selectors (nbar=" + std::to_string(nbar()) + ")");
  }
  need(lipschitz_bounds.rows() == m() && lipschitz_bounds.cols() == nbar(), "lipschitz_bounds",
       "must be m x nbar = " + std::to_string(m()) + " x " + std::to_string(nbar()));
  for (Eigen::Index i = 0; i < lipschitz_bounds.rows(); ++i)
    for (Eigen::Index j = 0; j < lipschitz_bounds.cols(); ++j) {
      const double b = lipschitz_bounds(i, j);
      need(std::isfinite(b) && b >= 0.0, "lipschitz_bounds", "entries must be finite and >= 0");
    }
  need(nonlinearity.m == m(), "nonlinearity", "evaluator m must equal plant m");
  need(nonlinearity.nbar == nbar(), "nonlinearity", "evaluator nbar must equal plant nbar");
}

void PlantModel::check() const {
  check_dimensions();
  auto need = [&](bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw std::invalid_argument("plant '" + name + "': " + field + " " + what);
  };
  // Fault channels must be full column rank (structural identifiability).
  if (a1() > 0) need(numerical_rank(E_f) == a1(), "E_f", "must have full column rank");
  if (a2() > 0) need(numerical_rank(D_f) == a2(), "D_f", "must have full column rank");
}

DescriptorModel augment_descriptor(const PlantModel& plant) {
  plant.check();
  DescriptorModel d;
  d.n = plant.n();
  d.p = plant.p();
  d.a1 = plant.a1();
  d.a2 = plant.a2();
  d.n_new = d.n + d.a2;
  d.n_a1 = d.n_new + d.a1;
  d.q1 = plant.q1();
  d.q2 = plant.q2();
  d.q = d.q1 + d.q2;
  d.m = plant.m();
  d.nbar = plant.nbar();

  d.T = MatrixXd::Zero(d.n, d.n_new);
  d.T.leftCols(d.n) = MatrixXd::Identity(d.n, d.n);
  d.A_zeta = MatrixXd::Zero(d.n, d.n_new);
  d.A_zeta.leftCols(d.n) = plant.A;
  d.C_bar = MatrixXd::Zero(d.p, d.n_new);
  d.C_bar.leftCols(d.n) = plant.C;
  d.C_bar.rightCols(d.a2) = plant.D_f;
  d.E = MatrixXd::Zero(d.n, d.q);
  if (d.q1 > 0) d.E.leftCols(d.q1) = plant.E1;
  d.D = MatrixXd::Zero(d.p, d.q);
  if (d.q2 > 0) d.D.rightCols(d.q2) = plant.D1;
  d.E_f = plant.E_f;
  d.G = plant.G;
  d.H = plant.H;
  return d;
}

namespace {

// PBH rank test of [M - lambda I; Cmat] at every eigenvalue of M with
// Re >= -1e-12; uses complex arithmetic for complex eigenvalues.
bool pbh_detectable(const MatrixXd& M, const MatrixXd& Cmat, std::string* detail) {
  const Eigen::Index nm = M.rows();
  Eigen::EigenSolver<MatrixXd> es(M, /*computeEigenvectors=*/false);
  bool ok = true;
  std::ostringstream os;
  for (Eigen::Index k = 0; k < nm; ++k) {
    const std::complex<double> lam = es.eigenvalues()(k);
    if (lam.real() < -1e-12) continue;  // stable modes need no check
    Eigen::MatrixXcd stack(nm + Cmat.rows(), nm);
    stack.topRows(nm) = M.cast<std::complex<double>>();
    stack.topRows(nm).diagonal().array() -= lam;
    stack.bottomRows(Cmat.rows()) = Cmat.cast<std::complex<double>>();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(stack);
    const auto& sv = svd.singularValues();
    const double tol = 1e-9 * sv(0);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > tol) ++r;
    if (r < nm) {
      ok = false;
      os << "undetectable mode at lambda = " << lam.real();
      if (lam.imag() != 0.0) os << (lam.imag() > 0 ? "+" : "") << lam.imag() << "i";
      os << " (rank " << r << " < " << nm << "); ";
    }
  }
  if (detail) *detail = os.str();
  return ok;
}

}  // namespace

ConditionReport validate_assumptions(const PlantModel& plant) {
  ConditionReport rep;
  std::string detail;
  const bool det = pbh_detectable(plant.A, plant.C, &detail);
  rep.add("assumption-1 (A,C) detectable", det, 0.0, detail);

  const bool ef_ok = plant.a1() == 0 || numerical_rank(plant.E_f) == plant.a1();
  rep.add("assumption-2 E_f full column rank", ef_ok, 0.0,
          ef_ok ? "" : "rank " + std::to_string(numerical_rank(plant.E_f)) + " < " +
                           std::to_string(plant.a1()));
  const bool df_ok = plant.a2() == 0 || numerical_rank(plant.D_f) == plant.a2();
  rep.add("assumption-2 D_f full column rank", df_ok, 0.0,
          df_ok ? "" : "rank " + std::to_string(numerical_rank(plant.D_f)) + " < " +
                           std::to_string(plant.a2()));
  return rep;
}

ConditionReport check_existence_conditions(const DescriptorModel& desc, const MatrixXd& L1) {
  if (L1.rows() != desc.n_new || L1.cols() != desc.n)
    throw std::invalid_argument("check_existence_conditions: L1 must be n_new x n = " +
                                std::to_string(desc.n_new) + " x " + std::to_string(desc.n));
  ConditionReport rep;
  const MatrixXd L1A = L1 * desc.A_zeta;

  std::string detail;
  const bool det = pbh_detectable(L1A, desc.C_bar, &detail);
  rep.add("rank-condition-1 (L1*A_zeta, C_bar) detectable", det, 0.0, detail);

  MatrixXd stack(desc.n_new + desc.p, desc.n_new + desc.a1);
  stack.topLeftCorner(desc.n_new, desc.n_new) = L1A;
  stack.topRightCorner(desc.n_new, desc.a1) = L1 * desc.E_f;
  stack.bottomLeftCorner(desc.p, desc.n_new) = desc.C_bar;
  stack.bottomRightCorner(desc.p, desc.a1).setZero();
  const Eigen::Index r = numerical_rank(stack);
  const bool zero_ok = r == desc.n_new + desc.a1;
  rep.add("rank-condition-2 no invariant zero at origin", zero_ok,
          static_cast<double>(r) - (desc.n_new + desc.a1),
          "rank " + std::to_string(r) + " of " + std::to_string(desc.n_new + desc.a1));
  return rep;
}

std::string canonical_dump(const PlantModel& plant) {
  std::ostringstream os;
  os << "plant " << plant.name << "\n";
  auto put = [&](const std::string& nm, const MatrixXd& mx) {
    os << nm << "\n" << matrix_to_text(mx);
  };
  put("A", plant.A);
  put("B", plant.B);
  put("C", plant.C);
  put("G", plant.G);
  put("E_f", plant.E_f);
  put("D_f", plant.D_f);
  put("E1", plant.E1);
  put("D1", plant.D1);
  for (std::size_t i = 0; i < plant.H.size(); ++i) put("H" + std::to_string(i + 1), plant.H[i]);
  put("lipschitz_bounds", plant.lipschitz_bounds);
  os << "nonlinearity " << plant.nonlinearity.name << "\n";
  return os.str();
}

}  // namespace fauio
