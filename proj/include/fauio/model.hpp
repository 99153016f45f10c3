#pragma once
// Plant and descriptor data model.
//
// The plant is
//   x' = A x + B u + G g(x) + E_f f_a + E1 w1
//   y  = C x + D_f f_s + D1 w2
// with g(x) = [g_1(H_1 x); ...; g_m(H_m x)], each H_i an nbar-by-n selector.
//
// Augmenting the state with the sensor fault, zeta = [x; f_s], gives the
// descriptor form  T zeta' = A_zeta zeta + B u + ...,  y = C_bar zeta + D w,
// with T = [I 0], A_zeta = [A 0], C_bar = [C D_f], E = [E1 0], D = [0 D1].
// Note both disturbance channel matrices stack into width q = q1 + q2; the
// output-equation matrix is read as D = [0 D1] (it multiplies w = [w1; w2]
// and only the measurement component enters y).

#include "fauio/matrixio.hpp"
#include "fauio/report.hpp"

#include <functional>
#include <string>
#include <vector>

namespace fauio {

// g takes the m argument vectors nu_i = H_i x (each length nbar) and returns
// an m-vector. Deterministic by contract.
struct NonlinearityEvaluator {
  std::string name;
  int m = 0;
  int nbar = 0;
  std::function<VectorXd(const std::vector<VectorXd>&)> g;

  VectorXd eval(const std::vector<VectorXd>& args) const;
};

// Registry used by the config loader. Known names:
//   "sin_v1": m=1, g_1(nu) = sin(nu_1)   (robot-arm flexible joint)
//   "zero":   g identically zero (any m)
NonlinearityEvaluator make_nonlinearity(const std::string& name, int m, int nbar);

struct PlantModel {
  std::string name;
  MatrixXd A;    // n x n
  MatrixXd B;    // n x s
  MatrixXd C;    // p x n
  MatrixXd G;    // n x m
  MatrixXd E_f;  // n x a1, actuator-fault channel, full column rank
  MatrixXd D_f;  // p x a2, sensor-fault channel, full column rank
  MatrixXd E1;   // n x q1 (q1 may be 0)
  MatrixXd D1;   // p x q2 (q2 may be 0)
  std::vector<MatrixXd> H;   // m selectors, each nbar x n
  MatrixXd lipschitz_bounds;  // m x nbar, entries >= 0
  NonlinearityEvaluator nonlinearity;

  int n() const { return static_cast<int>(A.rows()); }
  int s() const { return static_cast<int>(B.cols()); }
  int p() const { return static_cast<int>(C.rows()); }
  int m() const { return static_cast<int>(G.cols()); }
  int nbar() const { return H.empty() ? 0 : static_cast<int>(H[0].rows()); }
  int a1() const { return static_cast<int>(E_f.cols()); }
  int a2() const { return static_cast<int>(D_f.cols()); }
  int q1() const { return static_cast<int>(E1.cols()); }
  int q2() const { return static_cast<int>(D1.cols()); }

  // Throws std::invalid_argument naming the offending field on any dimension
  // mismatch or bad Lipschitz bound. Does not look at matrix ranks, so a
  // structurally well-formed model with a rank-deficient fault channel loads
  // fine and can still be *diagnosed* (validate_assumptions) instead of being
  // rejected at parse time.
  void check_dimensions() const;

  // check_dimensions() plus full-column-rank checks on E_f and D_f.
  void check() const;
};

struct DescriptorModel {
  MatrixXd T;       // n x n_new, [I 0]
  MatrixXd A_zeta;  // n x n_new, [A 0]
  MatrixXd C_bar;   // p x n_new, [C D_f]
  MatrixXd E;       // n x q, [E1 0]
  MatrixXd D;       // p x q, [0 D1]
  MatrixXd E_f;     // n x a1 (carried through; rank condition 2 needs it)
  MatrixXd G;       // n x m  (carried through for the LMI nonlinearity blocks)
  std::vector<MatrixXd> H;  // m selectors, nbar x n (carried through)
  int n = 0, p = 0, a1 = 0, a2 = 0, n_new = 0, n_a1 = 0;
  int q = 0, q1 = 0, q2 = 0;
  int m = 0, nbar = 0;
};

DescriptorModel augment_descriptor(const PlantModel& plant);

// The design rests on two standing assumptions, reported here as
//   assumption-1: (A, C) detectable (PBH at eigenvalues of A with Re >= 0),
//   assumption-2: E_f and D_f full column rank.
ConditionReport validate_assumptions(const PlantModel& plant);

// Rank condition 1 (detectability of the augmented pair): for every
// eigenvalue lambda of L1*A_zeta with Re(lambda) >= -1e-12,
//   rank [L1*A_zeta - lambda I; C_bar] = n_new.
// Rank condition 2 (no invariant zero at the origin):
//   rank [L1*A_zeta, L1*E_f; C_bar, 0] = n_new + a1.
ConditionReport check_existence_conditions(const DescriptorModel& desc, const MatrixXd& L1);

// Canonical text dump of all plant matrices (for diffing configs).
std::string canonical_dump(const PlantModel& plant);

}  // namespace fauio
