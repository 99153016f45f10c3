#pragma once

// Affine LMI assembly for the two synthesis theorems. Every block of the
// vertex-expanded inequalities is built as an affine expression in a flat
// decision vector (P1, P2, R1, R2, the structured Z, and one optional scalar),
// then the whole constraint set is lowered to the standard conic form.

#include <map>
#include <string>
#include <vector>

#include "fauio/cone.hpp"
#include "fauio/model.hpp"
#include "fauio/polytope.hpp"

namespace fauio {

// constant + sum_k x(var_k) * coeff_k. Immutable-by-convention value type.
struct AffineMatrixExpr {
  MatrixXd constant;
  std::map<int, MatrixXd> terms;  // variable index -> coefficient matrix

  static AffineMatrixExpr zero(Eigen::Index rows, Eigen::Index cols);
  static AffineMatrixExpr of_constant(const MatrixXd& c);

  Eigen::Index rows() const { return constant.rows(); }
  Eigen::Index cols() const { return constant.cols(); }

  MatrixXd evaluate(const VectorXd& x) const;
  AffineMatrixExpr transpose() const;
  AffineMatrixExpr scaled(double s) const;
  AffineMatrixExpr lmul(const MatrixXd& a) const;  // a * expr
  AffineMatrixExpr rmul(const MatrixXd& b) const;  // expr * b
  AffineMatrixExpr operator+(const AffineMatrixExpr& rhs) const;
  AffineMatrixExpr operator-(const AffineMatrixExpr& rhs) const;
};

// dst.block(r, c, src.rows, src.cols) += src
void add_block(AffineMatrixExpr& dst, const AffineMatrixExpr& src, Eigen::Index r,
               Eigen::Index c);

// A scalar appearing in an LMI: either decision variable x(var) or, with
// var < 0, the fixed value.
struct ScalarRef {
  int var = -1;
  double value = 0.0;
};

// Flat layout of the decision vector. Symmetric variables are stored as their
// upper triangle in row-major order (unscaled; the sqrt(2) scaling exists only
// at the cone interface). Z is stored block-wise: the m*nbar diagonal blocks
// first, then one shared block per unordered off-diagonal block pair (a, b),
// a < b, in lexicographic order — the shared block appears at both (a, b) and
// (b, a) of the block grid, which is the strongest reading of the displayed
// repetition pattern.
class DecisionLayout {
 public:
  enum class ScalarKind { None, Mu, Kappa };

  DecisionLayout(int n_new, int a1, int p, int m, int nbar, ScalarKind scalar);

  int n_new() const { return n_new_; }
  int a1() const { return a1_; }
  int p() const { return p_; }
  int m() const { return m_; }
  int nbar() const { return nbar_; }
  int blocks() const { return m_ * nbar_; }       // block-grid side
  int z_dim() const { return blocks() * nbar_; }  // m*nbar*nbar
  int nvar() const { return nvar_; }
  ScalarKind scalar_kind() const { return scalar_kind_; }
  int scalar_var() const { return scalar_off_; }  // -1 when ScalarKind::None
  int z_audit_count() const;                      // distinct scalars inside Z

  AffineMatrixExpr P1() const;
  AffineMatrixExpr P2() const;
  AffineMatrixExpr R1() const;
  AffineMatrixExpr R2() const;
  AffineMatrixExpr Z() const;
  AffineMatrixExpr Z_diag_block(int a) const;
  AffineMatrixExpr Z_pair_block(int a, int b) const;  // a < b

  struct Assignment {
    MatrixXd P1, P2, R1, R2, Z;
    double scalar = 0.0;
  };
  VectorXd pack(const Assignment& as) const;
  Assignment unpack(const VectorXd& x) const;
  std::vector<std::string> var_names() const;

 private:
  int n_new_, a1_, p_, m_, nbar_;
  ScalarKind scalar_kind_;
  int p1_off_, p2_off_, r1_off_, r2_off_, z_off_, scalar_off_, nvar_;

  AffineMatrixExpr sym_expr(int offset, int dim) const;
  AffineMatrixExpr full_expr(int offset, int rows, int cols) const;
  int pair_offset(int a, int b) const;
};

// --- individual theorem blocks -------------------------------------------

// Sigma11 = [P1 L1A + (.)' - R1'Cb - Cb'R1,  P1 L1Ef - (Cb L1A)'R2 - Cb'R2;
//            (.)',                          -R2'(Cb L1Ef) - (Cb L1Ef)'R2] + I
AffineMatrixExpr build_sigma11(const DescriptorModel& desc, const MatrixXd& L1,
                               const DecisionLayout& layout);

// M = [0; R2'Cb], N = [Cb'R1; 0]; the assembled LMIs use M + eps*N.
std::pair<AffineMatrixExpr, AffineMatrixExpr> build_M_N(const DescriptorModel& desc,
                                                        const DecisionLayout& layout);

// X stacks (i, j) row-major blocks [Hij'(L1G)'P1, -Hij'(L1G)'Cb'R2]; HPhi
// stacks g_ij * [H_i T, 0] in the same order (constant at a given vertex).
std::pair<AffineMatrixExpr, MatrixXd> build_X_H_Phi(const DescriptorModel& desc,
                                                    const MatrixXd& L1,
                                                    const DecisionLayout& layout,
                                                    const MatrixXd& vertex);

AffineMatrixExpr build_Z(const DecisionLayout& layout);

// One vertex constraint (must be <= 0). alpha > 0 adds the decay shift
// 2*alpha*blkdiag(P1, P2/beta) to Sigma11.
AffineMatrixExpr assemble_thm1(const DescriptorModel& desc, const MatrixXd& L1,
                               const DecisionLayout& layout, const MatrixXd& vertex, double eps,
                               double beta, double alpha, ScalarRef mu);

// Theorem 2 adds the masked disturbance column (width 2q + a1) and the
// delta-coupled trailing block. channel_mask scales the disturbance columns
// [w; w_dot; fa_dot] entrywise (empty mask = all ones).
AffineMatrixExpr assemble_thm2(const DescriptorModel& desc, const MatrixXd& L1, const MatrixXd& F,
                               const DecisionLayout& layout, const MatrixXd& vertex, double eps,
                               double delta, double beta, const VectorXd& channel_mask,
                               double alpha, ScalarRef mu);

// --- whole-problem assembly ----------------------------------------------

struct DesignSpec {
  enum class Mode {
    MinMu,        // minimize mu (certificate instance)
    DecayCapped,  // fixed mu, decay shift alpha, P floors rho1/rho2, minimize
                  // a common cap kappa on the singular values of R1, R2
    Feasibility   // fixed mu, no objective (feasibility probe)
  };
  Mode mode = Mode::MinMu;
  double alpha = 0.0;
  double mu_fix = 0.0;
  double rho1 = 0.0;
  double rho2 = 0.0;
};

struct ProblemSpec {
  DescriptorModel desc;
  MatrixXd L1;  // n_new x n
  MatrixXd F;   // n_new x p (theorem 2)
  int theorem = 1;
  double epsilon = 0.1;
  double delta = 0.0;  // theorem 2 only
  double beta = 100.0;
  MatrixXd bounds;       // m x nbar coefficient bounds
  VectorXd channel_mask;  // width 2q+a1; empty = all ones
  DesignSpec design;
};

struct LmiConstraint {
  std::string name;
  AffineMatrixExpr expr;  // required <= 0
  bool is_vertex = false;
  int vertex_index = -1;
};

struct AssembledProblem {
  DecisionLayout layout;
  std::vector<LmiConstraint> constraints;
  VertexSet vertices;
  ScalarRef mu;            // the mu inside the vertex LMIs
  int objective_var = -1;  // minimized variable; -1 = feasibility
};

// Positive-definiteness floors are emitted as explicit constraints with
// strictness margin kPdFloor (P1, P2, each diagonal Z block, and the whole Z
// at the floor; shared off-diagonal Z blocks at >= 0). DecayCapped mode
// raises the P1/P2 floors to rho1/rho2 and adds the two kappa cap blocks.
inline constexpr double kPdFloor = 1e-6;

AssembledProblem build_problem(const ProblemSpec& spec);

// Maps every NSD constraint to a PSD cone membership of its negation
// (b_cone = svec(-constant), A-column k = svec(coeff_k)) and puts the scalar
// variable, when present, in a leading nonnegative cone. Asymmetry beyond
// 1e-10 relative is a hard error.
ConeProgram lower_to_cone(const DecisionLayout& layout,
                          const std::vector<LmiConstraint>& constraints, int objective_var);
ConeProgram lower_to_cone(const AssembledProblem& prob);

}  // namespace fauio
