#include "fauio/lmi.hpp"

#include <cmath>
#include <stdexcept>

#include "fauio/matrixio.hpp"

namespace fauio {

namespace {

int tri(int d) { return d * (d + 1) / 2; }

// Row-major upper-triangle index of (i, j), i <= j, in a d x d symmetric.
int tri_index(int i, int j, int d) { return i * d - i * (i - 1) / 2 + (j - i); }

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

// ---------------------------------------------------------------- expr ----

AffineMatrixExpr AffineMatrixExpr::zero(Eigen::Index rows, Eigen::Index cols) {
  AffineMatrixExpr e;
  e.constant = MatrixXd::Zero(rows, cols);
  return e;
}

AffineMatrixExpr AffineMatrixExpr::of_constant(const MatrixXd& c) {
  AffineMatrixExpr e;
  e.constant = c;
  return e;
}

MatrixXd AffineMatrixExpr::evaluate(const VectorXd& x) const {
  MatrixXd res = constant;
  for (const auto& [var, coef] : terms) {
    if (var < 0 || var >= x.size())
      throw std::invalid_argument("AffineMatrixExpr::evaluate: variable index " +
                                  std::to_string(var) + " outside assignment of size " +
                                  std::to_string(x.size()));
    res += x(var) * coef;
  }
  return res;
}

AffineMatrixExpr AffineMatrixExpr::transpose() const {
  AffineMatrixExpr e;
  e.constant = constant.transpose();
  for (const auto& [var, coef] : terms) e.terms[var] = coef.transpose();
  return e;
}

AffineMatrixExpr AffineMatrixExpr::scaled(double s) const {
  AffineMatrixExpr e;
  e.constant = s * constant;
  for (const auto& [var, coef] : terms) e.terms[var] = s * coef;
  return e;
}

AffineMatrixExpr AffineMatrixExpr::lmul(const MatrixXd& a) const {
  require(a.cols() == rows(), "AffineMatrixExpr::lmul: inner dimensions disagree");
  AffineMatrixExpr e;
  e.constant = a * constant;
  for (const auto& [var, coef] : terms) e.terms[var] = a * coef;
  return e;
}

AffineMatrixExpr AffineMatrixExpr::rmul(const MatrixXd& b) const {
  require(cols() == b.rows(), "AffineMatrixExpr::rmul: inner dimensions disagree");
  AffineMatrixExpr e;
  e.constant = constant * b;
  for (const auto& [var, coef] : terms) e.terms[var] = coef * b;
  return e;
}

AffineMatrixExpr AffineMatrixExpr::operator+(const AffineMatrixExpr& rhs) const {
  require(rows() == rhs.rows() && cols() == rhs.cols(),
          "AffineMatrixExpr::operator+: shape mismatch");
  AffineMatrixExpr e = *this;
  e.constant += rhs.constant;
  for (const auto& [var, coef] : rhs.terms) {
    auto it = e.terms.find(var);
    if (it == e.terms.end())
      e.terms[var] = coef;
    else
      it->second += coef;
  }
  return e;
}

AffineMatrixExpr AffineMatrixExpr::operator-(const AffineMatrixExpr& rhs) const {
  return *this + rhs.scaled(-1.0);
}

void add_block(AffineMatrixExpr& dst, const AffineMatrixExpr& src, Eigen::Index r,
               Eigen::Index c) {
  require(r >= 0 && c >= 0 && r + src.rows() <= dst.rows() && c + src.cols() <= dst.cols(),
          "add_block: block outside destination");
  dst.constant.block(r, c, src.rows(), src.cols()) += src.constant;
  for (const auto& [var, coef] : src.terms) {
    auto it = dst.terms.find(var);
    if (it == dst.terms.end()) it = dst.terms.emplace(var, MatrixXd::Zero(dst.rows(), dst.cols())).first;
    it->second.block(r, c, src.rows(), src.cols()) += coef;
  }
}

namespace {

// expr = s * coef where s is a variable or a fixed value.
AffineMatrixExpr scalar_times(ScalarRef s, const MatrixXd& coef) {
  AffineMatrixExpr e = AffineMatrixExpr::zero(coef.rows(), coef.cols());
  if (s.var >= 0)
    e.terms[s.var] = coef;
  else
    e.constant = s.value * coef;
  return e;
}

}  // namespace

// -------------------------------------------------------------- layout ----

DecisionLayout::DecisionLayout(int n_new, int a1, int p, int m, int nbar, ScalarKind scalar)
    : n_new_(n_new), a1_(a1), p_(p), m_(m), nbar_(nbar), scalar_kind_(scalar) {
  require(n_new > 0 && a1 > 0 && p > 0 && m > 0 && nbar > 0,
          "DecisionLayout: all dimensions must be positive");
  p1_off_ = 0;
  p2_off_ = p1_off_ + tri(n_new_);
  r1_off_ = p2_off_ + tri(a1_);
  r2_off_ = r1_off_ + p_ * n_new_;
  z_off_ = r2_off_ + p_ * a1_;
  const int d = blocks();
  const int zvars = (d + d * (d - 1) / 2) * tri(nbar_);
  const bool has_scalar = scalar_kind_ != ScalarKind::None;
  scalar_off_ = has_scalar ? z_off_ + zvars : -1;
  nvar_ = z_off_ + zvars + (has_scalar ? 1 : 0);
}

int DecisionLayout::z_audit_count() const {
  const int d = blocks();
  return (d + d * (d - 1) / 2) * tri(nbar_);
}

AffineMatrixExpr DecisionLayout::sym_expr(int offset, int dim) const {
  AffineMatrixExpr e = AffineMatrixExpr::zero(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) {
      MatrixXd coef = MatrixXd::Zero(dim, dim);
      coef(i, j) = 1.0;
      if (i != j) coef(j, i) = 1.0;
      e.terms[offset + tri_index(i, j, dim)] = coef;
    }
  return e;
}

AffineMatrixExpr DecisionLayout::full_expr(int offset, int rows, int cols) const {
  AffineMatrixExpr e = AffineMatrixExpr::zero(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      MatrixXd coef = MatrixXd::Zero(rows, cols);
      coef(i, j) = 1.0;
      e.terms[offset + i * cols + j] = coef;
    }
  return e;
}

AffineMatrixExpr DecisionLayout::P1() const { return sym_expr(p1_off_, n_new_); }
AffineMatrixExpr DecisionLayout::P2() const { return sym_expr(p2_off_, a1_); }
AffineMatrixExpr DecisionLayout::R1() const { return full_expr(r1_off_, p_, n_new_); }
AffineMatrixExpr DecisionLayout::R2() const { return full_expr(r2_off_, p_, a1_); }

int DecisionLayout::pair_offset(int a, int b) const {
  const int d = blocks();
  require(a >= 0 && a < b && b < d, "DecisionLayout: bad Z pair indices");
  const int idx = a * (2 * d - a - 1) / 2 + (b - a - 1);
  return z_off_ + d * tri(nbar_) + idx * tri(nbar_);
}

AffineMatrixExpr DecisionLayout::Z_diag_block(int a) const {
  require(a >= 0 && a < blocks(), "DecisionLayout: bad Z diagonal index");
  return sym_expr(z_off_ + a * tri(nbar_), nbar_);
}

AffineMatrixExpr DecisionLayout::Z_pair_block(int a, int b) const {
  return sym_expr(pair_offset(a, b), nbar_);
}

AffineMatrixExpr DecisionLayout::Z() const {
  const int d = blocks();
  AffineMatrixExpr z = AffineMatrixExpr::zero(z_dim(), z_dim());
  for (int a = 0; a < d; ++a) add_block(z, Z_diag_block(a), a * nbar_, a * nbar_);
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) {
      const AffineMatrixExpr zo = Z_pair_block(a, b);
      add_block(z, zo, a * nbar_, b * nbar_);  // shared block at both grid
      add_block(z, zo, b * nbar_, a * nbar_);  // positions, not two unknowns
    }
  return z;
}

VectorXd DecisionLayout::pack(const Assignment& as) const {
  require(as.P1.rows() == n_new_ && as.P1.cols() == n_new_, "pack: P1 shape");
  require(as.P2.rows() == a1_ && as.P2.cols() == a1_, "pack: P2 shape");
  require(as.R1.rows() == p_ && as.R1.cols() == n_new_, "pack: R1 shape");
  require(as.R2.rows() == p_ && as.R2.cols() == a1_, "pack: R2 shape");
  require(as.Z.rows() == z_dim() && as.Z.cols() == z_dim(), "pack: Z shape");
  VectorXd x = VectorXd::Zero(nvar_);
  auto put_sym = [&x](int off, const MatrixXd& s) {
    int k = off;
    for (int i = 0; i < s.rows(); ++i)
      for (int j = i; j < s.cols(); ++j) x(k++) = s(i, j);
  };
  put_sym(p1_off_, as.P1);
  put_sym(p2_off_, as.P2);
  int k = r1_off_;
  for (int i = 0; i < p_; ++i)
    for (int j = 0; j < n_new_; ++j) x(k++) = as.R1(i, j);
  for (int i = 0; i < p_; ++i)
    for (int j = 0; j < a1_; ++j) x(k++) = as.R2(i, j);
  const int d = blocks();
  for (int a = 0; a < d; ++a) put_sym(z_off_ + a * tri(nbar_), as.Z.block(a * nbar_, a * nbar_, nbar_, nbar_));
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b)
      put_sym(pair_offset(a, b), as.Z.block(a * nbar_, b * nbar_, nbar_, nbar_));
  if (scalar_off_ >= 0) x(scalar_off_) = as.scalar;
  return x;
}

DecisionLayout::Assignment DecisionLayout::unpack(const VectorXd& x) const {
  require(x.size() == nvar_, "unpack: assignment size mismatch");
  Assignment as;
  auto get_sym = [&x](int off, int dim) {
    MatrixXd s(dim, dim);
    int k = off;
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) {
        s(i, j) = x(k);
        s(j, i) = x(k);
        ++k;
      }
    return s;
  };
  as.P1 = get_sym(p1_off_, n_new_);
  as.P2 = get_sym(p2_off_, a1_);
  as.R1 = MatrixXd(p_, n_new_);
  as.R2 = MatrixXd(p_, a1_);
  int k = r1_off_;
  for (int i = 0; i < p_; ++i)
    for (int j = 0; j < n_new_; ++j) as.R1(i, j) = x(k++);
  for (int i = 0; i < p_; ++i)
    for (int j = 0; j < a1_; ++j) as.R2(i, j) = x(k++);
  const int d = blocks();
  as.Z = MatrixXd::Zero(z_dim(), z_dim());
  for (int a = 0; a < d; ++a)
    as.Z.block(a * nbar_, a * nbar_, nbar_, nbar_) = get_sym(z_off_ + a * tri(nbar_), nbar_);
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) {
      const MatrixXd zo = get_sym(pair_offset(a, b), nbar_);
      as.Z.block(a * nbar_, b * nbar_, nbar_, nbar_) = zo;
      as.Z.block(b * nbar_, a * nbar_, nbar_, nbar_) = zo;
    }
  as.scalar = scalar_off_ >= 0 ? x(scalar_off_) : 0.0;
  return as;
}

std::vector<std::string> DecisionLayout::var_names() const {
  std::vector<std::string> names(nvar_);
  auto sym_names = [&names](int off, int dim, const std::string& base) {
    int k = off;
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j)
        names[k++] = base + "[" + std::to_string(i) + "," + std::to_string(j) + "]";
  };
  sym_names(p1_off_, n_new_, "P1");
  sym_names(p2_off_, a1_, "P2");
  int k = r1_off_;
  for (int i = 0; i < p_; ++i)
    for (int j = 0; j < n_new_; ++j)
      names[k++] = "R1[" + std::to_string(i) + "," + std::to_string(j) + "]";
  for (int i = 0; i < p_; ++i)
    for (int j = 0; j < a1_; ++j)
      names[k++] = "R2[" + std::to_string(i) + "," + std::to_string(j) + "]";
  const int d = blocks();
  for (int a = 0; a < d; ++a) sym_names(z_off_ + a * tri(nbar_), nbar_, "Zd" + std::to_string(a));
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b)
      sym_names(pair_offset(a, b), nbar_, "Zo" + std::to_string(a) + "_" + std::to_string(b));
  if (scalar_off_ >= 0) names[scalar_off_] = scalar_kind_ == ScalarKind::Mu ? "mu" : "kappa";
  return names;
}

// -------------------------------------------------------------- blocks ----

AffineMatrixExpr build_sigma11(const DescriptorModel& desc, const MatrixXd& L1,
                               const DecisionLayout& layout) {
  require(L1.rows() == desc.n_new && L1.cols() == desc.n, "build_sigma11: L1 must be n_new x n");
  const MatrixXd L1A = L1 * desc.A_zeta;
  const MatrixXd L1Ef = L1 * desc.E_f;
  const MatrixXd& Cb = desc.C_bar;
  const AffineMatrixExpr P1 = layout.P1();
  const AffineMatrixExpr R1 = layout.R1();
  const AffineMatrixExpr R2 = layout.R2();

  const AffineMatrixExpr P1L1A = P1.rmul(L1A);
  const AffineMatrixExpr R1tCb = R1.transpose().rmul(Cb);
  const AffineMatrixExpr s11 = P1L1A + P1L1A.transpose() - R1tCb - R1tCb.transpose();
  const AffineMatrixExpr s12 =
      P1.rmul(L1Ef) - R2.lmul((Cb * L1A).transpose()) - R2.lmul(Cb.transpose());
  const AffineMatrixExpr s22 = R2.transpose().rmul(Cb * L1Ef).scaled(-1.0) -
                               R2.lmul((Cb * L1Ef).transpose());

  AffineMatrixExpr sig = AffineMatrixExpr::zero(desc.n_a1, desc.n_a1);
  add_block(sig, s11, 0, 0);
  add_block(sig, s12, 0, desc.n_new);
  add_block(sig, s12.transpose(), desc.n_new, 0);
  add_block(sig, s22, desc.n_new, desc.n_new);
  sig.constant += MatrixXd::Identity(desc.n_a1, desc.n_a1);
  return sig;
}

std::pair<AffineMatrixExpr, AffineMatrixExpr> build_M_N(const DescriptorModel& desc,
                                                        const DecisionLayout& layout) {
  const MatrixXd& Cb = desc.C_bar;
  AffineMatrixExpr M = AffineMatrixExpr::zero(desc.n_a1, desc.n_new);
  add_block(M, layout.R2().transpose().rmul(Cb), desc.n_new, 0);
  AffineMatrixExpr N = AffineMatrixExpr::zero(desc.n_a1, desc.n_new);
  add_block(N, layout.R1().lmul(Cb.transpose()), 0, 0);
  return {M, N};
}

std::pair<AffineMatrixExpr, MatrixXd> build_X_H_Phi(const DescriptorModel& desc,
                                                    const MatrixXd& L1,
                                                    const DecisionLayout& layout,
                                                    const MatrixXd& vertex) {
  require(vertex.rows() == desc.m && vertex.cols() == desc.nbar,
          "build_X_H_Phi: vertex must be m x nbar");
  const MatrixXd L1G = L1 * desc.G;
  const MatrixXd& Cb = desc.C_bar;
  const int nz = layout.z_dim();
  AffineMatrixExpr X = AffineMatrixExpr::zero(nz, desc.n_a1);
  MatrixXd HPhi = MatrixXd::Zero(nz, desc.n_a1);
  for (int i = 0; i < desc.m; ++i) {
    MatrixXd Hi_ext(desc.nbar, desc.n_a1);
    Hi_ext << desc.H[i] * desc.T, MatrixXd::Zero(desc.nbar, desc.a1);
    for (int j = 0; j < desc.nbar; ++j) {
      const MatrixXd Hij = basis(i + 1, j + 1, desc.m, desc.nbar).matrix;
      const MatrixXd HijT_L1GT = (L1G * Hij).transpose();  // nbar x n_new
      const int r0 = (i * desc.nbar + j) * desc.nbar;
      add_block(X, layout.P1().lmul(HijT_L1GT), r0, 0);
      add_block(X, layout.R2().lmul(-HijT_L1GT * Cb.transpose()), r0, desc.n_new);
      HPhi.middleRows(r0, desc.nbar) = vertex(i, j) * Hi_ext;
    }
  }
  return {X, HPhi};
}

AffineMatrixExpr build_Z(const DecisionLayout& layout) { return layout.Z(); }

namespace {

// Common interior of both theorems. Row/column partition:
//   [ n_a1 | n_new | nz | w (theorem-specific tail columns appended) ].
struct CommonBlocks {
  AffineMatrixExpr sig11, MeN, M13;
};

CommonBlocks common_blocks(const DescriptorModel& desc, const MatrixXd& L1,
                           const DecisionLayout& layout, const MatrixXd& vertex, double eps,
                           double beta, double alpha) {
  require(eps > 0.0, "assemble: epsilon must be positive");
  require(beta > 0.0, "assemble: beta must be positive");
  CommonBlocks cb;
  cb.sig11 = build_sigma11(desc, L1, layout);
  if (alpha > 0.0) {
    add_block(cb.sig11, layout.P1().scaled(2.0 * alpha), 0, 0);
    add_block(cb.sig11, layout.P2().scaled(2.0 * alpha / beta), desc.n_new, desc.n_new);
  }
  auto [M, N] = build_M_N(desc, layout);
  cb.MeN = M + N.scaled(eps);
  auto [X, HPhi] = build_X_H_Phi(desc, L1, layout, vertex);
  cb.M13 = X + layout.Z().rmul(HPhi);
  return cb;
}

}  // namespace

AffineMatrixExpr assemble_thm1(const DescriptorModel& desc, const MatrixXd& L1,
                               const DecisionLayout& layout, const MatrixXd& vertex, double eps,
                               double beta, double alpha, ScalarRef mu) {
  const CommonBlocks cb = common_blocks(desc, L1, layout, vertex, eps, beta, alpha);
  const int nz = layout.z_dim();
  const int w = desc.a1;
  const int o1 = desc.n_a1, o2 = o1 + desc.n_new, o3 = o2 + nz;
  const int total = o3 + w;

  AffineMatrixExpr Sq = AffineMatrixExpr::zero(desc.n_a1, w);
  add_block(Sq, layout.P2().scaled(1.0 / beta), desc.n_new, 0);

  AffineMatrixExpr lmi = AffineMatrixExpr::zero(total, total);
  add_block(lmi, cb.sig11, 0, 0);
  add_block(lmi, cb.MeN, 0, o1);
  add_block(lmi, cb.MeN.transpose(), o1, 0);
  add_block(lmi, cb.M13.transpose(), 0, o2);
  add_block(lmi, cb.M13, o2, 0);
  add_block(lmi, Sq, 0, o3);
  add_block(lmi, Sq.transpose(), o3, 0);
  add_block(lmi, layout.P1().scaled(-2.0 * eps), o1, o1);
  add_block(lmi, layout.Z().scaled(-2.0), o2, o2);
  add_block(lmi, scalar_times(mu, -MatrixXd::Identity(w, w)), o3, o3);
  return lmi;
}

AffineMatrixExpr assemble_thm2(const DescriptorModel& desc, const MatrixXd& L1, const MatrixXd& F,
                               const DecisionLayout& layout, const MatrixXd& vertex, double eps,
                               double delta, double beta, const VectorXd& channel_mask,
                               double alpha, ScalarRef mu) {
  require(delta > 0.0, "assemble_thm2: delta must be positive");
  require(F.rows() == desc.n_new && F.cols() == desc.p, "assemble_thm2: F must be n_new x p");
  const int q = desc.q;
  const int w = 2 * q + desc.a1;
  VectorXd mask = channel_mask;
  if (mask.size() == 0) mask = VectorXd::Ones(w);
  require(mask.size() == w, "assemble_thm2: channel mask must have width 2q + a1");

  const CommonBlocks cb = common_blocks(desc, L1, layout, vertex, eps, beta, alpha);
  const MatrixXd L1E = L1 * desc.E;
  const MatrixXd& Cb = desc.C_bar;
  const MatrixXd& D = desc.D;
  const AffineMatrixExpr P1 = layout.P1();
  const AffineMatrixExpr R1 = layout.R1();
  const AffineMatrixExpr R2 = layout.R2();

  // Disturbance column [w; w_dot; fa_dot], then masked columnwise.
  AffineMatrixExpr Sq = AffineMatrixExpr::zero(desc.n_a1, w);
  add_block(Sq, P1.rmul(L1E) - R1.transpose().rmul(D), 0, 0);
  add_block(Sq, P1.rmul(-(F * D)), 0, q);
  add_block(Sq, R2.transpose().rmul(-(Cb * L1E) - D), desc.n_new, 0);
  add_block(Sq, R2.transpose().rmul(Cb * (F * D) - D), desc.n_new, q);
  add_block(Sq, layout.P2().scaled(1.0 / beta), desc.n_new, 2 * q);
  Sq = Sq.rmul(MatrixXd(mask.asDiagonal()));

  AffineMatrixExpr U15 = AffineMatrixExpr::zero(desc.n_a1, desc.n_new);
  add_block(U15, R2.transpose().rmul(Cb), desc.n_new, 0);

  AffineMatrixExpr N45 = AffineMatrixExpr::zero(w, desc.n_new);
  const MatrixXd maskq = MatrixXd(mask.head(q).asDiagonal());
  add_block(N45, R1.lmul(delta * maskq * D.transpose()), 0, 0);

  const int nz = layout.z_dim();
  const int o1 = desc.n_a1, o2 = o1 + desc.n_new, o3 = o2 + nz, o4 = o3 + w;
  const int total = o4 + desc.n_new;

  AffineMatrixExpr lmi = AffineMatrixExpr::zero(total, total);
  add_block(lmi, cb.sig11, 0, 0);
  add_block(lmi, cb.MeN, 0, o1);
  add_block(lmi, cb.MeN.transpose(), o1, 0);
  add_block(lmi, cb.M13.transpose(), 0, o2);
  add_block(lmi, cb.M13, o2, 0);
  add_block(lmi, Sq, 0, o3);
  add_block(lmi, Sq.transpose(), o3, 0);
  add_block(lmi, U15, 0, o4);
  add_block(lmi, U15.transpose(), o4, 0);
  add_block(lmi, layout.P1().scaled(-2.0 * eps), o1, o1);
  add_block(lmi, layout.Z().scaled(-2.0), o2, o2);
  add_block(lmi, scalar_times(mu, -MatrixXd::Identity(w, w)), o3, o3);
  add_block(lmi, N45, o3, o4);
  add_block(lmi, N45.transpose(), o4, o3);
  add_block(lmi, layout.P1().scaled(-2.0 * delta), o4, o4);
  return lmi;
}

// ------------------------------------------------------------- problem ----

AssembledProblem build_problem(const ProblemSpec& spec) {
  const DescriptorModel& desc = spec.desc;
  require(spec.theorem == 1 || spec.theorem == 2, "build_problem: theorem must be 1 or 2");
  require(spec.L1.rows() == desc.n_new && spec.L1.cols() == desc.n,
          "build_problem: L1 must be n_new x n");
  require(spec.bounds.rows() == desc.m && spec.bounds.cols() == desc.nbar,
          "build_problem: bounds must be m x nbar");
  require(static_cast<int>(desc.H.size()) == desc.m,
          "build_problem: descriptor is missing the nonlinearity selectors");

  using Mode = DesignSpec::Mode;
  const Mode mode = spec.design.mode;
  const DecisionLayout::ScalarKind kind = mode == Mode::MinMu ? DecisionLayout::ScalarKind::Mu
                                          : mode == Mode::DecayCapped
                                              ? DecisionLayout::ScalarKind::Kappa
                                              : DecisionLayout::ScalarKind::None;

  AssembledProblem out{DecisionLayout(desc.n_new, desc.a1, desc.p, desc.m, desc.nbar, kind),
                       {},
                       enumerate_vertices(spec.bounds),
                       {},
                       -1};
  const DecisionLayout& layout = out.layout;
  out.mu = mode == Mode::MinMu ? ScalarRef{layout.scalar_var(), 0.0}
                               : ScalarRef{-1, spec.design.mu_fix};
  out.objective_var = layout.scalar_var();

  const double rho1 = mode == Mode::DecayCapped ? spec.design.rho1 : kPdFloor;
  const double rho2 = mode == Mode::DecayCapped ? spec.design.rho2 : kPdFloor;
  const double alpha = mode == Mode::DecayCapped ? spec.design.alpha : 0.0;
  const int n_new = desc.n_new, a1 = desc.a1, p = desc.p;

  auto& cons = out.constraints;
  cons.push_back({"pd-floor-P1",
                  AffineMatrixExpr::of_constant(rho1 * MatrixXd::Identity(n_new, n_new)) -
                      layout.P1(),
                  false, -1});
  cons.push_back(
      {"pd-floor-P2",
       AffineMatrixExpr::of_constant(rho2 * MatrixXd::Identity(a1, a1)) - layout.P2(), false, -1});
  cons.push_back(
      {"pd-floor-Z",
       AffineMatrixExpr::of_constant(kPdFloor * MatrixXd::Identity(layout.z_dim(), layout.z_dim())) -
           layout.Z(),
       false, -1});
  for (int a = 0; a < layout.blocks(); ++a)
    cons.push_back({"pd-floor-Zd-" + std::to_string(a),
                    AffineMatrixExpr::of_constant(kPdFloor *
                                                  MatrixXd::Identity(desc.nbar, desc.nbar)) -
                        layout.Z_diag_block(a),
                    false, -1});
  for (int a = 0; a < layout.blocks(); ++a)
    for (int b = a + 1; b < layout.blocks(); ++b)
      cons.push_back({"psd-Zo-" + std::to_string(a) + "-" + std::to_string(b),
                      layout.Z_pair_block(a, b).scaled(-1.0), false, -1});

  if (mode == Mode::DecayCapped) {
    // -[[kappa*rho*I, R]; [R', kappa*rho*I]] <= 0 caps the largest singular
    // value of R by kappa*rho, hence ||K|| <= kappa and ||L2|| <= kappa after
    // recovery through P >= rho*I.
    auto cap = [&](const AffineMatrixExpr& R, double rho, const std::string& name) {
      const int d = static_cast<int>(R.cols());
      AffineMatrixExpr e = AffineMatrixExpr::zero(p + d, p + d);
      e.terms[layout.scalar_var()] = -rho * MatrixXd::Identity(p + d, p + d);
      add_block(e, R.scaled(-1.0), 0, p);
      add_block(e, R.transpose().scaled(-1.0), p, 0);
      cons.push_back({name, e, false, -1});
    };
    cap(layout.R1(), spec.design.rho1, "cap-R1");
    cap(layout.R2(), spec.design.rho2, "cap-R2");
  }

  for (std::size_t v = 0; v < out.vertices.vertices.size(); ++v) {
    const MatrixXd& vertex = out.vertices.vertices[v];
    AffineMatrixExpr lmi =
        spec.theorem == 1
            ? assemble_thm1(desc, spec.L1, layout, vertex, spec.epsilon, spec.beta, alpha, out.mu)
            : assemble_thm2(desc, spec.L1, spec.F, layout, vertex, spec.epsilon, spec.delta,
                            spec.beta, spec.channel_mask, alpha, out.mu);
    cons.push_back({"vertex-" + std::to_string(v), std::move(lmi), true, static_cast<int>(v)});
  }
  return out;
}

ConeProgram lower_to_cone(const DecisionLayout& layout,
                          const std::vector<LmiConstraint>& constraints, int objective_var) {
  ConeProgram prog;
  prog.nvar = layout.nvar();
  prog.q = VectorXd::Zero(prog.nvar);
  if (objective_var >= 0) {
    require(objective_var < prog.nvar, "lower_to_cone: objective variable out of range");
    prog.q(objective_var) = 1.0;
  }
  prog.var_names = layout.var_names();

  auto check_sym = [](const MatrixXd& mat, const std::string& name) {
    const double asym = (mat - mat.transpose()).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, mat.cwiseAbs().maxCoeff());
    if (asym > 1e-10 * scale)
      throw std::invalid_argument("lower_to_cone: asymmetric expression in '" + name +
                                  "' (deviation " + fmt17(asym) + ")");
    return MatrixXd(0.5 * (mat + mat.transpose()));
  };

  int nrows = 0;
  if (layout.scalar_var() >= 0) nrows += 1;
  for (const auto& c : constraints) {
    require(c.expr.rows() == c.expr.cols(), "lower_to_cone: constraint '" + c.name +
                                                "' is not square");
    nrows += svec_len(static_cast<int>(c.expr.rows()));
  }

  prog.b = VectorXd::Zero(nrows);
  std::vector<Eigen::Triplet<double>> trips;
  int row0 = 0;
  if (layout.scalar_var() >= 0) {
    // x_scalar >= 0 realized as s = b - A x = x_scalar in the nonneg cone.
    prog.cones.push_back({ConeSpec::Nonneg, 1});
    prog.cone_names.push_back(layout.scalar_kind() == DecisionLayout::ScalarKind::Mu
                                  ? "mu-nonneg"
                                  : "kappa-nonneg");
    trips.emplace_back(0, layout.scalar_var(), -1.0);
    row0 = 1;
  }
  for (const auto& c : constraints) {
    const int d = static_cast<int>(c.expr.rows());
    const VectorXd bseg = svec_pack(-check_sym(c.expr.constant, c.name));
    prog.b.segment(row0, bseg.size()) = bseg;
    for (const auto& [var, coef] : c.expr.terms) {
      const VectorXd col = svec_pack(check_sym(coef, c.name));
      for (int r = 0; r < col.size(); ++r)
        if (col(r) != 0.0) trips.emplace_back(row0 + r, var, col(r));
    }
    prog.cones.push_back({ConeSpec::PsdTriangle, d});
    prog.cone_names.push_back(c.name);
    row0 += svec_len(d);
  }
  prog.A = Eigen::SparseMatrix<double>(nrows, prog.nvar);
  prog.A.setFromTriplets(trips.begin(), trips.end());
  prog.A.makeCompressed();
  return prog;
}

ConeProgram lower_to_cone(const AssembledProblem& prob) {
  return lower_to_cone(prob.layout, prob.constraints, prob.objective_var);
}

}  // namespace fauio
