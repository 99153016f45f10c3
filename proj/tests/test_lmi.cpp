#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "fauio/lmi.hpp"
#include "fauio/matrixio.hpp"
#include "robot_fixture.hpp"

using namespace fauio;
using fauio::testing::robot_config;
using fauio::testing::robot_dist_config;
using fauio::testing::thm1_instance;
using fauio::testing::thm2_instance;

namespace {

DecisionLayout robot_layout(DecisionLayout::ScalarKind kind = DecisionLayout::ScalarKind::Mu) {
  // n_new=5, a1=1, p=3, m=1, nbar=4
  return DecisionLayout(5, 1, 3, 1, 4, kind);
}

DecisionLayout::Assignment random_assignment(const DecisionLayout& layout, DetRng& rng) {
  DecisionLayout::Assignment as;
  const int n = layout.n_new(), a1 = layout.a1(), p = layout.p();
  const int nb = layout.nbar(), d = layout.blocks(), zd = layout.z_dim();
  MatrixXd p1 = rng.uniform_matrix(n, n, -1.0, 1.0);
  as.P1 = 0.5 * (p1 + p1.transpose());
  MatrixXd p2 = rng.uniform_matrix(a1, a1, -1.0, 1.0);
  as.P2 = 0.5 * (p2 + p2.transpose());
  as.R1 = rng.uniform_matrix(p, n, -1.0, 1.0);
  as.R2 = rng.uniform_matrix(p, a1, -1.0, 1.0);
  // Structured Z: symmetric diagonal blocks, one shared symmetric block per
  // unordered off-diagonal pair, placed at both (a,b) and (b,a).
  as.Z = MatrixXd::Zero(zd, zd);
  for (int a = 0; a < d; ++a) {
    MatrixXd blk = rng.uniform_matrix(nb, nb, -1.0, 1.0);
    as.Z.block(a * nb, a * nb, nb, nb) = 0.5 * (blk + blk.transpose());
  }
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) {
      MatrixXd blk = rng.uniform_matrix(nb, nb, -1.0, 1.0);
      blk = 0.5 * (blk + blk.transpose());
      as.Z.block(a * nb, b * nb, nb, nb) = blk;
      as.Z.block(b * nb, a * nb, nb, nb) = blk;
    }
  as.scalar = rng.uniform(0.0, 2.0);
  return as;
}

VectorXd layoutless_random(const DecisionLayout& layout, DetRng& rng) {
  VectorXd x(layout.nvar());
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.uniform(-1.0, 1.0);
  return x;
}

}  // namespace

TEST_CASE("decision layout sizes for the robot problem") {
  const DecisionLayout layout = robot_layout();
  CHECK(layout.blocks() == 4);
  CHECK(layout.z_dim() == 16);
  // tri(5) + tri(1) + 15 + 3 + (4 + 6) * tri(4) + 1 = 15+1+15+3+100+1
  CHECK(layout.nvar() == 135);
  CHECK(layout.z_audit_count() == 100);
  CHECK(layout.scalar_var() == 134);
  CHECK(layout.var_names().size() == 135);
  CHECK(layout.var_names().back() == "mu");

  const DecisionLayout none = robot_layout(DecisionLayout::ScalarKind::None);
  CHECK(none.nvar() == 134);
  CHECK(none.scalar_var() == -1);
}

TEST_CASE("pack/unpack round trip is exact") {
  const DecisionLayout layout = robot_layout();
  DetRng rng(7);
  const auto as = random_assignment(layout, rng);
  const VectorXd x = layout.pack(as);
  REQUIRE(x.size() == 135);
  const auto back = layout.unpack(x);
  CHECK((back.P1 - as.P1).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((back.P2 - as.P2).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((back.R1 - as.R1).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((back.R2 - as.R2).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((back.Z - as.Z).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(back.scalar == as.scalar);
  // pack(unpack(x)) is the identity on the flat vector too.
  CHECK((layout.pack(back) - x).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("layout expressions evaluate to the packed blocks") {
  const DecisionLayout layout = robot_layout();
  DetRng rng(11);
  const auto as = random_assignment(layout, rng);
  const VectorXd x = layout.pack(as);
  CHECK((layout.P1().evaluate(x) - as.P1).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((layout.P2().evaluate(x) - as.P2).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((layout.R1().evaluate(x) - as.R1).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((layout.R2().evaluate(x) - as.R2).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((layout.Z().evaluate(x) - as.Z).cwiseAbs().maxCoeff() <= 1e-14);
  // Shared pair block appears at both off-diagonal positions.
  const MatrixXd z01 = layout.Z_pair_block(0, 1).evaluate(x);
  const int nb = layout.nbar();
  CHECK((as.Z.block(0, nb, nb, nb) - z01).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((as.Z.block(nb, 0, nb, nb) - z01).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((layout.Z_diag_block(2).evaluate(x) - as.Z.block(2 * nb, 2 * nb, nb, nb))
            .cwiseAbs()
            .maxCoeff() <= 1e-14);
}

TEST_CASE("affine expression algebra matches direct matrix algebra") {
  const DecisionLayout layout = robot_layout();
  DetRng rng(13);
  const auto as = random_assignment(layout, rng);
  const VectorXd x = layout.pack(as);

  const AffineMatrixExpr p1 = layout.P1();  // 5x5
  const AffineMatrixExpr r1 = layout.R1();  // 3x5
  const MatrixXd A = rng.uniform_matrix(2, 3, -1.0, 1.0);
  const MatrixXd B = rng.uniform_matrix(5, 4, -1.0, 1.0);

  CHECK((r1.lmul(A).evaluate(x) - A * as.R1).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK((r1.rmul(B).evaluate(x) - as.R1 * B).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK((r1.transpose().evaluate(x) - as.R1.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((r1.scaled(-2.5).evaluate(x) + 2.5 * as.R1).cwiseAbs().maxCoeff() <= 1e-13);

  const AffineMatrixExpr sum = p1 + p1.scaled(2.0);
  CHECK((sum.evaluate(x) - 3.0 * as.P1).cwiseAbs().maxCoeff() <= 1e-13);
  const AffineMatrixExpr diff = p1 - p1;
  CHECK(diff.evaluate(x).cwiseAbs().maxCoeff() <= 1e-14);

  AffineMatrixExpr big = AffineMatrixExpr::zero(8, 8);
  add_block(big, p1, 0, 0);
  add_block(big, r1, 5, 0);
  const MatrixXd bigv = big.evaluate(x);
  CHECK((bigv.block(0, 0, 5, 5) - as.P1).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((bigv.block(5, 0, 3, 5) - as.R1).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(bigv.block(0, 5, 5, 3).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("theorem LMIs are square, sized by the block grid, and symmetric") {
  const auto cfg = robot_config();
  const auto inst1 = thm1_instance(cfg, true);
  const auto prob1 = build_problem(inst1.spec);

  const auto cfgd = robot_dist_config();
  const auto inst2 = thm2_instance(cfgd, true);
  const auto prob2 = build_problem(inst2.spec);

  // Rows: thm1 = n_a1 + n_new + z_dim + a1; thm2 adds (2q+a1) + n_new.
  int rows1 = -1, rows2 = -1;
  for (const auto& c : prob1.constraints)
    if (c.is_vertex) rows1 = static_cast<int>(c.expr.rows());
  for (const auto& c : prob2.constraints)
    if (c.is_vertex) rows2 = static_cast<int>(c.expr.rows());
  CHECK(rows1 == 6 + 5 + 16 + 1);
  CHECK(rows2 == 6 + 5 + 16 + 5 + 5);

  DetRng rng(17);
  for (const auto* prob : {&prob1, &prob2}) {
    for (int trial = 0; trial < 25; ++trial) {
      const VectorXd x = layoutless_random(prob->layout, rng);
      for (const auto& c : prob->constraints) {
        const MatrixXd e = c.expr.evaluate(x);
        const double scale = std::max(1.0, e.cwiseAbs().maxCoeff());
        CHECK((e - e.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale);
      }
    }
  }
}

TEST_CASE("constraint catalog and ordering") {
  const auto cfg = robot_config();
  auto inst = thm1_instance(cfg, true);
  const auto prob = build_problem(inst.spec);
  REQUIRE(prob.constraints.size() >= 4);
  CHECK(prob.constraints[0].name == "pd-floor-P1");
  CHECK(prob.constraints[1].name == "pd-floor-P2");
  CHECK(prob.constraints[2].name == "pd-floor-Z");
  // 4 diagonal-block floors, 6 shared-pair sign constraints, 2 vertices.
  int zd = 0, zo = 0, vert = 0;
  for (const auto& c : prob.constraints) {
    if (c.name.rfind("pd-floor-Zd-", 0) == 0) ++zd;
    if (c.name.rfind("psd-Zo-", 0) == 0) ++zo;
    if (c.is_vertex) ++vert;
  }
  CHECK(zd == 4);
  CHECK(zo == 6);
  CHECK(vert == 2);
  CHECK(prob.constraints.back().name == "vertex-1");
  CHECK(prob.objective_var == prob.layout.scalar_var());
  CHECK(prob.mu.var == prob.layout.scalar_var());

  // DecayCapped: fixed mu, kappa objective, two cap blocks.
  auto design = thm1_instance(cfg, false);
  REQUIRE(design.spec.design.mode == DesignSpec::Mode::DecayCapped);
  const auto dprob = build_problem(design.spec);
  CHECK(dprob.layout.scalar_kind() == DecisionLayout::ScalarKind::Kappa);
  CHECK(dprob.mu.var == -1);
  CHECK(dprob.mu.value == doctest::Approx(6.4e-7));
  bool cap1 = false, cap2 = false;
  for (const auto& c : dprob.constraints) {
    cap1 = cap1 || c.name == "cap-R1";
    cap2 = cap2 || c.name == "cap-R2";
  }
  CHECK(cap1);
  CHECK(cap2);
}

TEST_CASE("decay shift enters the design-instance vertex blocks") {
  // The DecayCapped vertex LMI differs from the plain one by
  // 2*alpha*blkdiag(P1, P2/beta) in the leading block; verify on the top-left
  // entry, which carries P1(0,0) with coefficient 2*alpha.
  const auto cfg = robot_config();
  auto cert = thm1_instance(cfg, true);
  auto design = thm1_instance(cfg, false);
  const auto pc = build_problem(cert.spec);
  const auto pd = build_problem(design.spec);
  const double alpha = design.spec.design.alpha;
  REQUIRE(alpha > 0.0);

  // Same decision-vector geometry except the scalar's meaning, so a common
  // assignment evaluates both.
  DetRng rng(23);
  const VectorXd x = layoutless_random(pc.layout, rng);
  const MatrixXd ec = [&] {
    for (const auto& c : pc.constraints)
      if (c.name == "vertex-0") return c.expr.evaluate(x);
    return MatrixXd();
  }();
  const MatrixXd ed = [&] {
    for (const auto& c : pd.constraints)
      if (c.name == "vertex-0") return c.expr.evaluate(x);
    return MatrixXd();
  }();
  REQUIRE(ec.rows() == ed.rows());
  const auto as = pc.layout.unpack(x);
  MatrixXd shift = MatrixXd::Zero(ec.rows(), ec.cols());
  shift.block(0, 0, 5, 5) = 2.0 * alpha * as.P1;
  shift.block(5, 5, 1, 1) = 2.0 * alpha / cert.spec.beta * as.P2;
  // The cert instance has -x(scalar) on the trailing diagonal; the design
  // instance has the fixed -mu there instead. Compensate both known effects.
  MatrixXd mu_fix = MatrixXd::Zero(ec.rows(), ec.cols());
  mu_fix(ec.rows() - 1, ec.cols() - 1) = as.scalar - design.spec.design.mu_fix;
  CHECK((ed - ec - shift - mu_fix).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("lowering to conic form is exact at random points") {
  const auto cfg = robot_config();
  auto inst = thm1_instance(cfg, true);
  const auto prob = build_problem(inst.spec);
  const ConeProgram prog = lower_to_cone(prob);
  CHECK(prog.nvar == prob.layout.nvar());
  REQUIRE(prog.cones.size() == prob.constraints.size() + 1);  // + mu nonneg cone
  CHECK(prog.cones[0].tag == ConeSpec::Nonneg);
  CHECK(prog.cone_names[0] == "mu-nonneg");

  DetRng rng(29);
  const VectorXd x = layoutless_random(prob.layout, rng);
  const VectorXd slack = prog.b - prog.A * x;
  // For each PSD cone, slack segment == svec(-E(x)).
  int row = prog.cones[0].rows();
  for (std::size_t k = 0; k < prob.constraints.size(); ++k) {
    const auto& cone = prog.cones[k + 1];
    REQUIRE(cone.tag == ConeSpec::PsdTriangle);
    const MatrixXd e = prob.constraints[k].expr.evaluate(x);
    const VectorXd expect = svec_pack(MatrixXd(-0.5 * (e + e.transpose())));
    const VectorXd got = slack.segment(row, cone.rows());
    CHECK((got - expect).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, expect.cwiseAbs().maxCoeff()));
    row += cone.rows();
  }
  CHECK(row == prog.nrows());
  // Objective selects mu.
  CHECK(prog.q(prob.layout.scalar_var()) == 1.0);
  CHECK(prog.q.cwiseAbs().sum() == 1.0);
}

TEST_CASE("asymmetric constraints are rejected at lowering") {
  const DecisionLayout layout(2, 1, 1, 1, 1, DecisionLayout::ScalarKind::None);
  MatrixXd bad(2, 2);
  bad << 0.0, 1.0, 0.0, 0.0;
  std::vector<LmiConstraint> cons;
  cons.push_back({"bad", AffineMatrixExpr::of_constant(bad), false, -1});
  CHECK_THROWS_AS((void)lower_to_cone(layout, cons, -1), std::invalid_argument);
}

TEST_CASE("channel mask scales the disturbance columns") {
  const auto cfgd = robot_dist_config();
  auto inst = thm2_instance(cfgd, true);  // mask [0,1,1,1,1]
  auto full = inst;
  full.spec.channel_mask = VectorXd();  // all ones

  const auto pm = build_problem(inst.spec);
  const auto pf = build_problem(full.spec);
  DetRng rng(31);
  const VectorXd x = layoutless_random(pm.layout, rng);
  MatrixXd em, ef;
  for (const auto& c : pm.constraints)
    if (c.name == "vertex-1") em = c.expr.evaluate(x);
  for (const auto& c : pf.constraints)
    if (c.name == "vertex-1") ef = c.expr.evaluate(x);
  REQUIRE(em.rows() == ef.rows());
  // Disturbance block: rows/cols 27..31 (after 6+5+16); first channel masked
  // to zero, the rest identical.
  const int w0 = 6 + 5 + 16;
  CHECK(em.block(w0, 0, 1, 27).cwiseAbs().maxCoeff() == 0.0);
  CHECK(em.block(0, w0, 27, 1).cwiseAbs().maxCoeff() == 0.0);
  for (int j = 1; j < 5; ++j) {
    CHECK((em.block(w0 + j, 0, 1, 27) - ef.block(w0 + j, 0, 1, 27)).cwiseAbs().maxCoeff() <=
          1e-12);
  }
  // The -mu I block on the disturbance diagonal stays in place under masking.
  const auto as = pm.layout.unpack(x);
  CHECK(em(w0, w0) == doctest::Approx(-as.scalar).epsilon(1e-12));
}
