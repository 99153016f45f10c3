#include "fauio/synth.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "fauio/matrixio.hpp"
#include "fauio/polytope.hpp"

namespace fauio {

std::pair<MatrixXd, MatrixXd> compute_L1_F(const DescriptorModel& desc) {
  MatrixXd stack(desc.n + desc.p, desc.n_new);
  stack << desc.T, desc.C_bar;
  const Eigen::Index rank = numerical_rank(stack);
  if (rank < desc.n_new)
    throw std::runtime_error(
        "compute_L1_F: the matching condition L1*T + F*C_bar = I has no solution "
        "(stacked map has rank " +
        std::to_string(rank) + " < " + std::to_string(desc.n_new) + ")");
  const MatrixXd gen = pinv(stack);  // n_new x (n + p)
  const MatrixXd L1 = gen.leftCols(desc.n);
  const MatrixXd F = gen.rightCols(desc.p);
  const double resid =
      (L1 * desc.T + F * desc.C_bar - MatrixXd::Identity(desc.n_new, desc.n_new)).norm();
  if (resid > 1e-8)
    throw std::runtime_error("compute_L1_F: matching identity residual " + fmt17(resid) +
                             " exceeds 1e-8");
  return {L1, F};
}

ObserverGains recover_gains(const DescriptorModel& desc, const MatrixXd& L1, const MatrixXd& F,
                            const DecisionLayout::Assignment& blocks, double beta, double mu) {
  if (L1.rows() != desc.n_new || L1.cols() != desc.n)
    throw std::invalid_argument("recover_gains: L1 must be n_new x n");
  if (F.rows() != desc.n_new || F.cols() != desc.p)
    throw std::invalid_argument("recover_gains: F must be n_new x p");
  const double min1 = sym_eig_min(0.5 * (blocks.P1 + blocks.P1.transpose()));
  if (min1 <= 0.0)
    throw std::runtime_error("recover_gains: P1 is not positive definite (min eig " +
                             fmt17(min1) + ")");
  const double min2 = sym_eig_min(0.5 * (blocks.P2 + blocks.P2.transpose()));
  if (min2 <= 0.0)
    throw std::runtime_error("recover_gains: P2 is not positive definite (min eig " +
                             fmt17(min2) + ")");

  ObserverGains g;
  g.L1 = L1;
  g.F = F;
  g.K = blocks.P1.ldlt().solve(blocks.R1.transpose());
  g.L2 = blocks.P2.ldlt().solve(blocks.R2.transpose());
  g.N = L1 * desc.A_zeta - g.K * desc.C_bar;
  g.J = g.N * F + g.K;
  g.beta = beta;
  g.P1 = blocks.P1;
  g.P2 = blocks.P2;
  g.mu = mu;
  return g;
}

MatrixXd vertex_slope(const DescriptorModel& desc, const MatrixXd& vertex) {
  if (vertex.rows() != desc.m || vertex.cols() != desc.nbar)
    throw std::invalid_argument("vertex_slope: vertex must be m x nbar");
  MatrixXd phi = MatrixXd::Zero(desc.m, desc.n);
  for (int i = 0; i < desc.m; ++i)
    for (int j = 0; j < desc.nbar; ++j)
      phi += vertex(i, j) * (basis(i + 1, j + 1, desc.m, desc.nbar).matrix * desc.H[i]);
  return phi;
}

namespace {

MatrixXd closed_loop_N(const DescriptorModel& desc, const ObserverGains& g,
                       const MatrixXd& vertex) {
  return g.N + (g.L1 * desc.G) * vertex_slope(desc, vertex) * desc.T;
}

}  // namespace

MatrixXd ideal_error_matrix(const DescriptorModel& desc, const ObserverGains& g,
                            const MatrixXd& vertex) {
  const MatrixXd ncl = closed_loop_N(desc, g, vertex);
  const MatrixXd l1ef = g.L1 * desc.E_f;
  const MatrixXd l2cb = g.L2 * desc.C_bar;
  const int nn = desc.n_new, a1 = desc.a1;
  MatrixXd a(nn + a1, nn + a1);
  a.topLeftCorner(nn, nn) = ncl;
  a.topRightCorner(nn, a1) = l1ef;
  a.bottomLeftCorner(a1, nn) = -g.beta * l2cb * (MatrixXd::Identity(nn, nn) + ncl);
  a.bottomRightCorner(a1, a1) = -g.beta * l2cb * l1ef;
  return a;
}

MatrixXd filtered_error_matrix(const DescriptorModel& desc, const ObserverGains& g,
                               const MatrixXd& vertex, double tau) {
  if (tau <= 0.0) throw std::invalid_argument("filtered_error_matrix: tau must be positive");
  const MatrixXd ncl = closed_loop_N(desc, g, vertex);
  const MatrixXd l1ef = g.L1 * desc.E_f;
  const MatrixXd l2cb = g.L2 * desc.C_bar;
  const int nn = desc.n_new, a1 = desc.a1, p = desc.p;
  MatrixXd a = MatrixXd::Zero(nn + a1 + p, nn + a1 + p);
  a.block(0, 0, nn, nn) = ncl;
  a.block(0, nn, nn, a1) = l1ef;
  a.block(nn, 0, a1, nn) = -g.beta * (1.0 + 1.0 / tau) * l2cb;
  a.block(nn, nn + a1, a1, p) = (g.beta / tau) * g.L2;
  a.block(nn + a1, 0, p, nn) = desc.C_bar / tau;
  a.block(nn + a1, nn + a1, p, p) = -MatrixXd::Identity(p, p) / tau;
  return a;
}

ConditionReport certify_design(const DescriptorModel& desc, const ObserverGains& g,
                               const MatrixXd& bounds, double filter_tau) {
  ConditionReport rep;
  const int nn = desc.n_new, a1 = desc.a1;

  const double match =
      (g.L1 * desc.T + g.F * desc.C_bar - MatrixXd::Identity(nn, nn)).norm();
  rep.add("identity L1*T + F*C_bar = I", match <= 1e-8, 1e-8 - match,
          "residual " + fmt17(match));

  const MatrixXd n_expect = g.L1 * desc.A_zeta - g.K * desc.C_bar;
  const double n_resid = (g.N - n_expect).norm() / std::max(1.0, n_expect.norm());
  rep.add("identity N = L1*A_zeta - K*C_bar", n_resid <= 1e-10, 1e-10 - n_resid,
          "relative residual " + fmt17(n_resid));

  const MatrixXd j_expect = g.N * g.F + g.K;
  const double j_resid = (g.J - j_expect).norm() / std::max(1.0, j_expect.norm());
  rep.add("identity J = N*F + K", j_resid <= 1e-10, 1e-10 - j_resid,
          "relative residual " + fmt17(j_resid));

  {
    const MatrixXd bl2cb = g.beta * g.L2 * desc.C_bar;
    MatrixXd te = MatrixXd::Identity(nn + a1, nn + a1);
    te.bottomLeftCorner(a1, nn) = bl2cb;
    MatrixXd ti = MatrixXd::Identity(nn + a1, nn + a1);
    ti.bottomLeftCorner(a1, nn) = -bl2cb;
    const double resid = (te * ti - MatrixXd::Identity(nn + a1, nn + a1)).norm();
    rep.add("error-transform inverse identity", resid <= 1e-10, 1e-10 - resid,
            "residual " + fmt17(resid));
  }

  const bool have_cert = g.P1.rows() == nn && g.P2.rows() == a1 && g.beta > 0.0;
  MatrixXd pcert;
  if (have_cert) {
    pcert = MatrixXd::Zero(nn + a1, nn + a1);
    pcert.topLeftCorner(nn, nn) = g.P1;
    pcert.bottomRightCorner(a1, a1) = g.P2 / g.beta;
  }

  const VertexSet vs = enumerate_vertices(bounds);
  for (std::size_t v = 0; v < vs.vertices.size(); ++v) {
    const std::string tag = "vertex-" + std::to_string(v);
    const MatrixXd a = ideal_error_matrix(desc, g, vs.vertices[v]);
    const double re = max_real_eig(a);
    rep.add(tag + " closed-loop Hurwitz", re < 0.0, -re, "max Re lambda = " + fmt17(re));

    if (have_cert) {
      const MatrixXd lyap = a.transpose() * pcert + pcert * a +
                            MatrixXd::Identity(nn + a1, nn + a1);
      const double lam = sym_eig_max(0.5 * (lyap + lyap.transpose()));
      rep.add(tag + " Lyapunov margin", lam <= 1e-8, 1e-8 - lam,
              "lambda_max(A'P + PA + I) = " + fmt17(lam));
    }

    const double ref = max_real_eig(filtered_error_matrix(desc, g, vs.vertices[v], filter_tau));
    rep.add(tag + " filtered realization Hurwitz", ref < 0.0, -ref,
            "tau=" + fmt17(filter_tau) + " max Re lambda = " + fmt17(ref));
  }
  return rep;
}

void save_gains(const std::string& path, const ObserverGains& g,
                const std::string& header_comment) {
  MatrixXd beta(1, 1), mu(1, 1);
  beta << g.beta;
  mu << g.mu;
  write_named_matrices(path,
                       {{"N", g.N},
                        {"J", g.J},
                        {"L1", g.L1},
                        {"F", g.F},
                        {"K", g.K},
                        {"L2", g.L2},
                        {"P1", g.P1},
                        {"P2", g.P2},
                        {"beta", beta},
                        {"mu", mu}},
                       header_comment);
}

ObserverGains load_gains(const std::string& path) {
  const auto mats = read_named_matrices(path);
  std::map<std::string, MatrixXd> by_name(mats.begin(), mats.end());
  auto need = [&](const std::string& name) {
    auto it = by_name.find(name);
    if (it == by_name.end())
      throw std::runtime_error("load_gains: '" + path + "' is missing block '" + name + "'");
    return it->second;
  };
  ObserverGains g;
  g.N = need("N");
  g.J = need("J");
  g.L1 = need("L1");
  g.F = need("F");
  g.K = need("K");
  g.L2 = need("L2");
  g.P1 = need("P1");
  g.P2 = need("P2");
  g.beta = need("beta")(0, 0);
  g.mu = need("mu")(0, 0);
  return g;
}

}  // namespace fauio
