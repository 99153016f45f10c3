#include "fauio/polytope.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fauio/matrixio.hpp"

namespace fauio {

BasisMatrix basis(int i, int j, int m, int n_bar) {
  if (i < 1 || i > m || j < 1 || j > n_bar)
    throw std::out_of_range("basis: index (" + std::to_string(i) + "," + std::to_string(j) +
                            ") outside 1.." + std::to_string(m) + " x 1.." +
                            std::to_string(n_bar));
  BasisMatrix b;
  b.i = i;
  b.j = j;
  b.matrix = MatrixXd::Zero(m, n_bar);
  b.matrix(i - 1, j - 1) = 1.0;
  return b;
}

VertexSet enumerate_vertices(const MatrixXd& bounds) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> slots;
  for (Eigen::Index i = 0; i < bounds.rows(); ++i)
    for (Eigen::Index j = 0; j < bounds.cols(); ++j) {
      const double b = bounds(i, j);
      if (!(std::isfinite(b) && b >= 0.0))
        throw std::invalid_argument("enumerate_vertices: bounds must be finite and >= 0");
      if (b > 0.0) slots.emplace_back(i, j);
    }
  const std::size_t s = slots.size();
  if (s > 16)
    throw std::invalid_argument("enumerate_vertices: 2^" + std::to_string(s) +
                                " vertices exceeds the cap of 2^16 = 65536");
  VertexSet vs;
  vs.m = static_cast<int>(bounds.rows());
  vs.n_bar = static_cast<int>(bounds.cols());
  vs.bounds = bounds;
  const std::size_t count = std::size_t{1} << s;
  vs.vertices.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    MatrixXd v = MatrixXd::Zero(bounds.rows(), bounds.cols());
    for (std::size_t t = 0; t < s; ++t)
      if ((k >> (s - 1 - t)) & 1U) v(slots[t].first, slots[t].second) = bounds(slots[t].first, slots[t].second);
    vs.vertices.push_back(std::move(v));
  }
  return vs;
}

namespace {

VectorXd sample_state(DetRng& rng, int n, const SamplingPlan& plan) {
  VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = rng.uniform(plan.box_lo, plan.box_hi);
  return x;
}

std::vector<VectorXd> selector_args(const std::vector<MatrixXd>& H, const VectorXd& x) {
  std::vector<VectorXd> args;
  args.reserve(H.size());
  for (const auto& Hi : H) args.push_back(Hi * x);
  return args;
}

void check_selectors(const NonlinearityEvaluator& g, const std::vector<MatrixXd>& H) {
  if (static_cast<int>(H.size()) != g.m)
    throw std::invalid_argument("selector count " + std::to_string(H.size()) +
                                " does not match nonlinearity m = " + std::to_string(g.m));
  for (const auto& Hi : H)
    if (Hi.rows() != g.nbar)
      throw std::invalid_argument("selector row count must equal nonlinearity n_bar = " +
                                  std::to_string(g.nbar));
}

}  // namespace

MatrixXd estimate_bounds(const NonlinearityEvaluator& g, const std::vector<MatrixXd>& H,
                         const SamplingPlan& sampling, double safety) {
  check_selectors(g, H);
  const int n = static_cast<int>(H.at(0).cols());
  MatrixXd out = MatrixXd::Zero(g.m, g.nbar);
  for (int k = 0; k < sampling.count; ++k) {
    // One RNG per sample index: growing `count` appends samples, so the max
    // below is monotone in the sample count for a fixed seed.
    DetRng rng(sampling.seed * 1000003ULL + static_cast<std::uint64_t>(k));
    const VectorXd x = sample_state(rng, n, sampling);
    const std::vector<VectorXd> args = selector_args(H, x);
    for (int i = 0; i < g.m; ++i)
      for (int j = 0; j < g.nbar; ++j) {
        std::vector<VectorXd> plus = args, minus = args;
        plus[i](j) += sampling.fd_step;
        minus[i](j) -= sampling.fd_step;
        const double gp = g.eval(plus)(i);
        const double gm = g.eval(minus)(i);
        if (!std::isfinite(gp) || !std::isfinite(gm))
          throw std::runtime_error("estimate_bounds: non-finite evaluation of '" + g.name +
                                   "' at sample " + std::to_string(k));
        const double fd = (gp - gm) / (plus[i](j) - minus[i](j));
        out(i, j) = std::max(out(i, j), std::abs(fd));
      }
  }
  return safety * out;
}

ConditionReport verify_decomposition(const NonlinearityEvaluator& g,
                                     const std::vector<MatrixXd>& H, const MatrixXd& bounds,
                                     int trials, const SamplingPlan& sampling) {
  check_selectors(g, H);
  if (bounds.rows() != g.m || bounds.cols() != g.nbar)
    throw std::invalid_argument("verify_decomposition: bounds must be m x n_bar");
  const int n = static_cast<int>(H.at(0).cols());

  double worst = -std::numeric_limits<double>::infinity();
  int violations = 0;
  long evaluated = 0;
  for (int t = 0; t < trials; ++t) {
    DetRng rng(sampling.seed * 2654435761ULL + static_cast<std::uint64_t>(t));
    const VectorXd X = sample_state(rng, n, sampling);
    const VectorXd Y = sample_state(rng, n, sampling);
    const std::vector<VectorXd> args = selector_args(H, X);
    for (int i = 0; i < g.m; ++i) {
      const VectorXd nu = H[i] * X;
      const VectorXd nu_hat = H[i] * Y;
      // Intermediate points nu^j: first j coordinates replaced by Y's.
      VectorXd prev = nu;
      for (int j = 0; j < g.nbar; ++j) {
        VectorXd next = prev;
        next(j) = nu_hat(j);
        const double denom = nu(j) - nu_hat(j);
        if (std::abs(denom) >= 1e-12) {
          std::vector<VectorXd> a = args, b = args;
          a[i] = prev;
          b[i] = next;
          const double hij = (g.eval(a)(i) - g.eval(b)(i)) / denom;
          const double viol = std::max(-hij, hij - bounds(i, j));
          worst = std::max(worst, viol);
          if (viol > 1e-12) ++violations;
          ++evaluated;
        }
        prev = next;
      }
    }
  }

  ConditionReport rep;
  std::ostringstream os;
  os << violations << " violations over " << evaluated << " secant coefficients (" << trials
     << " trials); worst margin " << worst;
  rep.add("lemma-1 secant coefficients within [0, bounds]", violations == 0,
          std::isfinite(worst) ? -worst : 0.0, os.str());
  return rep;
}

}  // namespace fauio
