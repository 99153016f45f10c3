#pragma once

// Reformulated-Lipschitz machinery: selector basis matrices, the coefficient
// box [0, b_ij], its vertex set, and sampling-based estimation/verification of
// the bounds. The user-declared bounds in PlantModel stay authoritative for
// synthesis; estimate_bounds is advisory.

#include <cstdint>
#include <vector>

#include "fauio/model.hpp"
#include "fauio/report.hpp"

namespace fauio {

struct BasisMatrix {
  int i = 0;  // 1-based component index, i <= m
  int j = 0;  // 1-based argument index, j <= n_bar
  MatrixXd matrix;
};

// Unit matrix e_m(i) e_nbar(j)^T. Throws std::out_of_range on bad indices.
BasisMatrix basis(int i, int j, int m, int n_bar);

struct VertexSet {
  int m = 0;
  int n_bar = 0;
  std::vector<MatrixXd> vertices;  // each m x n_bar, entries in {0, bounds(i,j)}
  MatrixXd bounds;                 // m x n_bar, entrywise >= 0
};

// Enumerates the 2^k vertices of the box [0, bounds] over the k strictly
// positive entries (row-major slot order; the first free slot is the most
// significant counting digit). First vertex is all zeros, last equals bounds.
// More than 16 free slots is an error reporting the would-be 2^k count.
VertexSet enumerate_vertices(const MatrixXd& bounds);

struct SamplingPlan {
  double box_lo = -1.0;
  double box_hi = 1.0;
  int count = 200;
  double fd_step = 1e-5;
  std::uint64_t seed = 42;
};

// Max over sampled states of |dg_i/dnu_j| by central differences, inflated by
// `safety`. Monotone in `count` for a fixed seed (per-sample seed schedule).
MatrixXd estimate_bounds(const NonlinearityEvaluator& g, const std::vector<MatrixXd>& H,
                         const SamplingPlan& sampling, double safety = 1.1);

// Checks on `trials` random state pairs (X, Y) inside the sampling box that
// g_i(H_i X) - g_i(H_i Y) telescopes into secant coefficients h_ij within
// [0, bounds(i,j)] along the intermediate points that replace coordinates of
// X's argument by Y's one at a time. Reports the worst violation margin.
ConditionReport verify_decomposition(const NonlinearityEvaluator& g,
                                     const std::vector<MatrixXd>& H, const MatrixXd& bounds,
                                     int trials, const SamplingPlan& sampling = {});

}  // namespace fauio
