#pragma once

// Gain recovery from a solved synthesis instance and independent
// certification of the recovered design (algebraic identities, vertex
// closed-loop spectra, Lyapunov margin of the solved certificate).

#include <string>
#include <utility>

#include "fauio/lmi.hpp"
#include "fauio/model.hpp"
#include "fauio/report.hpp"

namespace fauio {

struct ObserverGains {
  MatrixXd N;   // n_new x n_new
  MatrixXd J;   // n_new x p
  MatrixXd L1;  // n_new x n
  MatrixXd F;   // n_new x p
  MatrixXd K;   // n_new x p
  MatrixXd L2;  // a1 x p
  double beta = 0.0;
  // Certificate data carried with the gains so trajectory-level checks can
  // evaluate the solved storage function.
  MatrixXd P1;  // n_new x n_new
  MatrixXd P2;  // a1 x a1
  double mu = 0.0;
};

// Solves [L1 F] [T; C_bar] = I through the pseudo-inverse of the stacked
// map. Throws when the stack is column-rank deficient or the residual of the
// matching identity exceeds 1e-8 (the observer construction is unsolvable).
std::pair<MatrixXd, MatrixXd> compute_L1_F(const DescriptorModel& desc);

// K = P1^{-1} R1', L2 = P2^{-1} R2', N = L1 A_zeta - K C_bar, J = N F + K.
// Requires P1, P2 positive definite (throws otherwise).
ObserverGains recover_gains(const DescriptorModel& desc, const MatrixXd& L1, const MatrixXd& F,
                            const DecisionLayout::Assignment& blocks, double beta, double mu);

// Effective slope matrix (m x n) of the nonlinearity difference at one
// vertex of the coefficient polytope: sum_ij g_ij * basis(i,j) * H_i.
MatrixXd vertex_slope(const DescriptorModel& desc, const MatrixXd& vertex);

// Ideal estimation-error matrix at one vertex (state [e; fa_err], dimension
// n_new + a1), with the output-derivative channel taken exactly.
MatrixXd ideal_error_matrix(const DescriptorModel& desc, const ObserverGains& gains,
                            const MatrixXd& vertex);

// Realized error matrix with the first-order derivative filter of time
// constant tau in the loop (state [e; fa_err; filter], dim n_new + a1 + p).
MatrixXd filtered_error_matrix(const DescriptorModel& desc, const ObserverGains& gains,
                               const MatrixXd& vertex, double tau);

// Checks, per design:
//   - the three gain identities (matching condition, N, J),
//   - the error-transform inverse identity,
//   - per vertex: ideal matrix Hurwitz, Lyapunov margin of the carried
//     (P1, P2) certificate, filtered realization Hurwitz.
ConditionReport certify_design(const DescriptorModel& desc, const ObserverGains& gains,
                               const MatrixXd& bounds, double filter_tau = 1e-3);

// Gain files are named-matrix text (beta and mu stored as 1x1 blocks).
void save_gains(const std::string& path, const ObserverGains& gains,
                const std::string& header_comment = "observer gain set");
ObserverGains load_gains(const std::string& path);

}  // namespace fauio
