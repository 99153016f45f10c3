#pragma once

// Standard conic form shared by the LMI lowering and the solver binding:
//   minimize q'x   subject to   A x + s = b,  s in K,
// where K is a product of zero / nonnegative / PSD-triangle cones.

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace fauio {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct ConeSpec {
  enum Tag { Zero = 0, Nonneg = 1, PsdTriangle = 2 };
  Tag tag = Zero;
  int dim = 0;  // entry count for Zero/Nonneg; matrix side for PsdTriangle

  int rows() const { return tag == PsdTriangle ? dim * (dim + 1) / 2 : dim; }
};

inline int svec_len(int n) { return n * (n + 1) / 2; }

// Scaled symmetric vectorization: upper triangle column by column, with the
// off-diagonal entries multiplied by sqrt(2) so Euclidean inner products of
// packed vectors equal Frobenius inner products of the matrices. This is the
// order the PSD-triangle cone consumes.
VectorXd svec_pack(const MatrixXd& S);
MatrixXd svec_unpack(const VectorXd& v, int n);

struct ConeProgram {
  int nvar = 0;
  VectorXd q;                     // objective
  Eigen::SparseMatrix<double> A;  // nrows x nvar
  VectorXd b;
  std::vector<ConeSpec> cones;
  std::vector<std::string> cone_names;  // one label per cone (diagnostics)
  std::vector<std::string> var_names;   // one label per scalar variable

  int nrows() const { return static_cast<int>(b.size()); }
};

// Documented sparse text dump (triplet lists per cone) for external-solver
// debugging. Format:
//   conic-program <nvar> <nrows> <ncones>
//   objective:  one "var value" line per nonzero of q
//   cone <k> <tag> <dim> <name>: "b" lines then "A row var value" triplets,
//   rows local to the cone.
std::string cone_program_to_text(const ConeProgram& prog);

}  // namespace fauio
