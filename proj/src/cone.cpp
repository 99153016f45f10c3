#include "fauio/cone.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fauio/matrixio.hpp"

namespace fauio {

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

VectorXd svec_pack(const MatrixXd& S) {
  const Eigen::Index n = S.rows();
  if (S.cols() != n) throw std::invalid_argument("svec_pack: matrix must be square");
  VectorXd v(svec_len(static_cast<int>(n)));
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i <= j; ++i) v(k++) = (i == j) ? S(i, j) : kSqrt2 * S(i, j);
  return v;
}

MatrixXd svec_unpack(const VectorXd& v, int n) {
  if (v.size() != svec_len(n))
    throw std::invalid_argument("svec_unpack: length " + std::to_string(v.size()) +
                                " does not match side " + std::to_string(n));
  MatrixXd S(n, n);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double s = (i == j) ? v(k) : v(k) / kSqrt2;
      S(i, j) = s;
      S(j, i) = s;
      ++k;
    }
  return S;
}

std::string cone_program_to_text(const ConeProgram& prog) {
  std::ostringstream os;
  os << "conic-program " << prog.nvar << " " << prog.nrows() << " " << prog.cones.size() << "\n";
  os << "objective\n";
  for (int k = 0; k < prog.q.size(); ++k)
    if (prog.q(k) != 0.0) os << k << " " << fmt17(prog.q(k)) << "\n";

  // Column-compressed A rearranged into per-cone triplet lists.
  std::vector<std::vector<std::pair<int, double>>> by_row(prog.nrows());
  for (int col = 0; col < prog.A.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(prog.A, col); it; ++it)
      by_row[it.row()].emplace_back(col, it.value());

  int row0 = 0;
  for (std::size_t c = 0; c < prog.cones.size(); ++c) {
    const ConeSpec& cone = prog.cones[c];
    os << "cone " << c << " tag " << cone.tag << " dim " << cone.dim << " "
       << (c < prog.cone_names.size() ? prog.cone_names[c] : "") << "\n";
    for (int r = 0; r < cone.rows(); ++r) {
      os << "b " << r << " " << fmt17(prog.b(row0 + r)) << "\n";
      for (const auto& [col, val] : by_row[row0 + r])
        os << "A " << r << " " << col << " " << fmt17(val) << "\n";
    }
    row0 += cone.rows();
  }
  return os.str();
}

}  // namespace fauio
