#include "fauio/matrixio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace fauio {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string matrix_to_text(const MatrixXd& m) {
  std::ostringstream os;
  os << m.rows() << " " << m.cols() << "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << " ";
      os << fmt17(m(i, j));
    }
    os << "\n";
  }
  return os.str();
}

MatrixXd matrix_from_text(const std::string& text, std::size_t* consumed) {
  std::istringstream is(text);
  Eigen::Index rows = 0, cols = 0;
  if (!(is >> rows >> cols) || rows < 0 || cols < 0)
    throw std::runtime_error("matrix text: malformed 'rows cols' header");
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      if (!(is >> m(i, j)))
        throw std::runtime_error("matrix text: too few entries (expected " +
                                 std::to_string(rows * cols) + ")");
  if (consumed) *consumed = static_cast<std::size_t>(is.tellg());
  return m;
}

void write_named_matrices(const std::string& path,
                          const std::vector<std::pair<std::string, MatrixXd>>& mats,
                          const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  for (const auto& [name, m] : mats) {
    out << name << "\n" << matrix_to_text(m);
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<std::pair<std::string, MatrixXd>> read_named_matrices(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::vector<std::pair<std::string, MatrixXd>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    // line is the name; the following lines are the matrix block
    std::string name = line;
    Eigen::Index rows = 0, cols = 0;
    if (!(in >> rows >> cols))
      throw std::runtime_error("gain file: missing 'rows cols' after name '" + name + "'");
    MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j)
        if (!(in >> m(i, j)))
          throw std::runtime_error("gain file: truncated matrix '" + name + "'");
    in.ignore();  // consume trailing newline before next getline
    out.emplace_back(std::move(name), std::move(m));
  }
  return out;
}

MatrixXd pinv(const MatrixXd& m, double cutoff_rel) {
  if (m.size() == 0) return MatrixXd(m.cols(), m.rows());
  Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cutoff = cutoff_rel * (sv.size() ? sv(0) : 0.0);
  VectorXd inv = VectorXd::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

double sym_eig_max(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double sym_eig_min(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double max_real_eig(const MatrixXd& m) {
  Eigen::EigenSolver<MatrixXd> es(m, /*computeEigenvectors=*/false);
  return es.eigenvalues().real().maxCoeff();
}

Eigen::Index numerical_rank(const MatrixXd& m, double rank_tol_rel) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double tol = rank_tol_rel * sv(0);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++r;
  return r;
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fnv1a64_hex(const std::string& data) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(data)));
  return buf;
}

}  // namespace fauio
