#pragma once
// Small shared utilities: canonical matrix text IO, pseudo-inverse, symmetric
// eigen bounds, deterministic RNG helpers, and the FNV-1a content hash used by
// run manifests.

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace fauio {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Canonical matrix text format: first line "rows cols", then one line per row,
// whitespace-separated entries, 17 significant digits.

std::string matrix_to_text(const MatrixXd& m);
MatrixXd matrix_from_text(const std::string& text, std::size_t* consumed = nullptr);

// Multi-matrix container: "name" line, then the matrix block. Used for gain
// files so a synthesized design round-trips through one file.
void write_named_matrices(const std::string& path,
                          const std::vector<std::pair<std::string, MatrixXd>>& mats,
                          const std::string& header_comment = "");
std::vector<std::pair<std::string, MatrixXd>> read_named_matrices(const std::string& path);

// ---------------------------------------------------------------------------
// Moore-Penrose pseudo-inverse via SVD, singular values below
// cutoff_rel * sigma_max treated as zero.
MatrixXd pinv(const MatrixXd& m, double cutoff_rel = 1e-10);

// Largest / smallest eigenvalue of a symmetric matrix (selfadjoint solver).
double sym_eig_max(const MatrixXd& m);
double sym_eig_min(const MatrixXd& m);

// Max real part over the (general, possibly complex) spectrum.
double max_real_eig(const MatrixXd& m);

// Numerical rank with tolerance rank_tol_rel * sigma_max.
Eigen::Index numerical_rank(const MatrixXd& m, double rank_tol_rel = 1e-9);

// ---------------------------------------------------------------------------
// Deterministic RNG: fixed-seed mt19937_64, uniform doubles via ldexp mapping
// so sequences are identical across platforms and standard libraries.
class DetRng {
 public:
  explicit DetRng(std::uint64_t seed) : eng_(seed) {}
  // Uniform in [lo, hi).
  double uniform(double lo, double hi) {
    const double u = std::ldexp(static_cast<double>(eng_() >> 11), -53);
    return lo + (hi - lo) * u;
  }
  MatrixXd uniform_matrix(Eigen::Index rows, Eigen::Index cols, double lo, double hi) {
    MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = uniform(lo, hi);
    return m;
  }
  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

// ---------------------------------------------------------------------------
// FNV-1a 64-bit, used to fingerprint config content + command line in run
// manifests (no timestamps enter the hash, so reruns reproduce it).
std::uint64_t fnv1a64(const std::string& data);
std::string fnv1a64_hex(const std::string& data);

// Format a double with 17 significant digits (shortest round-trippable form
// is not required; fixed %.17g keeps byte-identical output across runs).
std::string fmt17(double v);

}  // namespace fauio
