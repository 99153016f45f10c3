#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "fauio/cone.hpp"
#include "fauio/manifest.hpp"
#include "fauio/matrixio.hpp"
#include "fauio/report.hpp"

using namespace fauio;

TEST_CASE("fmt17 round-trips doubles exactly") {
  const double vals[] = {0.0,         1.0,        -1.0,          1.0 / 3.0,   6.4e-7,
                         3.1415926535897931, 1e300, -2.2250738585072014e-308, 123456.789};
  for (double v : vals) {
    const std::string s = fmt17(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("matrix text round trip") {
  MatrixXd m(2, 3);
  m << 1.0, -2.5, 1.0 / 3.0, 6.4e-7, 0.0, -1e18;
  const std::string text = matrix_to_text(m);
  const MatrixXd back = matrix_from_text(text);
  REQUIRE(back.rows() == 2);
  REQUIRE(back.cols() == 3);
  CHECK((back - m).norm() == 0.0);
}

TEST_CASE("named matrix file round trip") {
  const std::string path = "/tmp/fauio_test_named_mats.txt";
  MatrixXd a(2, 2), b(1, 3);
  a << 1, 2, 3, 4;
  b << -1.5, 0, 2.25;
  write_named_matrices(path, {{"a", a}, {"b", b}}, "test header");
  const auto mats = read_named_matrices(path);
  REQUIRE(mats.size() == 2);
  CHECK(mats[0].first == "a");
  CHECK((mats[0].second - a).norm() == 0.0);
  CHECK(mats[1].first == "b");
  CHECK((mats[1].second - b).norm() == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("pinv recovers inverse and least-squares solutions") {
  MatrixXd m(2, 2);
  m << 2, 0, 0, 4;
  CHECK((pinv(m) * m - MatrixXd::Identity(2, 2)).norm() < 1e-12);

  // Tall full-column-rank: pinv(m) * m = I.
  MatrixXd t(3, 2);
  t << 1, 0, 0, 1, 1, 1;
  CHECK((pinv(t) * t - MatrixXd::Identity(2, 2)).norm() < 1e-12);

  // Rank deficient: Moore-Penrose identities still hold.
  MatrixXd r(2, 2);
  r << 1, 1, 1, 1;
  const MatrixXd rp = pinv(r);
  CHECK((r * rp * r - r).norm() < 1e-12);
  CHECK((rp * r * rp - rp).norm() < 1e-12);
}

TEST_CASE("symmetric eigen bounds and spectral abscissa") {
  MatrixXd s(2, 2);
  s << 3, 1, 1, 3;
  CHECK(sym_eig_max(s) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(sym_eig_min(s) == doctest::Approx(2.0).epsilon(1e-12));

  MatrixXd rot(2, 2);  // eigenvalues -1 +- 2i
  rot << -1, 2, -2, -1;
  CHECK(max_real_eig(rot) == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("numerical rank") {
  MatrixXd m(3, 2);
  m << 1, 2, 2, 4, 3, 6;  // columns proportional
  CHECK(numerical_rank(m) == 1);
  m(2, 1) = 7;
  CHECK(numerical_rank(m) == 2);
}

TEST_CASE("deterministic rng reproduces sequences and respects bounds") {
  DetRng a(1234), b(1234);
  for (int i = 0; i < 100; ++i) {
    const double va = a.uniform(-2.0, 3.0);
    CHECK(va == b.uniform(-2.0, 3.0));
    CHECK(va >= -2.0);
    CHECK(va < 3.0);
  }
  DetRng c(1235);
  bool any_diff = false;
  for (int i = 0; i < 10; ++i) any_diff = any_diff || (a.raw() != c.raw());
  CHECK(any_diff);
}

TEST_CASE("fnv1a64 known vectors") {
  // Standard FNV-1a test vectors.
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64_hex("") == "cbf29ce484222325");
  CHECK(fnv1a64("abc") != fnv1a64("acb"));
}

TEST_CASE("svec pack/unpack round trip preserves inner products") {
  MatrixXd s(3, 3);
  s << 1, 2, 3, 2, 5, -1, 3, -1, 4;
  const VectorXd v = svec_pack(s);
  REQUIRE(v.size() == svec_len(3));
  CHECK((svec_unpack(v, 3) - s).norm() < 1e-14);
  // Euclidean inner product of packed vectors == Frobenius inner product.
  MatrixXd t(3, 3);
  t << 2, 0, 1, 0, 1, 4, 1, 4, -2;
  CHECK(v.dot(svec_pack(t)) == doctest::Approx((s.array() * t.array()).sum()).epsilon(1e-12));
  // Column-major upper triangle with sqrt(2) off-diagonal scaling.
  CHECK(v(0) == 1.0);                                // (0,0)
  CHECK(v(1) == doctest::Approx(2.0 * std::sqrt(2.0)));  // (0,1)
  CHECK(v(2) == 5.0);                                // (1,1)
}

TEST_CASE("condition report formatting") {
  ConditionReport rep;
  rep.add("alpha", true, 1.0, "fine");
  rep.add("beta", false, -0.5, "broken");
  CHECK(!rep.all_pass());
  CHECK(rep.find("alpha") != nullptr);
  CHECK(rep.find("gamma") == nullptr);
  const std::string text = rep.to_text();
  CHECK(text.find("[ok]   alpha: fine") != std::string::npos);
  CHECK(text.find("[FAIL] beta: broken") != std::string::npos);
}

TEST_CASE("run manifest hashes config bytes and parameters, not timestamps") {
  const std::string cfg_a = "/tmp/fauio_test_manifest_a.json";
  const std::string cfg_b = "/tmp/fauio_test_manifest_b.json";
  { std::ofstream(cfg_a) << "{\"x\":1}"; }
  { std::ofstream(cfg_b) << "{\"x\":2}"; }

  RunManifest m1 = make_manifest("synth", cfg_a, {{"theorem", "1"}});
  RunManifest m2 = make_manifest("synth", cfg_a, {{"theorem", "1"}});
  CHECK(m1.run_hash == m2.run_hash);
  CHECK(m1.config_hash == m2.config_hash);
  // Different command or parameter changes the run hash but not the config hash.
  RunManifest m3 = make_manifest("simulate", cfg_a, {{"theorem", "1"}});
  RunManifest m4 = make_manifest("synth", cfg_a, {{"theorem", "2"}});
  CHECK(m3.run_hash != m1.run_hash);
  CHECK(m4.run_hash != m1.run_hash);
  CHECK(m3.config_hash == m1.config_hash);
  // Different config bytes change both.
  RunManifest m5 = make_manifest("synth", cfg_b, {{"theorem", "1"}});
  CHECK(m5.config_hash != m1.config_hash);
  CHECK(m5.run_hash != m1.run_hash);

  const std::string js = manifest_to_json(m1);
  CHECK(js.find("\"run_hash\"") != std::string::npos);
  CHECK(js.find(m1.run_hash) != std::string::npos);
  std::remove(cfg_a.c_str());
  std::remove(cfg_b.c_str());
}
