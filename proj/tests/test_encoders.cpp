#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <set>

#include "discoq/encoders.hpp"
#include "discoq/errors.hpp"
#include "discoq/rng.hpp"
#include "discoq/simulator.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace discoq;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& x : v) x = gauss(rng);
  return v;
}

void check_amplitude_roundtrip(std::span<const double> v, int n_qubits) {
  const Circuit prep = amplitude_encode(v, n_qubits);
  const StateVector sv = run(prep, ParameterVector());
  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  const double inv = 1.0 / std::sqrt(norm2);
  REQUIRE(sv.amplitudes.size() == (std::size_t{1} << n_qubits));
  for (std::size_t i = 0; i < sv.amplitudes.size(); ++i) {
    const double want = i < v.size() ? v[i] * inv : 0.0;
    CHECK(std::abs(sv.amplitudes[i] - std::complex<double>(want)) < 1e-10);
  }
}

}  // namespace

TEST_SUITE("encoders") {

TEST_CASE("one-hot and multi-hot tables") {
  CHECK(ohe(Shape::Cylinder) == std::array<double, 4>{1, 0, 0, 0});
  CHECK(ohe(Shape::Sphere) == std::array<double, 4>{0, 1, 0, 0});
  CHECK(ohe(Shape::Cube) == std::array<double, 4>{0, 0, 1, 0});
  CHECK(ohe(Shape::Cone) == std::array<double, 4>{0, 0, 0, 1});

  CHECK(mhe(Shape::Cube, Relation::Left, Shape::Sphere).values ==
        std::vector<double>{0, 0, 1, 0, 0, 1, 0, 0});
  CHECK(mhe(Shape::Cube, Relation::Right, Shape::Sphere).values ==
        std::vector<double>{0, 1, 0, 0, 0, 0, 1, 0});
  CHECK(mhe(Shape::Cylinder, Relation::Left, Shape::Cone).values ==
        std::vector<double>{1, 0, 0, 0, 0, 0, 0, 1});
  CHECK_THROWS_AS(mhe(Shape::Cube, Relation::Left, Shape::Cube),
                  ValidationError);
}

TEST_CASE("multi-hot vectors separate scenes and swap as blocks") {
  // "A left B" and "B right A" describe the same scene and share one
  // vector by construction, so the 24 captions yield exactly the 12
  // distinct scene encodings (one per ordered shape pair).
  std::set<std::vector<double>> seen;
  for (Shape s : kAllShapes) {
    for (Shape o : kAllShapes) {
      if (s == o) continue;
      for (Relation r : kAllRelations) {
        seen.insert(mhe(s, r, o).values);
      }
    }
  }
  CHECK(seen.size() == 12);
  for (Shape s : kAllShapes) {
    for (Shape o : kAllShapes) {
      if (s == o) continue;
      CHECK(mhe(s, Relation::Left, o).values ==
            mhe(o, Relation::Right, s).values);
      CHECK(mhe(s, Relation::Left, o).values !=
            mhe(s, Relation::Right, o).values);
    }
  }

  for (Shape s : kAllShapes) {
    for (Shape o : kAllShapes) {
      if (s == o) continue;
      const auto left = mhe(s, Relation::Left, o).values;
      const auto right = mhe(s, Relation::Right, o).values;
      for (int k = 0; k < 4; ++k) {
        CHECK(left[static_cast<std::size_t>(k)] ==
              right[static_cast<std::size_t>(k + 4)]);
        CHECK(left[static_cast<std::size_t>(k + 4)] ==
              right[static_cast<std::size_t>(k)]);
      }
    }
  }
}

TEST_CASE("noise: determinism and zero-sigma identity") {
  const FeatureVector base = mhe(Shape::Cube, Relation::Left, Shape::Sphere);
  std::mt19937_64 a = substream(5, "noise");
  std::mt19937_64 b = substream(5, "noise");
  const FeatureVector na = add_noise(base, 0.1, a);
  const FeatureVector nb = add_noise(base, 0.1, b);
  CHECK(na.values == nb.values);

  std::mt19937_64 c = substream(5, "noise");
  CHECK(add_noise(base, 0.0, c).values == base.values);
  CHECK_THROWS_AS(add_noise(base, -1.0, c), ValidationError);
}

TEST_CASE("noise: empirical standard deviation within 2 percent") {
  std::mt19937_64 rng = substream(6, "noise-mc");
  FeatureVector zero;
  zero.values.assign(1, 0.0);
  const double sigma = 0.35;
  const int n = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = add_noise(zero, sigma, rng).values[0];
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sum2 / n - mean * mean);
  CHECK(std::abs(sd - sigma) < 0.02 * sigma);
}

TEST_CASE("pca: axis-aligned data recovers the axis with positive sign") {
  std::vector<std::vector<double>> data;
  for (double x : {-3.0, -1.0, 0.5, 2.0, 4.0}) data.push_back({x, 0.0});
  const PcaModel m = pca_fit(data, 1);
  REQUIRE(m.components.size() == 1);
  CHECK(m.components[0][0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(m.components[0][1]) < 1e-9);
}

TEST_CASE("pca: full-rank reconstruction") {
  std::mt19937_64 rng = substream(7, "pca-recon");
  std::vector<std::vector<double>> data;
  for (int i = 0; i < 12; ++i) data.push_back(random_vector(rng, 4));
  const PcaModel m = pca_fit(data, 4);
  for (const auto& v : data) {
    const auto proj = pca_apply(m, v);
    std::vector<double> recon = m.mean;
    for (std::size_t c = 0; c < m.components.size(); ++c) {
      for (std::size_t j = 0; j < recon.size(); ++j) {
        recon[j] += proj[c] * m.components[c][j];
      }
    }
    for (std::size_t j = 0; j < recon.size(); ++j) {
      CHECK(recon[j] == doctest::Approx(v[j]).epsilon(1e-8));
    }
  }
}

TEST_CASE("pca matches the Jacobi oracle on random data") {
  std::mt19937_64 rng = substream(8, "pca-jacobi");
  std::vector<std::vector<double>> data;
  for (int i = 0; i < 20; ++i) data.push_back(random_vector(rng, 6));
  const int k = 3;
  const PcaModel m = pca_fit(data, k);

  // Sample covariance for the oracle.
  const std::size_t d = 6;
  std::vector<double> mean(d, 0.0);
  for (const auto& row : data) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += row[j];
  }
  for (double& x : mean) x /= static_cast<double>(data.size());
  std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
  for (const auto& row : data) {
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        cov[i][j] += (row[i] - mean[i]) * (row[j] - mean[j]) /
                     static_cast<double>(data.size() - 1);
      }
    }
  }
  const auto eig = testing::jacobi_eigen(cov);
  for (int c = 0; c < k; ++c) {
    CHECK(m.explained_variance[static_cast<std::size_t>(c)] ==
          doctest::Approx(eig[static_cast<std::size_t>(c)].first)
              .epsilon(1e-8));
    // Up to sign.
    double dot = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      dot += m.components[static_cast<std::size_t>(c)][j] *
             eig[static_cast<std::size_t>(c)].second[j];
    }
    const double sign = dot >= 0 ? 1.0 : -1.0;
    for (std::size_t j = 0; j < d; ++j) {
      CHECK(m.components[static_cast<std::size_t>(c)][j] ==
            doctest::Approx(sign * eig[static_cast<std::size_t>(c)].second[j])
                .epsilon(1e-6));
    }
  }
}

TEST_CASE("pca components are orthonormal") {
  std::mt19937_64 rng = substream(9, "pca-ortho");
  std::vector<std::vector<double>> data;
  for (int i = 0; i < 30; ++i) data.push_back(random_vector(rng, 5));
  const PcaModel m = pca_fit(data, 4);
  for (std::size_t a = 0; a < m.components.size(); ++a) {
    for (std::size_t b = 0; b < m.components.size(); ++b) {
      double dot = 0.0;
      for (std::size_t j = 0; j < m.components[a].size(); ++j) {
        dot += m.components[a][j] * m.components[b][j];
      }
      CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) < 1e-9);
    }
  }
}

TEST_CASE("pca is an isometry on a k-dimensional affine subspace") {
  std::mt19937_64 rng = substream(10, "pca-isometry");
  // Data = offset + combinations of 3 fixed directions inside R^8.
  const int d = 8, k = 3;
  std::vector<std::vector<double>> basis;
  for (int c = 0; c < k; ++c) basis.push_back(random_vector(rng, d));
  const std::vector<double> offset = random_vector(rng, d);
  std::vector<std::vector<double>> data;
  for (int i = 0; i < 40; ++i) {
    std::vector<double> row = offset;
    const auto coef = random_vector(rng, k);
    for (int c = 0; c < k; ++c) {
      for (int j = 0; j < d; ++j) {
        row[static_cast<std::size_t>(j)] +=
            coef[static_cast<std::size_t>(c)] *
            basis[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)];
      }
    }
    data.push_back(std::move(row));
  }
  const PcaModel m = pca_fit(data, k);
  for (int trials = 0; trials < 10; ++trials) {
    const auto& a = data[rng() % data.size()];
    const auto& b = data[rng() % data.size()];
    double dist2 = 0.0;
    for (int j = 0; j < d; ++j) {
      const double diff = a[static_cast<std::size_t>(j)] -
                          b[static_cast<std::size_t>(j)];
      dist2 += diff * diff;
    }
    const auto pa = pca_apply(m, a);
    const auto pb = pca_apply(m, b);
    double proj2 = 0.0;
    for (int c = 0; c < k; ++c) {
      const double diff = pa[static_cast<std::size_t>(c)] -
                          pb[static_cast<std::size_t>(c)];
      proj2 += diff * diff;
    }
    CHECK(std::sqrt(proj2) == doctest::Approx(std::sqrt(dist2)).epsilon(1e-8));
  }
}

TEST_CASE("pca error paths") {
  std::vector<std::vector<double>> tiny = {{1.0, 2.0}, {1.0, 2.0}};
  CHECK_THROWS_AS(pca_fit(tiny, 1), ValidationError);  // zero variance
  std::vector<std::vector<double>> flat = {{0.0, 0.0}, {1.0, 0.0},
                                           {2.0, 0.0}};
  CHECK_THROWS_AS(pca_fit(flat, 2), ValidationError);  // k exceeds rank
  CHECK_THROWS_AS(pca_fit(flat, 3), ValidationError);  // k > d
}

TEST_CASE("amplitude encoding basics") {
  SUBCASE("a basis vector maps to a basis state") {
    const std::vector<double> v{1, 0, 0, 0, 0, 0, 0, 0};
    check_amplitude_roundtrip(v, 3);
  }
  SUBCASE("a uniform vector maps to uniform amplitudes") {
    const std::vector<double> v{1, 1, 1, 1};
    const Circuit prep = amplitude_encode(v);
    CHECK(prep.n_qubits == 2);
    const StateVector sv = run(prep, ParameterVector());
    for (const auto& amp : sv.amplitudes) {
      CHECK(std::abs(amp - std::complex<double>(0.5)) < 1e-12);
    }
  }
  SUBCASE("zero vectors are rejected") {
    const std::vector<double> v{0, 0, 0, 0};
    CHECK_THROWS_AS(amplitude_encode(v), ValidationError);
  }
  SUBCASE("signs survive") {
    const std::vector<double> v{0.5, -0.5, -0.5, 0.5};
    check_amplitude_roundtrip(v, 2);
  }
}

TEST_CASE("amplitude encoding round-trips random vectors") {
  std::mt19937_64 rng = substream(11, "amp");
  for (int i = 0; i < 30; ++i) {
    const int len = 2 + static_cast<int>(rng() % 63);
    check_amplitude_roundtrip(random_vector(rng, len), [len] {
      int n = 1;
      while ((1 << n) < len) ++n;
      return n;
    }());
  }
  // The paper-scale case: 512 features on a 12-qubit register.
  check_amplitude_roundtrip(random_vector(rng, 512), 12);
}

TEST_CASE("amplitude encoding output is always unit norm") {
  std::mt19937_64 rng = substream(12, "amp-norm");
  for (int i = 0; i < 10; ++i) {
    std::vector<double> v = random_vector(rng, 24);
    for (double& x : v) x *= 37.5;  // far from normalized
    const StateVector sv = run(amplitude_encode(v), ParameterVector());
    CHECK(std::abs(sv.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("angle scaler maps the training range onto [0, pi]") {
  AngleScaler s = AngleScaler::fit({{0.0, -2.0}, {2.0, 2.0}, {1.0, 0.0}});
  const auto lo = s.rescale(std::vector<double>{0.0, -2.0});
  const auto hi = s.rescale(std::vector<double>{2.0, 2.0});
  CHECK(lo[0] == doctest::Approx(0.0));
  CHECK(lo[1] == doctest::Approx(0.0));
  CHECK(hi[0] == doctest::Approx(std::numbers::pi));
  CHECK(hi[1] == doctest::Approx(std::numbers::pi));

  // Degenerate feature pins the angle at pi/2.
  AngleScaler flat = AngleScaler::fit({{1.0}, {1.0}});
  CHECK(flat.rescale(std::vector<double>{1.0})[0] ==
        doctest::Approx(std::numbers::pi / 2));
}

TEST_CASE("angle encoding: all-zero rescaled features give plain H layers") {
  AngleScaler s;
  s.mins = {0.0, 0.0, 0.0};
  s.maxs = {1.0, 1.0, 1.0};
  const std::vector<double> v{0.0, 0.0, 0.0};
  const StateVector sv = run(angle_encode(v, s), ParameterVector());
  const double want = 1.0 / std::sqrt(8.0);
  for (const auto& amp : sv.amplitudes) {
    CHECK(std::abs(amp - std::complex<double>(want)) < 1e-12);
  }
}

TEST_CASE("angle encoding matches the dense oracle with one active angle") {
  AngleScaler s;
  s.mins = {0.0, 0.0, 0.0};
  s.maxs = {1.0, 1.0, 1.0};
  const std::vector<double> v{1.0, 0.0, 0.0};  // rescales to (pi, 0, 0)
  const Circuit c = angle_encode(v, s);
  const StateVector got = run(c, ParameterVector());
  const StateVector want = testing::dense_run(c, ParameterVector());
  REQUIRE(got.amplitudes.size() == want.amplitudes.size());
  for (std::size_t i = 0; i < got.amplitudes.size(); ++i) {
    CHECK(std::abs(got.amplitudes[i] - want.amplitudes[i]) < 1e-12);
  }
  // Exactly one conditional phase of pi: the CRz count with nonzero angle.
  int active = 0;
  for (const Gate& g : c.gates) {
    if (g.kind == GateKind::CRz && std::abs(g.angle) > 1e-12) ++active;
  }
  CHECK(active == 1);
}

TEST_CASE("angle encoding is deterministic and length-checked") {
  AngleScaler s;
  s.mins = {0.0, 0.0};
  s.maxs = {1.0, 1.0};
  const std::vector<double> v{0.25, 0.75};
  const StateVector a = run(angle_encode(v, s), ParameterVector());
  const StateVector b = run(angle_encode(v, s), ParameterVector());
  CHECK(overlap(a, b) == doctest::Approx(1.0).epsilon(1e-12));

  const std::vector<double> wrong{0.25, 0.75, 0.5};
  CHECK_THROWS_AS(angle_encode(wrong, s), ValidationError);
  AngleScaler one;
  one.mins = {0.0};
  one.maxs = {1.0};
  const std::vector<double> single{0.5};
  CHECK_THROWS_AS(angle_encode(single, one), ValidationError);
}

TEST_CASE("angle encoding fidelity falls as one feature sweeps away") {
  AngleScaler s;
  s.mins = {0.0, 0.0, 0.0, 0.0};
  s.maxs = {1.0, 1.0, 1.0, 1.0};
  const std::vector<double> base{0.0, 0.4, 0.6, 0.2};
  const StateVector ref = run(angle_encode(base, s), ParameterVector());
  double prev = 1.0;
  for (int step = 1; step <= 10; ++step) {
    std::vector<double> v = base;
    v[0] = static_cast<double>(step) / 10.0;
    const double fid = overlap(ref, run(angle_encode(v, s), ParameterVector()));
    CHECK(fid <= prev + 1e-12);
    prev = fid;
  }
}

TEST_CASE("feature CSV round-trips bit-exactly") {
  std::mt19937_64 rng = substream(13, "csv");
  std::vector<std::pair<std::string, FeatureVector>> rows;
  for (int i = 0; i < 6; ++i) {
    FeatureVector fv;
    fv.values = random_vector(rng, 5);
    rows.emplace_back("0_" + std::to_string(i), std::move(fv));
  }
  const std::string path = "features_test.csv";
  save_features(rows, path);
  const auto loaded = load_features(path);
  REQUIRE(loaded.size() == rows.size());
  for (const auto& [id, fv] : rows) {
    REQUIRE(loaded.count(id) == 1);
    CHECK(loaded.at(id).values == fv.values);  // bit-exact
  }
  std::remove(path.c_str());
}

TEST_CASE("feature CSV error paths") {
  const std::string path = "features_bad.csv";
  {
    std::ofstream out(path);
    out << "id,f0,f1\nrow0,1.0,2.0\nrow1,3.0\n";
  }
  CHECK_THROWS_AS(load_features(path), ValidationError);  // ragged
  {
    std::ofstream out(path);
    out << "";
  }
  CHECK_THROWS_AS(load_features(path), ValidationError);  // empty
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_features("missing.csv"), ValidationError);
}

TEST_CASE("synthetic features cluster by caption") {
  const auto a0 = synthetic_clip_feature(0, 0, 1, 64, 0.05);
  const auto a1 = synthetic_clip_feature(0, 1, 1, 64, 0.05);
  const auto b0 = synthetic_clip_feature(1, 0, 1, 64, 0.05);
  auto dist = [](const FeatureVector& x, const FeatureVector& y) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < x.values.size(); ++i) {
      const double diff = x.values[i] - y.values[i];
      d2 += diff * diff;
    }
    return std::sqrt(d2);
  };
  CHECK(dist(a0, a1) < 1.5);   // same cluster, sigma 0.05 on 64 dims
  CHECK(dist(a0, b0) > 5.0);   // different centers of unit scale
  // Determinism.
  CHECK(synthetic_clip_feature(0, 0, 1, 64, 0.05).values == a0.values);
}

}  // TEST_SUITE
