// Copyright 2025 The discoq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "discoq/encoders.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>

#include "discoq/errors.hpp"
#include "discoq/rng.hpp"
#include "discoq/simulator.hpp"

namespace discoq {

std::string_view shape_name(Shape s) {
  switch (s) {
    case Shape::Cylinder:
      return "cylinder";
    case Shape::Sphere:
      return "sphere";
    case Shape::Cube:
      return "cube";
    case Shape::Cone:
      return "cone";
  }
  throw ValidationError("unknown shape");
}

Shape shape_from_name(std::string_view s) {
  for (Shape sh : kAllShapes) {
    if (shape_name(sh) == s) return sh;
  }
  throw ValidationError("unknown shape name: " + std::string(s));
}

std::string_view relation_name(Relation r) {
  return r == Relation::Left ? "left" : "right";
}

Relation relation_from_name(std::string_view s) {
  if (s == "left") return Relation::Left;
  if (s == "right") return Relation::Right;
  throw ValidationError("unknown relation name: " + std::string(s));
}

std::string_view relation_word(Relation r) {
  return r == Relation::Left ? "isLeftOf" : "isRightOf";
}

Relation opposite(Relation r) {
  return r == Relation::Left ? Relation::Right : Relation::Left;
}

std::array<double, 4> ohe(Shape s) {
  std::array<double, 4> v{0.0, 0.0, 0.0, 0.0};
  v[static_cast<std::size_t>(s)] = 1.0;
  return v;
}

FeatureVector mhe(Shape subject, Relation relation, Shape object) {
  if (subject == object) {
    throw ValidationError("mhe requires distinct shapes");
  }
  const auto subj = ohe(subject);
  const auto obj = ohe(object);
  FeatureVector out;
  out.source = FeatureVector::Source::Mhe;
  out.values.reserve(8);
  const auto& first = relation == Relation::Left ? subj : obj;
  const auto& second = relation == Relation::Left ? obj : subj;
  out.values.insert(out.values.end(), first.begin(), first.end());
  out.values.insert(out.values.end(), second.begin(), second.end());
  return out;
}

FeatureVector add_noise(const FeatureVector& v, double sigma,
                        std::mt19937_64& rng) {
  if (sigma < 0.0) throw ValidationError("noise sigma must be >= 0");
  FeatureVector out = v;
  if (sigma == 0.0) return out;
  std::normal_distribution<double> gauss(0.0, sigma);
  for (double& x : out.values) x += gauss(rng);
  return out;
}

namespace {

std::vector<double> matvec(const std::vector<std::vector<double>>& m,
                           const std::vector<double>& v) {
  std::vector<double> out(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) sum += m[i][j] * v[j];
    out[i] = sum;
  }
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

void sign_normalize(std::vector<double>& v) {
  for (double x : v) {
    if (std::abs(x) > 1e-12) {
      if (x < 0.0) {
        for (double& y : v) y = -y;
      }
      return;
    }
  }
}

}  // namespace

PcaModel pca_fit(const std::vector<std::vector<double>>& data, int k) {
  if (data.empty()) throw ValidationError("pca_fit needs data");
  const std::size_t d = data[0].size();
  for (const auto& row : data) {
    if (row.size() != d) throw ValidationError("pca_fit rows are ragged");
  }
  if (k < 1 || k > static_cast<int>(d)) {
    throw ValidationError("pca_fit k out of range");
  }

  PcaModel model;
  model.mean.assign(d, 0.0);
  for (const auto& row : data) {
    for (std::size_t j = 0; j < d; ++j) model.mean[j] += row[j];
  }
  for (double& m : model.mean) m /= static_cast<double>(data.size());

  // Sample covariance of the centered data.
  std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
  const double denom =
      data.size() > 1 ? static_cast<double>(data.size() - 1) : 1.0;
  for (const auto& row : data) {
    for (std::size_t i = 0; i < d; ++i) {
      const double ci = row[i] - model.mean[i];
      for (std::size_t j = i; j < d; ++j) {
        cov[i][j] += ci * (row[j] - model.mean[j]) / denom;
      }
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < i; ++j) cov[i][j] = cov[j][i];
  }

  double total_scale = 0.0;
  for (std::size_t i = 0; i < d; ++i) total_scale += std::abs(cov[i][i]);
  const double rank_tol = std::max(total_scale, 1.0) * 1e-12;

  constexpr double kTol = 1e-10;
  constexpr int kMaxIters = 10000;
  std::mt19937_64 rng(0x9d2c5680u);  // fixed internal seed, deterministic
  std::normal_distribution<double> gauss(0.0, 1.0);

  for (int comp = 0; comp < k; ++comp) {
    std::vector<double> v(d);
    for (double& x : v) x = gauss(rng);
    double norm = std::sqrt(dot(v, v));
    for (double& x : v) x /= norm;

    double eigenvalue = 0.0;
    bool converged = false;
    int iters = 0;
    for (; iters < kMaxIters; ++iters) {
      std::vector<double> w = matvec(cov, v);
      eigenvalue = dot(v, w);
      const double wnorm = std::sqrt(dot(w, w));
      if (wnorm <= rank_tol) {
        // Covariance annihilates the remaining subspace: rank exhausted.
        throw ValidationError(
            "pca_fit: k exceeds the rank of the data covariance");
      }
      for (double& x : w) x /= wnorm;
      double diff = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double e = w[j] - v[j];
        diff += e * e;
      }
      v = std::move(w);
      if (std::sqrt(diff) < kTol) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw ValidationError("pca_fit power method did not converge after " +
                            std::to_string(iters) + " iterations");
    }
    if (eigenvalue <= rank_tol) {
      throw ValidationError(
          "pca_fit: k exceeds the rank of the data covariance");
    }
    // Deflate: cov <- cov - lambda v v^T.
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        cov[i][j] -= eigenvalue * v[i] * v[j];
      }
    }
    sign_normalize(v);
    model.components.push_back(std::move(v));
    model.explained_variance.push_back(eigenvalue);
  }
  return model;
}

std::vector<double> pca_apply(const PcaModel& m, std::span<const double> v) {
  if (static_cast<int>(v.size()) != m.input_dim()) {
    throw ValidationError("pca_apply dimension mismatch");
  }
  std::vector<double> centered(v.begin(), v.end());
  for (std::size_t j = 0; j < centered.size(); ++j) centered[j] -= m.mean[j];
  std::vector<double> out(m.components.size(), 0.0);
  for (std::size_t c = 0; c < m.components.size(); ++c) {
    out[c] = dot(m.components[c], centered);
  }
  return out;
}

namespace {

// Uniformly controlled Ry: rotation angles alpha[j], one per basis state j
// of the control qubits (controls[0] holds j's most significant bit),
// decomposed into 2^k plain Ry gates interleaved with CNOTs whose controls
// follow the Gray-code ruler sequence.
void emit_multiplexed_ry(std::vector<Gate>& gates,
                         std::span<const int> controls, int target,
                         const std::vector<double>& alpha) {
  const int k = static_cast<int>(controls.size());
  if (k == 0) {
    gates.push_back({GateKind::Ry, target, -1, -1, alpha[0]});
    return;
  }
  const std::size_t n = std::size_t{1} << k;
  std::vector<double> theta(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t gray = i ^ (i >> 1);
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const int parity = std::popcount(gray & j) & 1;
      sum += (parity ? -1.0 : 1.0) * alpha[j];
    }
    theta[i] = sum / static_cast<double>(n);
  }
  for (std::size_t i = 0; i < n; ++i) {
    gates.push_back({GateKind::Ry, target, -1, -1, theta[i]});
    const int bit = (i + 1 < n)
                        ? std::countr_zero(i + 1)
                        : (k - 1);  // final CNOT clears the accumulated mask
    const int control = controls[static_cast<std::size_t>(k - 1 - bit)];
    gates.push_back({GateKind::CNOT, target, control});
  }
}

}  // namespace

Circuit amplitude_encode(std::span<const double> v, int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw ValidationError("amplitude_encode qubit count out of range");
  }
  const std::size_t dim = std::size_t{1} << n_qubits;
  if (v.empty() || v.size() > dim) {
    throw ValidationError("amplitude_encode input length does not fit");
  }
  std::vector<double> x(dim, 0.0);
  std::copy(v.begin(), v.end(), x.begin());
  double norm2 = 0.0;
  for (double a : x) norm2 += a * a;
  if (norm2 <= 0.0) {
    throw ValidationError("amplitude_encode requires a nonzero vector");
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& a : x) a *= inv;

  Circuit c;
  c.n_qubits = n_qubits;
  for (int q = 0; q < n_qubits; ++q) c.output_qubits.push_back(q);

  // Level q splits each block of size 2^(n-q) in half. All levels above the
  // last use non-negative half norms; the last level carries the signs.
  std::vector<int> controls;
  for (int q = 0; q < n_qubits; ++q) {
    const std::size_t blocks = std::size_t{1} << q;
    const std::size_t block_len = dim >> q;
    std::vector<double> alpha(blocks, 0.0);
    for (std::size_t j = 0; j < blocks; ++j) {
      const double* block = x.data() + j * block_len;
      if (q + 1 < n_qubits) {
        double top = 0.0, bottom = 0.0;
        for (std::size_t t = 0; t < block_len / 2; ++t) {
          top += block[t] * block[t];
          bottom += block[block_len / 2 + t] * block[block_len / 2 + t];
        }
        alpha[j] = 2.0 * std::atan2(std::sqrt(bottom), std::sqrt(top));
      } else {
        alpha[j] = 2.0 * std::atan2(block[1], block[0]);
      }
    }
    emit_multiplexed_ry(c.gates, controls, q, alpha);
    controls.push_back(q);
  }
  return c;
}

Circuit amplitude_encode(std::span<const double> v) {
  if (v.empty()) throw ValidationError("amplitude_encode needs input");
  int n = 1;
  while ((std::size_t{1} << n) < v.size()) ++n;
  return amplitude_encode(v, n);
}

AngleScaler AngleScaler::fit(const std::vector<std::vector<double>>& data) {
  if (data.empty()) throw ValidationError("AngleScaler::fit needs data");
  const std::size_t d = data[0].size();
  AngleScaler s;
  s.mins.assign(d, std::numeric_limits<double>::infinity());
  s.maxs.assign(d, -std::numeric_limits<double>::infinity());
  for (const auto& row : data) {
    if (row.size() != d) throw ValidationError("AngleScaler rows are ragged");
    for (std::size_t j = 0; j < d; ++j) {
      s.mins[j] = std::min(s.mins[j], row[j]);
      s.maxs[j] = std::max(s.maxs[j], row[j]);
    }
  }
  return s;
}

std::vector<double> AngleScaler::rescale(std::span<const double> v) const {
  if (v.size() != mins.size()) {
    throw ValidationError("AngleScaler dimension mismatch");
  }
  std::vector<double> out(v.size(), 0.0);
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double range = maxs[j] - mins[j];
    if (range <= 0.0) {
      out[j] = std::numbers::pi / 2.0;  // degenerate feature
    } else {
      out[j] = std::numbers::pi * (v[j] - mins[j]) / range;
    }
  }
  return out;
}

Circuit angle_encode(std::span<const double> v, const AngleScaler& scaler) {
  const int n = static_cast<int>(v.size());
  if (n < 2) throw ValidationError("angle_encode needs at least 2 features");
  const std::vector<double> angles = scaler.rescale(v);

  Circuit c;
  c.n_qubits = n;
  for (int q = 0; q < n; ++q) {
    c.gates.push_back({GateKind::H, q});
    c.output_qubits.push_back(q);
  }
  for (int q = 0; q < n; ++q) {
    c.gates.push_back({GateKind::CRz, (q + 1) % n, q, -1,
                       angles[static_cast<std::size_t>(q)]});
  }
  return c;
}

std::map<std::string, FeatureVector> load_features(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open feature file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("id,", 0) != 0) {
    throw ValidationError("feature file missing `id,f0,...` header: " + path);
  }

  std::map<std::string, FeatureVector> out;
  std::size_t expected = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::size_t comma = line.find(',');
    if (comma == std::string::npos) {
      throw ValidationError("feature file line " + std::to_string(line_no) +
                            ": missing values");
    }
    FeatureVector fv;
    fv.source = FeatureVector::Source::External;
    const std::string id = line.substr(0, comma);
    std::size_t pos = comma + 1;
    while (pos <= line.size()) {
      std::size_t end = line.find(',', pos);
      if (end == std::string::npos) end = line.size();
      double value = 0.0;
      const auto [ptr, ec] =
          std::from_chars(line.data() + pos, line.data() + end, value);
      if (ec != std::errc() || ptr != line.data() + end) {
        throw ValidationError("feature file line " + std::to_string(line_no) +
                              ": bad float");
      }
      fv.values.push_back(value);
      pos = end + 1;
    }
    if (expected == 0) {
      expected = fv.values.size();
    } else if (fv.values.size() != expected) {
      throw ValidationError("feature file line " + std::to_string(line_no) +
                            ": ragged row");
    }
    if (!out.emplace(id, std::move(fv)).second) {
      throw ValidationError("feature file line " + std::to_string(line_no) +
                            ": duplicate id " + id);
    }
  }
  if (out.empty()) throw ValidationError("feature file has no rows: " + path);
  return out;
}

void save_features(
    std::span<const std::pair<std::string, FeatureVector>> rows,
    const std::string& path) {
  if (rows.empty()) throw ValidationError("save_features needs rows");
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write feature file: " + path);
  const std::size_t d = rows[0].second.values.size();
  out << "id";
  for (std::size_t j = 0; j < d; ++j) out << ",f" << j;
  out << '\n';
  char buf[64];
  for (const auto& [id, fv] : rows) {
    if (fv.values.size() != d) {
      throw ValidationError("save_features rows are ragged");
    }
    out << id;
    for (double v : fv.values) {
      std::snprintf(buf, sizeof(buf), ",%.17g", v);
      out << buf;
    }
    out << '\n';
  }
}

FeatureVector synthetic_clip_feature(int caption_index, int image_index,
                                     std::uint64_t seed, int dim,
                                     double cluster_sigma) {
  std::mt19937_64 center_rng =
      substream(seed, "clip-center", static_cast<std::uint64_t>(caption_index));
  std::normal_distribution<double> unit(0.0, 1.0);
  FeatureVector fv;
  fv.source = FeatureVector::Source::External;
  fv.values.resize(static_cast<std::size_t>(dim));
  for (double& x : fv.values) x = unit(center_rng);

  std::mt19937_64 noise_rng = substream(
      seed, "clip-image",
      static_cast<std::uint64_t>(caption_index) * 100000u +
          static_cast<std::uint64_t>(image_index));
  std::normal_distribution<double> jitter(0.0, cluster_sigma);
  for (double& x : fv.values) x += jitter(noise_rng);
  return fv;
}

}  // namespace discoq
