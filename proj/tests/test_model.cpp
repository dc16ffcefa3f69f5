#include <cmath>
#include <numbers>
#include <random>

#include "discoq/errors.hpp"
#include "discoq/model.hpp"
#include "discoq/rng.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace discoq;

namespace {

CaptionRecord make_record(Shape s, Relation r, Shape o, double sigma,
                          std::mt19937_64& rng, const std::string& id) {
  CaptionRecord rec;
  rec.id = id;
  rec.subject = s;
  rec.relation = r;
  rec.object = o;
  const CaptionTriple triple{s, r, o};
  rec.caption = triple.caption();
  rec.neg_caption = triple.swapped().caption();
  rec.split = Split::Train;
  rec.features = add_noise(mhe(s, r, o), sigma, rng);
  return rec;
}

ClassicalModel random_classical(int dim, std::uint64_t seed) {
  ClassicalModel m(dim);
  std::mt19937_64 rng = substream(seed, "classical");
  m.init(rng);
  return m;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("matcher config widths") {
  MatcherConfig mhe_box;
  CHECK(mhe_box.image_qubits() == 3);
  CHECK(mhe_box.sentence_qubits() == 1);

  MatcherConfig angle_widen;
  angle_widen.encoder = EncoderKind::Angle;
  angle_widen.alignment = Alignment::Widen;
  angle_widen.pca_dim = 9;
  CHECK(angle_widen.image_qubits() == 9);
  CHECK(angle_widen.sentence_qubits() == 9);

  MatcherConfig amp;
  amp.encoder = EncoderKind::Amplitude;
  CHECK(amp.image_qubits() == 12);
}

TEST_CASE("trainable box shapes") {
  SUBCASE("three-qubit box: H walls, chain entanglers, two postselections") {
    QuantumMatcher m(MatcherConfig{});  // mhe/box: 3 image qubits
    const Circuit& box = m.box_circuit();
    CHECK(box.n_qubits == 3);
    int h = 0, crz = 0;
    for (const Gate& g : box.gates) {
      if (g.kind == GateKind::H) ++h;
      if (g.kind == GateKind::CRz) ++crz;
    }
    CHECK(h == 6);  // one wall per layer plus the closing wall
    CHECK(crz == 2);
    CHECK(box.postselect.size() == 2);
    CHECK(box.output_qubits == std::vector<int>{2});
    // The closing wall keeps the box trainable: its entangler angles must
    // reach the surviving amplitudes.
    ParameterVector zero = ParameterVector::zeros(m.parameter_count());
    ParameterVector moved = zero;
    for (int slot : box.referenced_slots()) moved.set(slot, 1.0);
    FeatureVector img = mhe(Shape::Cube, Relation::Left, Shape::Sphere);
    const StateVector a = m.image_state(img, zero);
    const StateVector b = m.image_state(img, moved);
    CHECK(overlap(a, b) < 1.0 - 1e-6);
  }
  SUBCASE("degenerate one-qubit box is the Euler block") {
    MatcherConfig one;
    one.encoder = EncoderKind::Amplitude;
    one.amplitude_qubits = 1;
    QuantumMatcher m(one);
    const Circuit& box = m.box_circuit();
    CHECK(box.n_qubits == 1);
    CHECK(box.gates.size() == 3);
    CHECK(box.postselect.empty());
  }
  SUBCASE("box parameters are one shared block") {
    QuantumMatcher m(MatcherConfig{});
    const Circuit& box = m.box_circuit();
    for (const Gate& g : box.gates) {
      if (g.slot >= 0) {
        CHECK(m.registry().info(g.slot).owner == kImageBoxOwner);
      }
    }
    CHECK(m.registry().block(kImageBoxOwner, 2) ==
          box.referenced_slots());
  }
}

TEST_CASE("widen has no box") {
  MatcherConfig cfg;
  cfg.alignment = Alignment::Widen;
  QuantumMatcher m(cfg);
  CHECK_THROWS_AS(m.box_circuit(), ValidationError);
}

TEST_CASE("score is the overlap of the two pipeline states") {
  std::mt19937_64 rng = substream(41, "score");
  for (Alignment alignment : {Alignment::TrainableBox, Alignment::Widen}) {
    MatcherConfig cfg;
    cfg.alignment = alignment;
    QuantumMatcher m(cfg);
    m.precompile_captions();
    ParameterVector params = m.init_params(rng);

    const FeatureVector img = mhe(Shape::Sphere, Relation::Left, Shape::Cube);
    const std::string caption = "sphere isLeftOf cube";
    const double got = m.score(caption, img, params);

    // Recompose the pipeline by hand.
    const StateVector cap = run(m.caption_circuit(caption), params);
    StateVector image = run(m.image_prep_circuit(img), ParameterVector());
    if (alignment == Alignment::TrainableBox) {
      image = run(m.box_circuit(), params, image);
    }
    CHECK(got == doctest::Approx(overlap(cap, image)).epsilon(1e-12));
    CHECK(got >= 0.0);
    CHECK(got <= 1.0);
  }
}

TEST_CASE("identical engineered states give score one, orthogonal zero") {
  // Image prepared as |000>: the caption side cannot reach score 1 in
  // general, so check the image-vs-image overlap through the public
  // pipeline pieces instead.
  QuantumMatcher m(MatcherConfig{});
  FeatureVector basis;
  basis.values = {1, 0, 0, 0, 0, 0, 0, 0};
  const StateVector a = run(m.image_prep_circuit(basis), ParameterVector());
  const StateVector b = run(m.image_prep_circuit(basis), ParameterVector());
  CHECK(overlap(a, b) == doctest::Approx(1.0));

  FeatureVector other;
  other.values = {0, 1, 0, 0, 0, 0, 0, 0};
  const StateVector c = run(m.image_prep_circuit(other), ParameterVector());
  CHECK(overlap(a, c) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("contrastive loss values") {
  CHECK(contrastive_bce(0.5, 0.5) ==
        doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
  const double near_zero = contrastive_bce(1.0, 0.0);
  CHECK(near_zero > 0.0);
  CHECK(near_zero < 1e-6);
  // Monotonicity: decreasing in p+, increasing in p-.
  CHECK(contrastive_bce(0.8, 0.3) < contrastive_bce(0.7, 0.3));
  CHECK(contrastive_bce(0.8, 0.4) > contrastive_bce(0.8, 0.3));
  CHECK(contrastive_bce(0.2, 0.9) >= 0.0);
}

TEST_CASE("quantum loss gradient matches finite differences") {
  std::mt19937_64 rng = substream(42, "loss-fd");
  std::mt19937_64 noise = substream(42, "loss-noise");
  for (Alignment alignment : {Alignment::TrainableBox, Alignment::Widen}) {
    MatcherConfig cfg;
    cfg.alignment = alignment;
    QuantumMatcher matcher(cfg);
    matcher.precompile_captions();

    const auto rec = make_record(Shape::Cube, Relation::Left, Shape::Cone,
                                 0.1, noise, "t_0");
    for (int draw = 0; draw < 10; ++draw) {
      ParameterVector p = matcher.init_params(rng);
      const auto got = matcher.loss_grad(rec, p);
      CHECK(got.loss == doctest::Approx(matcher.loss(rec, p)).epsilon(1e-12));

      auto value = [&](const std::vector<double>& v) {
        return matcher.loss(rec, ParameterVector(v));
      };
      double err2 = 0.0, norm2 = 0.0;
      for (std::size_t m = 0; m < got.grad.size(); ++m) {
        const double fd =
            testing::finite_difference(value, p.values(), m, 1e-4);
        err2 += (fd - got.grad[m]) * (fd - got.grad[m]);
        norm2 += fd * fd;
      }
      CHECK(std::sqrt(err2) <= 1e-5 * std::max(1.0, std::sqrt(norm2)));
    }
  }
}

TEST_CASE("classical sentence vector") {
  ClassicalModel m(2);
  auto cube = m.noun(Shape::Cube);
  cube[0] = 1.0;
  cube[1] = 2.0;
  auto sphere = m.noun(Shape::Sphere);
  sphere[0] = 3.0;
  sphere[1] = 4.0;
  auto rel = m.relation(Relation::Left);
  rel[0] = 1.0;
  rel[1] = 0.0;
  rel[2] = 1.0;
  rel[3] = 1.0;
  const auto svec =
      classical_sentence_vec(m, Shape::Cube, Relation::Left, Shape::Sphere);
  CHECK(svec == std::vector<double>{3.0, 14.0});

  // Identity relation reduces to the elementwise product.
  rel[0] = 1.0;
  rel[1] = 0.0;
  rel[2] = 0.0;
  rel[3] = 1.0;
  CHECK(classical_sentence_vec(m, Shape::Cube, Relation::Left,
                               Shape::Sphere) ==
        std::vector<double>{3.0, 8.0});

  // Zero relation kills the sentence vector.
  for (auto& x : rel) x = 0.0;
  CHECK(classical_sentence_vec(m, Shape::Cube, Relation::Left,
                               Shape::Sphere) == std::vector<double>{0.0, 0.0});
}

TEST_CASE("classical composition is linear in the object, multiplicative in "
          "the subject") {
  ClassicalModel m = random_classical(4, 77);
  const auto base =
      classical_sentence_vec(m, Shape::Cube, Relation::Right, Shape::Cone);
  for (double& x : m.noun(Shape::Cone)) x *= 2.0;
  const auto scaled_obj =
      classical_sentence_vec(m, Shape::Cube, Relation::Right, Shape::Cone);
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(scaled_obj[i] == doctest::Approx(2.0 * base[i]).epsilon(1e-12));
  }
  for (double& x : m.noun(Shape::Cube)) x *= 2.0;
  const auto scaled_both =
      classical_sentence_vec(m, Shape::Cube, Relation::Right, Shape::Cone);
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(scaled_both[i] == doctest::Approx(4.0 * base[i]).epsilon(1e-12));
  }
}

TEST_CASE("classical loss values") {
  ClassicalModel m(2);  // all zeros: both inner products vanish
  std::vector<double> image{0.3, 0.4};
  const CaptionTriple pos{Shape::Cube, Relation::Left, Shape::Sphere};
  CHECK(classical_loss(m, image, pos, pos.swapped()) ==
        doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("classical loss saturates toward zero") {
  // Drive the positive score to +30 and the negative to -30.
  ClassicalModel m(1);
  m.noun(Shape::Cube)[0] = 1.0;
  m.noun(Shape::Sphere)[0] = 1.0;
  m.relation(Relation::Left)[0] = 30.0;
  m.relation(Relation::Right)[0] = -30.0;
  std::vector<double> image{1.0};
  const CaptionTriple pos{Shape::Cube, Relation::Left, Shape::Sphere};
  CHECK(classical_loss(m, image, pos, pos.swapped()) < 1e-12);
}

TEST_CASE("classical gradient matches finite differences") {
  std::mt19937_64 rng = substream(43, "classical-fd");
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int draw = 0; draw < 20; ++draw) {
    ClassicalModel m = random_classical(3, 1000 + draw);
    std::vector<double> image(3);
    for (double& x : image) x = gauss(rng);
    const CaptionTriple pos{Shape::Cube, Relation::Left, Shape::Cone};
    const auto got = classical_loss_grad(m, image, pos, pos.swapped());

    auto value = [&](const std::vector<double>& v) {
      ClassicalModel probe(3);
      probe.params() = v;
      return classical_loss(probe, image, pos, pos.swapped());
    };
    double err2 = 0.0, norm2 = 0.0;
    for (std::size_t i = 0; i < got.grad.size(); ++i) {
      const double fd =
          testing::finite_difference(value, m.params(), i, 1e-6);
      err2 += (fd - got.grad[i]) * (fd - got.grad[i]);
      norm2 += fd * fd;
    }
    CHECK(std::sqrt(err2) <= 1e-6 * std::max(1.0, std::sqrt(norm2)));
  }
}

TEST_CASE("input-level swap antisymmetry reaches the model") {
  // The multi-hot image vectors feeding score() for "A isLeftOf B" and the
  // swapped relation are exact 4-position block swaps.
  const auto left = mhe(Shape::Sphere, Relation::Left, Shape::Cube);
  const auto right = mhe(Shape::Sphere, Relation::Right, Shape::Cube);
  for (int k = 0; k < 4; ++k) {
    CHECK(left.values[static_cast<std::size_t>(k)] ==
          right.values[static_cast<std::size_t>(k + 4)]);
    CHECK(left.values[static_cast<std::size_t>(k + 4)] ==
          right.values[static_cast<std::size_t>(k)]);
  }
}

TEST_CASE("caption parameter count in both alignment configurations") {
  {
    QuantumMatcher m(MatcherConfig{});
    m.precompile_captions();
    CHECK(m.caption_parameter_count("sphere isLeftOf cylinder") == 12);
  }
  {
    MatcherConfig cfg;
    cfg.encoder = EncoderKind::Angle;
    cfg.alignment = Alignment::Widen;
    cfg.pca_dim = 9;
    QuantumMatcher m(cfg);
    m.precompile_captions();
    CHECK(m.caption_parameter_count("sphere isLeftOf cylinder") == 36);
  }
}

TEST_CASE("angle encoder requires a fitted pipeline") {
  MatcherConfig cfg;
  cfg.encoder = EncoderKind::Angle;
  cfg.alignment = Alignment::Widen;
  cfg.pca_dim = 3;
  QuantumMatcher m(cfg);
  FeatureVector fv;
  fv.values.assign(16, 0.25);
  CHECK_THROWS_AS(m.image_prep_circuit(fv), ValidationError);
}

TEST_CASE("angle pipeline fits PCA and scaler on train records") {
  std::mt19937_64 noise = substream(44, "angle-fit");
  MatcherConfig cfg;
  cfg.encoder = EncoderKind::Angle;
  cfg.alignment = Alignment::Widen;
  cfg.pca_dim = 3;
  QuantumMatcher m(cfg);

  std::vector<CaptionRecord> records;
  for (int i = 0; i < 12; ++i) {
    CaptionRecord rec;
    rec.id = "r" + std::to_string(i);
    rec.split = Split::Train;
    rec.features = synthetic_clip_feature(i % 3, i, 99, 16, 0.05);
    records.push_back(std::move(rec));
  }
  m.fit(records);
  REQUIRE(m.pca().has_value());
  CHECK(m.pca()->output_dim() == 3);
  REQUIRE(m.scaler().has_value());
  CHECK(m.scaler()->mins.size() == 3);

  const Circuit prep = m.image_prep_circuit(records[0].features);
  CHECK(prep.n_qubits == 3);
}

}  // TEST_SUITE
