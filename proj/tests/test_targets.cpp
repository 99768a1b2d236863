#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "tubelink/geometry.hpp"
#include "tubelink/targets.hpp"

using namespace tubelink;

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (static_cast<double>(rng() >> 11) * 0x1.0p-53) * (hi - lo);
}

Box random_box(std::mt19937_64& rng) {
  // Center coordinates at least 1 in magnitude; the encoding divides by
  // them.
  Box b;
  b.cx = uniform(rng, 1.0, 500.0) * (rng() % 2 ? 1.0 : -1.0);
  b.cy = uniform(rng, 1.0, 500.0) * (rng() % 2 ? 1.0 : -1.0);
  b.w = uniform(rng, 0.5, 300.0);
  b.h = uniform(rng, 0.5, 300.0);
  return b;
}

TubePrediction perfect_prediction(int num_classes, int gt_class,
                                  const std::vector<Offsets>& gt) {
  TubePrediction p;
  p.class_probs.assign(num_classes + 1, 0.0);
  p.class_probs[gt_class] = 1.0;
  p.per_frame_offsets.assign(gt.size(), std::vector<Offsets>(num_classes));
  if (gt_class > 0) {
    for (std::size_t t = 0; t < gt.size(); ++t) {
      p.per_frame_offsets[t][gt_class - 1] = gt[t];
    }
  }
  return p;
}

}  // namespace

TEST_CASE("encode examples") {
  const Box b{10, 10, 20, 20};
  const Box anchor{5, 5, 10, 10};
  const Offsets o = encode(b, anchor);
  CHECK(o.dx == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(o.dy == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(o.dw == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(o.dh == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  CHECK(encode(anchor, anchor) == Offsets{});
  CHECK_THROWS_AS(encode(b, Box{0, 5, 10, 10}), std::invalid_argument);
  CHECK_THROWS_AS(encode(b, Box{5, 1e-12, 10, 10}), std::invalid_argument);
}

TEST_CASE("decode examples") {
  const Box anchor{5, 5, 10, 10};
  CHECK(decode(Offsets{}, anchor) == anchor);
  const Box b = decode(Offsets{1, 1, std::log(2.0), std::log(2.0)}, anchor);
  CHECK(b.cx == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(b.cy == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(b.w == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(b.h == doctest::Approx(20.0).epsilon(1e-12));
  CHECK_THROWS_AS(decode(Offsets{0, 0, 1e9, 0}, anchor), std::overflow_error);
}

TEST_CASE("encode/decode round trip at 1e-9 relative error") {
  std::mt19937_64 rng(17);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const Box b = random_box(rng);
    const Box anchor = random_box(rng);
    const Box r = decode(encode(b, anchor), anchor);
    worst = std::max(worst, std::abs(r.cx - b.cx) / std::abs(b.cx));
    worst = std::max(worst, std::abs(r.cy - b.cy) / std::abs(b.cy));
    worst = std::max(worst, std::abs(r.w - b.w) / b.w);
    worst = std::max(worst, std::abs(r.h - b.h) / b.h);
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("smooth L1 values") {
  CHECK(smooth_l1(0.0) == 0.0);
  CHECK(smooth_l1(0.5) == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(smooth_l1(2.0) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(smooth_l1(-2.0) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("smooth L1 is C1 at |x| = 1") {
  // Both branches give 0.5 at the joint.
  CHECK(smooth_l1(1.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(smooth_l1(-1.0) == doctest::Approx(0.5).epsilon(1e-12));
  // One-sided finite-difference slopes agree to 1e-4.
  const double eps = 1e-6;
  const double left = (smooth_l1(1.0) - smooth_l1(1.0 - eps)) / eps;
  const double right = (smooth_l1(1.0 + eps) - smooth_l1(1.0)) / eps;
  CHECK(std::abs(left - 1.0) < 1e-4);
  CHECK(std::abs(right - 1.0) < 1e-4);
  const double nleft = (smooth_l1(-1.0 + eps) - smooth_l1(-1.0)) / eps;
  const double nright = (smooth_l1(-1.0) - smooth_l1(-1.0 - eps)) / eps;
  CHECK(std::abs(nleft + 1.0) < 1e-4);
  CHECK(std::abs(nright + 1.0) < 1e-4);
  CHECK(smooth_l1_grad(1.0) == 1.0);
  CHECK(smooth_l1_grad(-1.0) == -1.0);
}

TEST_CASE("tube loss examples") {
  const int T = 3;
  std::vector<Offsets> gt(T);
  gt[0] = {0.1, -0.2, 0.3, 0.0};

  // Perfect prediction: zero loss.
  const auto perfect = perfect_prediction(2, 1, gt);
  CHECK(tube_loss(perfect, 1, gt) == 0.0);

  // Background with p0 = 0.5: pure cross entropy, no regression term even
  // with wild offsets.
  TubePrediction bg = perfect_prediction(2, 0, gt);
  bg.class_probs = {0.5, 0.25, 0.25};
  for (auto& row : bg.per_frame_offsets) {
    for (auto& o : row) o = {9, 9, 9, 9};
  }
  CHECK(tube_loss(bg, 0, gt) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  // One coordinate off by 0.5 in one frame: a single smooth-L1 term.
  TubePrediction off = perfect_prediction(2, 1, gt);
  off.per_frame_offsets[1][0].dx += 0.5;
  CHECK(tube_loss(off, 1, gt) == doctest::Approx(0.125).epsilon(1e-12));

  // Zero probability on the true class: +inf, not a crash.
  TubePrediction zero = perfect_prediction(2, 1, gt);
  zero.class_probs = {1.0, 0.0, 0.0};
  CHECK(tube_loss(zero, 1, gt) == std::numeric_limits<double>::infinity());

  // Shape violations.
  TubePrediction bad = perfect_prediction(2, 1, gt);
  bad.class_probs = {0.5, 0.4, 0.2};  // sums to 1.1
  CHECK_THROWS_AS(tube_loss(bad, 1, gt), std::invalid_argument);
  CHECK_THROWS_AS(tube_loss(perfect, 5, gt), std::invalid_argument);
}

TEST_CASE("tube loss is nonnegative and zero only in the exact cases") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const int C = 1 + static_cast<int>(rng() % 3);
    const int T = 1 + static_cast<int>(rng() % 4);
    const int c = static_cast<int>(rng() % (C + 1));
    std::vector<Offsets> gt(T);
    for (auto& o : gt) o = {uniform(rng, -1, 1), uniform(rng, -1, 1),
                            uniform(rng, -1, 1), uniform(rng, -1, 1)};
    TubePrediction p;
    p.class_probs.assign(C + 1, 0.0);
    double rest = 1.0;
    for (int k = 0; k < C; ++k) {
      p.class_probs[k] = rest * uniform(rng, 0.0, 1.0);
      rest -= p.class_probs[k];
    }
    p.class_probs[C] = rest;
    p.per_frame_offsets.assign(T, std::vector<Offsets>(C));
    for (auto& row : p.per_frame_offsets) {
      for (auto& o : row) o = {uniform(rng, -2, 2), uniform(rng, -2, 2),
                               uniform(rng, -2, 2), uniform(rng, -2, 2)};
    }
    const double loss = tube_loss(p, c, gt);
    CHECK(loss >= 0.0);
    if (loss == 0.0) {
      CHECK(p.class_probs[c] == 1.0);
      if (c > 0) {
        for (int t = 0; t < T; ++t) CHECK(p.per_frame_offsets[t][c - 1] == gt[t]);
      }
    }
  }
}

TEST_CASE("analytic offset gradient matches central differences") {
  std::mt19937_64 rng(4242);
  const double step = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    const int C = 1 + static_cast<int>(rng() % 3);
    const int T = 1 + static_cast<int>(rng() % 4);
    const int c = 1 + static_cast<int>(rng() % C);
    std::vector<Offsets> gt(T);
    for (auto& o : gt) o = {uniform(rng, -1, 1), uniform(rng, -1, 1),
                            uniform(rng, -1, 1), uniform(rng, -1, 1)};
    TubePrediction p = perfect_prediction(C, c, gt);
    p.class_probs.assign(C + 1, 1.0 / (C + 1));
    for (auto& row : p.per_frame_offsets) {
      for (auto& o : row) o = {uniform(rng, -2, 2), uniform(rng, -2, 2),
                               uniform(rng, -2, 2), uniform(rng, -2, 2)};
    }

    const auto grad = tube_loss_offset_grad(p, c, gt);
    for (int t = 0; t < T; ++t) {
      for (int coord = 0; coord < 4; ++coord) {
        auto nudge = [&](double delta) {
          TubePrediction q = p;
          Offsets& o = q.per_frame_offsets[t][c - 1];
          double* field = coord == 0 ? &o.dx : coord == 1 ? &o.dy
                                   : coord == 2 ? &o.dw : &o.dh;
          *field += delta;
          return tube_loss(q, c, gt);
        };
        const double fd = (nudge(step) - nudge(-step)) / (2.0 * step);
        const double an = coord == 0 ? grad[t].dx : coord == 1 ? grad[t].dy
                                     : coord == 2 ? grad[t].dw : grad[t].dh;
        CHECK(std::abs(fd - an) <= 1e-4 * std::max(1.0, std::abs(an)));
      }
    }
    // Background: gradient vanishes.
    const auto zero = tube_loss_offset_grad(p, 0, gt);
    for (const auto& o : zero) CHECK(o == Offsets{});
  }
}

TEST_CASE("label assignment") {
  const Box a{50, 50, 20, 20};
  const Box far{300, 300, 20, 20};
  std::vector<GroundTruthTube> gts;
  gts.push_back({3, {a, a, a, a, a}});

  Tube tube;
  tube.boxes = {a, a, a, a, a};
  tube.proposal_ids = {0, 0, 0, 0, 0};
  tube.objectness = {1, 1, 1, 1, 1};

  // Identical: mean IoU 1.
  auto assign = assign_label(tube, gts);
  CHECK(assign.label == 3);
  REQUIRE(assign.gt_index.has_value());
  CHECK(*assign.gt_index == 0);

  // Disjoint: background.
  Tube nowhere = tube;
  nowhere.boxes = {far, far, far, far, far};
  assign = assign_label(nowhere, gts);
  CHECK(assign.label == 0);
  CHECK(!assign.gt_index.has_value());

  // Mean IoU [1,1,0,0,0] = 0.4 < 0.5: background.
  Tube partial = tube;
  partial.boxes = {a, a, far, far, far};
  assign = assign_label(partial, gts);
  CHECK(assign.label == 0);

  // Mean IoU = 0.6 >= 0.5: positive.
  Tube three = tube;
  three.boxes = {a, a, a, far, far};
  CHECK(assign_label(three, gts).label == 3);

  // Tie between two identical ground truths: lower index wins.
  gts.push_back({5, {a, a, a, a, a}});
  assign = assign_label(tube, gts);
  CHECK(assign.label == 3);
  CHECK(*assign.gt_index == 0);

  CHECK(assign_label(tube, {}).label == 0);
}
