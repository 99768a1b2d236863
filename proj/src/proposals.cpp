#include "tubelink/proposals.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace tubelink {

namespace {

// Uniform double in [lo, hi) from the raw engine stream. Fixed mapping so
// the draw sequence is pinned down by the engine alone.
double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + u * (hi - lo);
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// Reflect x into [lo, hi].
double reflect(double x, double lo, double hi) {
  if (lo >= hi) return lo;
  while (x < lo || x > hi) {
    if (x < lo) x = 2.0 * lo - x;
    if (x > hi) x = 2.0 * hi - x;
  }
  return x;
}

void validate(const SyntheticScenario& s) {
  if (s.actors < 0 || s.proposals_per_actor < 0 || s.background_count < 0) {
    throw std::invalid_argument("scenario: counts must be >= 0");
  }
  if (s.num_frames < 1) throw std::invalid_argument("scenario: T must be >= 1");
  if (s.num_classes < 1) throw std::invalid_argument("scenario: num_classes must be >= 1");
  if (s.jitter < 0.0 || s.motion_step < 0.0) {
    throw std::invalid_argument("scenario: jitter/motion_step must be >= 0");
  }
  if (s.frame_width <= 0.0 || s.frame_height <= 0.0) {
    throw std::invalid_argument("scenario: frame size must be positive");
  }
  if (s.actors > 0 &&
      (s.actor_width > s.frame_width || s.actor_height > s.frame_height ||
       s.actor_width <= 0.0 || s.actor_height <= 0.0)) {
    throw std::invalid_argument("scenario: frame too small to contain actor boxes");
  }
  if (s.background_size_min <= 0.0 || s.background_size_max < s.background_size_min) {
    throw std::invalid_argument("scenario: bad background size range");
  }
}

}  // namespace

GeneratedVideo generate(const SyntheticScenario& s) {
  validate(s);
  std::mt19937_64 rng(s.seed);

  GeneratedVideo out;
  out.proposals.video_id = "synthetic-" + std::to_string(s.seed);
  out.proposals.frames.resize(s.num_frames);

  // Actor trajectories first, then per-frame proposals, so the draw order
  // is independent of proposal counts.
  const double cx_lo = 0.5 * s.actor_width;
  const double cx_hi = s.frame_width - 0.5 * s.actor_width;
  const double cy_lo = 0.5 * s.actor_height;
  const double cy_hi = s.frame_height - 0.5 * s.actor_height;

  for (int a = 0; a < s.actors; ++a) {
    GroundTruthTube tube;
    tube.label = 1 + a % s.num_classes;
    double cx = uniform(rng, cx_lo, cx_hi);
    double cy = uniform(rng, cy_lo, cy_hi);
    tube.boxes.push_back(Box{cx, cy, s.actor_width, s.actor_height});
    for (int t = 1; t < s.num_frames; ++t) {
      cx = reflect(cx + uniform(rng, -s.motion_step, s.motion_step), cx_lo, cx_hi);
      cy = reflect(cy + uniform(rng, -s.motion_step, s.motion_step), cy_lo, cy_hi);
      tube.boxes.push_back(Box{cx, cy, s.actor_width, s.actor_height});
    }
    out.ground_truth.push_back(std::move(tube));
  }

  for (int t = 0; t < s.num_frames; ++t) {
    auto& frame = out.proposals.frames[t];
    int next_id = 0;
    for (int a = 0; a < s.actors; ++a) {
      const Box& truth = out.ground_truth[a].boxes[t];
      for (int p = 0; p < s.proposals_per_actor; ++p) {
        RegionProposal rp;
        rp.frame = t;
        rp.id = next_id++;
        rp.box.cx = truth.cx + uniform(rng, -s.jitter, s.jitter);
        rp.box.cy = truth.cy + uniform(rng, -s.jitter, s.jitter);
        rp.box.w = std::max(1.0, truth.w + uniform(rng, -s.jitter, s.jitter));
        rp.box.h = std::max(1.0, truth.h + uniform(rng, -s.jitter, s.jitter));
        rp.objectness = clamp01(s.objectness_signal + uniform(rng, -0.05, 0.05));
        frame.push_back(rp);
      }
    }
    for (int b = 0; b < s.background_count; ++b) {
      RegionProposal rp;
      rp.frame = t;
      rp.id = next_id++;
      rp.box.w = uniform(rng, s.background_size_min, s.background_size_max);
      rp.box.h = uniform(rng, s.background_size_min, s.background_size_max);
      rp.box.cx = uniform(rng, 0.0, s.frame_width);
      rp.box.cy = uniform(rng, 0.0, s.frame_height);
      rp.objectness = clamp01(s.objectness_noise + uniform(rng, -0.05, 0.05));
      frame.push_back(rp);
    }
  }

  return out;
}

}  // namespace tubelink
