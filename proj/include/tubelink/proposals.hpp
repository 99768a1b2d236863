#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tubelink/geometry.hpp"

namespace tubelink {

/// One candidate actor box on one frame, with its objectness score.
struct RegionProposal {
  Box box;
  double objectness = 0.0;  // in [0, 1]
  int frame = 0;
  int id = 0;  // unique within its frame
};

/// Per-frame proposal lists for one clip of T consecutive frames
/// (frame indices 0..T-1, contiguous).
struct VideoProposals {
  std::string video_id;
  std::vector<std::vector<RegionProposal>> frames;

  int num_frames() const { return static_cast<int>(frames.size()); }
};

/// An annotated actor track: one box per frame, class label in 1..C
/// (0 is reserved for background).
struct GroundTruthTube {
  int label = 1;
  std::vector<Box> boxes;
};

/// Parameters for the seeded proposal generator. Actors follow a random
/// walk that reflects at the frame boundary; every frame carries a few
/// jittered proposals per actor plus uniform background clutter.
///
/// The random source is std::mt19937_64 seeded with `seed`; uniform reals
/// are derived as lo + ((x >> 11) * 2^-53) * (hi - lo) from successive
/// engine outputs, so the stream is reproducible for a given seed and can
/// be re-derived from these rules.
struct SyntheticScenario {
  int actors = 1;
  int proposals_per_actor = 5;
  double motion_step = 4.0;   // max per-axis displacement per frame, px
  double jitter = 2.0;        // max perturbation of proposal center/size, px
  int background_count = 20;  // clutter proposals per frame
  double objectness_signal = 0.85;  // mean score near actors
  double objectness_noise = 0.35;   // mean score for background
  std::uint64_t seed = 1;
  double frame_width = 640.0;
  double frame_height = 480.0;
  int num_frames = 5;  // T
  int num_classes = 1;
  double actor_width = 80.0;
  double actor_height = 120.0;
  double background_size_min = 24.0;
  double background_size_max = 96.0;
};

struct GeneratedVideo {
  VideoProposals proposals;
  std::vector<GroundTruthTube> ground_truth;  // one tube per actor
};

/// Deterministic per seed: the same scenario always produces the same
/// output, byte for byte once serialized. Throws std::invalid_argument
/// when the scenario is inconsistent (e.g. frame smaller than the actor
/// box).
GeneratedVideo generate(const SyntheticScenario& s);

}  // namespace tubelink
