#pragma once

// Seeded micro-instances for comparing the linkers against the
// exhaustive oracle. The quantized flavor snaps scores to an exact
// binary grid and duplicates boxes within frames, so score ties and
// IoU-1 links actually occur and the tie-break rules get exercised.

#include <random>
#include <string>

#include "tubelink/proposals.hpp"

namespace testutil {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (static_cast<double>(rng() >> 11) * 0x1.0p-53) * (hi - lo);
}

inline tubelink::VideoProposals random_instance(std::mt19937_64& rng, int num_frames,
                                                int n_lo, int n_hi, bool quantized) {
  tubelink::VideoProposals v;
  v.video_id = "instance";
  v.frames.resize(num_frames);
  for (int t = 0; t < num_frames; ++t) {
    const int n = n_lo + static_cast<int>(rng() % (n_hi - n_lo + 1));
    for (int i = 0; i < n; ++i) {
      tubelink::RegionProposal p;
      p.frame = t;
      p.id = i;
      if (quantized && i > 0 && rng() % 4 == 0) {
        p.box = v.frames[t][rng() % i].box;  // exact duplicate within frame
      } else {
        p.box.cx = uniform(rng, 10.0, 90.0);
        p.box.cy = uniform(rng, 10.0, 90.0);
        p.box.w = uniform(rng, 5.0, 40.0);
        p.box.h = uniform(rng, 5.0, 40.0);
        if (quantized) {
          p.box.cx = 5.0 * static_cast<int>(p.box.cx / 5.0);
          p.box.cy = 5.0 * static_cast<int>(p.box.cy / 5.0);
          p.box.w = 5.0 * (1 + static_cast<int>(p.box.w / 5.0));
          p.box.h = 5.0 * (1 + static_cast<int>(p.box.h / 5.0));
        }
      }
      p.objectness = quantized
                         ? static_cast<double>(rng() % 65) / 64.0
                         : uniform(rng, 0.0, 1.0);
      v.frames[t].push_back(p);
    }
  }
  return v;
}

}  // namespace testutil
