#pragma once

// Plain quadratic average-precision reference, written independently of
// the library implementation: explicit rank list, explicit one-to-one
// matching, and an O(n^2) precision-envelope scan.

#include <algorithm>
#include <set>
#include <vector>

#include "tubelink/eval.hpp"
#include "tubelink/geometry.hpp"

namespace testutil {

template <typename Det, typename Gt, typename IouFn>
double ap_reference(const std::vector<Det>& dets, const std::vector<Gt>& gts,
                    double sigma, IouFn overlap) {
  std::vector<std::size_t> order(dets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (dets[i].confidence != dets[j].confidence) {
      return dets[i].confidence > dets[j].confidence;
    }
    if (dets[i].key != dets[j].key) return dets[i].key < dets[j].key;
    return i < j;
  });

  std::vector<bool> taken(gts.size(), false);
  std::vector<int> tp;
  for (std::size_t d : order) {
    double best = -1.0;
    std::size_t best_g = gts.size();
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g] || gts[g].key != dets[d].key) continue;
      const double ov = overlap(dets[d], gts[g]);
      if (ov > best) {
        best = ov;
        best_g = g;
      }
    }
    if (best_g != gts.size() && best > sigma) {
      taken[best_g] = true;
      tp.push_back(1);
    } else {
      tp.push_back(0);
    }
  }

  double ap = 0.0;
  int cum = 0;
  for (std::size_t k = 0; k < tp.size(); ++k) {
    cum += tp[k];
    if (!tp[k]) continue;
    // Best precision achievable at or after this rank.
    double env = 0.0;
    int c2 = 0;
    for (std::size_t j = 0; j < tp.size(); ++j) {
      c2 += tp[j];
      if (j >= k) env = std::max(env, static_cast<double>(c2) / static_cast<double>(j + 1));
    }
    ap += env / static_cast<double>(gts.size());
  }
  return ap;
}

inline double ap_reference_boxes(const std::vector<tubelink::FrameDetection>& dets,
                                 const std::vector<tubelink::FrameGroundTruth>& gts,
                                 double sigma) {
  return ap_reference(dets, gts, sigma,
                      [](const tubelink::FrameDetection& d,
                         const tubelink::FrameGroundTruth& g) {
                        return tubelink::iou(d.box, g.box);
                      });
}

inline double ap_reference_tubes(const std::vector<tubelink::TubeDetection>& dets,
                                 const std::vector<tubelink::TubeGroundTruth>& gts,
                                 double sigma) {
  return ap_reference(dets, gts, sigma,
                      [](const tubelink::TubeDetection& d,
                         const tubelink::TubeGroundTruth& g) {
                        return tubelink::mean_iou(d.boxes, g.boxes);
                      });
}

inline double ap_reference_mean_tubes(const std::vector<tubelink::TubeDetection>& dets,
                                      const std::vector<tubelink::TubeGroundTruth>& gts,
                                      double sigma) {
  std::set<int> classes;
  for (const auto& g : gts) classes.insert(g.label);
  double sum = 0.0;
  for (int c : classes) {
    std::vector<tubelink::TubeDetection> cd;
    std::vector<tubelink::TubeGroundTruth> cg;
    for (const auto& d : dets) {
      if (d.label == c) cd.push_back(d);
    }
    for (const auto& g : gts) {
      if (g.label == c) cg.push_back(g);
    }
    sum += ap_reference_tubes(cd, cg, sigma);
  }
  return sum / static_cast<double>(classes.size());
}

}  // namespace testutil
