#include "tubelink/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace tubelink {

namespace {

// Shared ranking + greedy matching + all-points AP. `overlap(d, g)` must
// return the IoU-like score between detection index d and truth index g,
// or a negative value when the keys differ.
template <typename OverlapFn>
double ap_core(std::size_t num_dets, std::size_t num_gts,
               const std::vector<std::size_t>& order, OverlapFn overlap,
               double sigma) {
  if (num_gts == 0) {
    throw std::invalid_argument("average_precision: no ground truth for class");
  }
  std::vector<char> gt_matched(num_gts, 0);
  std::vector<char> is_tp(num_dets, 0);
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const std::size_t d = order[rank];
    double best = -1.0;
    std::size_t best_g = num_gts;
    for (std::size_t g = 0; g < num_gts; ++g) {
      if (gt_matched[g]) continue;
      const double ov = overlap(d, g);
      if (ov > best) {
        best = ov;
        best_g = g;
      }
    }
    if (best_g < num_gts && best > sigma) {
      gt_matched[best_g] = 1;
      is_tp[rank] = 1;
    }
  }

  // Precision envelope, accumulated backwards; each true positive
  // contributes env / P to the area.
  double env = 0.0;
  double sum = 0.0;
  std::size_t tp_total = 0;
  for (std::size_t rank = 0; rank < num_dets; ++rank) tp_total += is_tp[rank];
  std::size_t tp_seen = tp_total;
  std::size_t fp_seen = num_dets - tp_total;
  for (std::size_t rank = num_dets; rank-- > 0;) {
    const double prec =
        static_cast<double>(tp_seen) / static_cast<double>(tp_seen + fp_seen);
    env = std::max(env, prec);
    if (is_tp[rank]) sum += env;
    if (is_tp[rank]) {
      --tp_seen;
    } else {
      --fp_seen;
    }
  }
  return sum / static_cast<double>(num_gts);
}

template <typename Det>
std::vector<std::size_t> rank_detections(std::span<const Det> dets) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (dets[i].confidence != dets[j].confidence) {
      return dets[i].confidence > dets[j].confidence;
    }
    if (dets[i].key != dets[j].key) return dets[i].key < dets[j].key;
    return i < j;
  });
  return order;
}

template <typename Det, typename Gt, typename IouFn>
double ap_generic(std::span<const Det> dets, std::span<const Gt> gts,
                  double sigma, IouFn iou_fn) {
  const auto order = rank_detections(dets);
  return ap_core(
      dets.size(), gts.size(), order,
      [&](std::size_t d, std::size_t g) {
        if (dets[d].key != gts[g].key) return -1.0;
        return iou_fn(dets[d], gts[g]);
      },
      sigma);
}

template <typename Det, typename Gt, typename ApFn>
MapResult map_over_classes(std::span<const Det> dets, std::span<const Gt> gts,
                           ApFn ap_fn) {
  std::set<int> classes;
  for (const auto& g : gts) classes.insert(g.label);
  if (classes.empty()) {
    throw std::invalid_argument("mAP: no ground truth at all");
  }
  MapResult out;
  double sum = 0.0;
  for (int c : classes) {
    std::vector<Det> cd;
    std::vector<Gt> cg;
    for (const auto& d : dets) {
      if (d.label == c) cd.push_back(d);
    }
    for (const auto& g : gts) {
      if (g.label == c) cg.push_back(g);
    }
    const double ap = ap_fn(std::span<const Det>(cd), std::span<const Gt>(cg));
    out.per_class[c] = ap;
    sum += ap;
  }
  out.mean = sum / static_cast<double>(classes.size());
  return out;
}

}  // namespace

double average_precision(std::span<const FrameDetection> dets,
                         std::span<const FrameGroundTruth> gts, double sigma) {
  return ap_generic(dets, gts, sigma,
                    [](const FrameDetection& d, const FrameGroundTruth& g) {
                      return iou(d.box, g.box);
                    });
}

double average_precision_tubes(std::span<const TubeDetection> dets,
                               std::span<const TubeGroundTruth> gts,
                               double sigma) {
  return ap_generic(dets, gts, sigma,
                    [](const TubeDetection& d, const TubeGroundTruth& g) {
                      return mean_iou(d.boxes, g.boxes);
                    });
}

MapResult frame_map(std::span<const FrameDetection> dets,
                    std::span<const FrameGroundTruth> gts, double sigma) {
  return map_over_classes(dets, gts,
                          [&](std::span<const FrameDetection> cd,
                              std::span<const FrameGroundTruth> cg) {
                            return average_precision(cd, cg, sigma);
                          });
}

MapResult video_map(std::span<const TubeDetection> dets,
                    std::span<const TubeGroundTruth> gts, double sigma) {
  return map_over_classes(dets, gts,
                          [&](std::span<const TubeDetection> cd,
                              std::span<const TubeGroundTruth> cg) {
                            return average_precision_tubes(cd, cg, sigma);
                          });
}

double coselection_rate(const CoselectionInput& in) {
  if (in.n < 1) throw std::invalid_argument("coselection_rate: n must be >= 1");
  if (static_cast<int>(in.set_a.size()) < in.n) {
    throw std::invalid_argument("coselection_rate: set_a has fewer than n tubes");
  }
  if (!(in.theta >= 0.0 && in.theta <= 1.0)) {
    throw std::invalid_argument("coselection_rate: theta must be in [0, 1]");
  }

  std::vector<std::size_t> order(in.set_a.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return in.set_a[i].score > in.set_a[j].score;
  });

  int tp = 0;
  for (int r = 0; r < in.n; ++r) {
    const Tube& a = in.set_a[order[r]];
    for (const Tube& b : in.set_b) {
      const double ov = mean_iou(a.boxes, b.boxes);
      // theta = 1.0 keeps its row meaningful: only an exact overlap counts.
      if (ov > in.theta || (in.theta == 1.0 && ov == 1.0)) {
        ++tp;
        break;
      }
    }
  }
  return static_cast<double>(tp) / static_cast<double>(in.n);
}

}  // namespace tubelink
