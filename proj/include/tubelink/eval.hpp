#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "tubelink/geometry.hpp"
#include "tubelink/linker.hpp"

namespace tubelink {

/// A scored per-frame detection. `key` identifies the frame it belongs to
/// (e.g. "video:t"); matching never crosses keys.
struct FrameDetection {
  std::string key;
  int label = 1;
  double confidence = 0.0;
  Box box;
};

struct FrameGroundTruth {
  std::string key;
  int label = 1;
  Box box;
};

/// A scored whole-tube detection; `key` identifies the video.
struct TubeDetection {
  std::string key;
  int label = 1;
  double confidence = 0.0;
  std::vector<Box> boxes;
};

struct TubeGroundTruth {
  std::string key;
  int label = 1;
  std::vector<Box> boxes;
};

/// Average precision for a single class of box detections. Detections are
/// ranked by descending confidence (ties by key, then input index) and
/// greedily matched one-to-one to same-key ground truths at IoU > sigma
/// (highest IoU first, ties by lower ground-truth index). AP is the
/// all-points area under the precision envelope. Labels on the inputs are
/// ignored here. Throws std::invalid_argument when there is no ground
/// truth (AP is undefined then).
double average_precision(std::span<const FrameDetection> dets,
                         std::span<const FrameGroundTruth> gts, double sigma);

/// Same ranking/matching/AP, with the overlap between two tubes defined
/// as the mean per-frame box IoU over their common full span.
double average_precision_tubes(std::span<const TubeDetection> dets,
                               std::span<const TubeGroundTruth> gts,
                               double sigma);

struct MapResult {
  double mean = 0.0;
  std::map<int, double> per_class;
};

/// Mean of per-class AP over the classes that have at least one ground
/// truth; classes without ground truth are excluded from the mean.
MapResult frame_map(std::span<const FrameDetection> dets,
                    std::span<const FrameGroundTruth> gts, double sigma = 0.5);

MapResult video_map(std::span<const TubeDetection> dets,
                    std::span<const TubeGroundTruth> gts, double sigma = 0.2);

/// Inputs for the pruning-agreement rate between two tube sets from the
/// same video: `set_a` from the pruned search, `set_b` from the
/// unpruned one.
struct CoselectionInput {
  std::vector<Tube> set_a;
  std::vector<Tube> set_b;
  double theta = 0.7;
  int n = 50;
};

/// Fraction of the top-n tubes of set_a (by score) whose mean per-frame
/// IoU with some tube of set_b exceeds theta (strict; theta = 1.0 demands
/// an exact IoU of 1). Throws std::invalid_argument when set_a has fewer
/// than n tubes. Dataset-level rates are the arithmetic mean of per-video
/// rates.
double coselection_rate(const CoselectionInput& in);

}  // namespace tubelink
