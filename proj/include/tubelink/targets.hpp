#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tubelink/geometry.hpp"
#include "tubelink/linker.hpp"
#include "tubelink/proposals.hpp"

namespace tubelink {

/// Dimensionless regression offsets between a box and its anchor.
struct Offsets {
  double dx = 0.0;
  double dy = 0.0;
  double dw = 0.0;
  double dh = 0.0;

  bool operator==(const Offsets&) const = default;
};

/// Offsets of `b` relative to the anchor box: dx = (cx - cx*) / cx*,
/// dy = (cy - cy*) / cy*, dw = ln(w / w*), dh = ln(h / h*).
///
/// Note the center deltas are normalized by the anchor *coordinates*, not
/// its extent, so they depend on the coordinate origin; anchors with a
/// near-zero center coordinate are rejected (|cx*| or |cy*| < 1e-9).
Offsets encode(const Box& b, const Box& anchor);

/// Inverse of encode. Throws std::overflow_error when the decoded extent
/// is not finite.
Box decode(const Offsets& o, const Box& anchor);

/// 0.5 x^2 for |x| < 1, |x| - 0.5 otherwise. Continuous with continuous
/// first derivative at |x| = 1.
double smooth_l1(double x);

/// d smooth_l1 / dx.
double smooth_l1_grad(double x);

/// Per-tube network output: a probability simplex over C+1 classes
/// (index 0 = background) and one Offsets per frame per foreground class.
struct TubePrediction {
  std::vector<double> class_probs;                  // length C+1
  std::vector<std::vector<Offsets>> per_frame_offsets;  // T x C
};

/// Multi-task tube loss: -ln p_c plus, for foreground classes, the sum of
/// smooth-L1 distances between the predicted class-c offsets and the
/// targets over all frames and all four coordinates. Returns +inf when
/// p_c is zero.
double tube_loss(const TubePrediction& pred, int gt_class,
                 std::span<const Offsets> gt_offsets);

/// Gradient of tube_loss with respect to the predicted class-c offsets
/// (one entry per frame; all zero for background).
std::vector<Offsets> tube_loss_offset_grad(const TubePrediction& pred,
                                           int gt_class,
                                           std::span<const Offsets> gt_offsets);

struct LabelAssignment {
  int label = 0;  // 0 = background
  std::optional<std::size_t> gt_index;
};

/// Assigns a tube the class of the ground-truth tube with the highest
/// mean per-frame IoU when that mean is >= 0.5, else background. Ties go
/// to the lower ground-truth index.
LabelAssignment assign_label(const Tube& tube,
                             const std::vector<GroundTruthTube>& gts);

}  // namespace tubelink
