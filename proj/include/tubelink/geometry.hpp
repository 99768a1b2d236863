#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tubelink {

/// Axis-aligned box, center-encoded: (cx, cy, w, h) in pixels.
/// The center form is canonical throughout the library; the corner form
/// (x1, y1, x2, y2) only appears at conversion/serialization boundaries.
struct Box {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  double x1() const { return cx - 0.5 * w; }
  double y1() const { return cy - 0.5 * h; }
  double x2() const { return cx + 0.5 * w; }
  double y2() const { return cy + 0.5 * h; }
  double area() const { return w * h; }

  static Box from_corners(double x1, double y1, double x2, double y2);

  /// Finite coordinates and strictly positive extent.
  bool valid() const;

  bool operator==(const Box&) const = default;
};

/// Intersection over union in [0, 1]. Touching edges (zero intersection
/// area) count as disjoint. Throws std::invalid_argument on invalid boxes.
double iou(const Box& a, const Box& b);

/// Mean per-frame IoU of two equal-length box sequences (the overlap used
/// for whole tubes). Throws std::invalid_argument on length mismatch.
double mean_iou(std::span<const Box> a, std::span<const Box> b);

/// Greedy non-maximum suppression. Boxes are visited in descending-score
/// order (ties: lower original index first); a box is suppressed iff its
/// IoU with an already-kept box exceeds `threshold`. Returns kept indices
/// in visit order.
std::vector<std::size_t> nms(std::span<const Box> boxes,
                             std::span<const double> scores,
                             double threshold);

}  // namespace tubelink
