#include "tubelink/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tubelink {

Box Box::from_corners(double x1, double y1, double x2, double y2) {
  return Box{0.5 * (x1 + x2), 0.5 * (y1 + y2), x2 - x1, y2 - y1};
}

bool Box::valid() const {
  return std::isfinite(cx) && std::isfinite(cy) && std::isfinite(w) &&
         std::isfinite(h) && w > 0.0 && h > 0.0;
}

double iou(const Box& a, const Box& b) {
  if (!a.valid() || !b.valid()) {
    throw std::invalid_argument("iou: box must have finite, positive extent");
  }
  const double ax1 = a.x1(), ay1 = a.y1(), ax2 = a.x2(), ay2 = a.y2();
  const double bx1 = b.x1(), by1 = b.y1(), bx2 = b.x2(), by2 = b.y2();
  const double iw = std::min(ax2, bx2) - std::max(ax1, bx1);
  if (iw <= 0.0) return 0.0;
  const double ih = std::min(ay2, by2) - std::max(ay1, by1);
  if (ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  // Areas from the same corner values as the intersection, so identical
  // boxes come out at exactly 1.
  const double area_a = (ax2 - ax1) * (ay2 - ay1);
  const double area_b = (bx2 - bx1) * (by2 - by1);
  return inter / (area_a + area_b - inter);
}

double mean_iou(std::span<const Box> a, std::span<const Box> b) {
  if (a.size() != b.size() || a.empty()) {
    throw std::invalid_argument("mean_iou: sequences must have equal, nonzero length");
  }
  double sum = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) sum += iou(a[t], b[t]);
  return sum / static_cast<double>(a.size());
}

std::vector<std::size_t> nms(std::span<const Box> boxes,
                             std::span<const double> scores,
                             double threshold) {
  if (boxes.size() != scores.size()) {
    throw std::invalid_argument("nms: boxes/scores size mismatch");
  }
  for (double s : scores) {
    if (!std::isfinite(s)) throw std::invalid_argument("nms: non-finite score");
  }

  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (scores[i] != scores[j]) return scores[i] > scores[j];
    return i < j;
  });

  std::vector<std::size_t> kept;
  for (std::size_t idx : order) {
    bool suppressed = false;
    for (std::size_t k : kept) {
      if (iou(boxes[idx], boxes[k]) > threshold) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(idx);
  }
  return kept;
}

}  // namespace tubelink
