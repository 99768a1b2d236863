#include "tubelink/targets.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tubelink {

namespace {

void check_shapes(const TubePrediction& pred, int gt_class,
                  std::span<const Offsets> gt_offsets) {
  if (pred.class_probs.size() < 2) {
    throw std::invalid_argument("tube_loss: need background plus at least one class");
  }
  const int num_classes = static_cast<int>(pred.class_probs.size()) - 1;
  if (gt_class < 0 || gt_class > num_classes) {
    throw std::invalid_argument("tube_loss: gt_class out of range");
  }
  double sum = 0.0;
  for (double p : pred.class_probs) {
    if (!(p >= 0.0)) throw std::invalid_argument("tube_loss: negative class probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("tube_loss: class probabilities must sum to 1");
  }
  if (pred.per_frame_offsets.size() != gt_offsets.size()) {
    throw std::invalid_argument("tube_loss: offset frame count mismatch");
  }
  for (const auto& row : pred.per_frame_offsets) {
    if (static_cast<int>(row.size()) != num_classes) {
      throw std::invalid_argument("tube_loss: per-frame offsets must cover every class");
    }
  }
}

}  // namespace

Offsets encode(const Box& b, const Box& anchor) {
  if (!b.valid() || !anchor.valid()) {
    throw std::invalid_argument("encode: boxes must be valid");
  }
  if (std::abs(anchor.cx) < 1e-9 || std::abs(anchor.cy) < 1e-9) {
    throw std::invalid_argument("encode: degenerate anchor (center coordinate ~0)");
  }
  Offsets o;
  o.dx = (b.cx - anchor.cx) / anchor.cx;
  o.dy = (b.cy - anchor.cy) / anchor.cy;
  o.dw = std::log(b.w / anchor.w);
  o.dh = std::log(b.h / anchor.h);
  return o;
}

Box decode(const Offsets& o, const Box& anchor) {
  if (!anchor.valid()) throw std::invalid_argument("decode: invalid anchor");
  Box b;
  b.cx = anchor.cx * (1.0 + o.dx);
  b.cy = anchor.cy * (1.0 + o.dy);
  b.w = anchor.w * std::exp(o.dw);
  b.h = anchor.h * std::exp(o.dh);
  if (!std::isfinite(b.w) || !std::isfinite(b.h) || !std::isfinite(b.cx) ||
      !std::isfinite(b.cy)) {
    throw std::overflow_error("decode: non-finite box");
  }
  return b;
}

double smooth_l1(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("smooth_l1: non-finite input");
  const double ax = std::abs(x);
  return ax < 1.0 ? 0.5 * x * x : ax - 0.5;
}

double smooth_l1_grad(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("smooth_l1_grad: non-finite input");
  if (x >= 1.0) return 1.0;
  if (x <= -1.0) return -1.0;
  return x;
}

double tube_loss(const TubePrediction& pred, int gt_class,
                 std::span<const Offsets> gt_offsets) {
  check_shapes(pred, gt_class, gt_offsets);
  const double p = pred.class_probs[gt_class];
  double loss = (p == 0.0) ? std::numeric_limits<double>::infinity() : -std::log(p);
  if (gt_class > 0) {
    const int c = gt_class - 1;
    for (std::size_t t = 0; t < gt_offsets.size(); ++t) {
      const Offsets& d = pred.per_frame_offsets[t][c];
      const Offsets& g = gt_offsets[t];
      loss += smooth_l1(d.dx - g.dx) + smooth_l1(d.dy - g.dy) +
              smooth_l1(d.dw - g.dw) + smooth_l1(d.dh - g.dh);
    }
  }
  return loss;
}

std::vector<Offsets> tube_loss_offset_grad(const TubePrediction& pred,
                                           int gt_class,
                                           std::span<const Offsets> gt_offsets) {
  check_shapes(pred, gt_class, gt_offsets);
  std::vector<Offsets> grad(gt_offsets.size());
  if (gt_class == 0) return grad;
  const int c = gt_class - 1;
  for (std::size_t t = 0; t < gt_offsets.size(); ++t) {
    const Offsets& d = pred.per_frame_offsets[t][c];
    const Offsets& g = gt_offsets[t];
    grad[t].dx = smooth_l1_grad(d.dx - g.dx);
    grad[t].dy = smooth_l1_grad(d.dy - g.dy);
    grad[t].dw = smooth_l1_grad(d.dw - g.dw);
    grad[t].dh = smooth_l1_grad(d.dh - g.dh);
  }
  return grad;
}

LabelAssignment assign_label(const Tube& tube,
                             const std::vector<GroundTruthTube>& gts) {
  LabelAssignment out;
  double best = -1.0;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (gts[g].boxes.size() != tube.boxes.size()) {
      throw std::invalid_argument("assign_label: ground truth spans a different T");
    }
    const double m = mean_iou(tube.boxes, gts[g].boxes);
    if (m > best) {
      best = m;
      out.gt_index = g;
    }
  }
  if (best >= 0.5 && out.gt_index) {
    out.label = gts[*out.gt_index].label;
  } else {
    out.label = 0;
    out.gt_index.reset();
  }
  return out;
}

}  // namespace tubelink
