#include "tubelink/linker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tubelink/error.hpp"

namespace tubelink {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Per-frame proposals in structure-of-arrays form, sorted by id so that
// ascending index order is ascending id order (the tie-break order).
struct FrameSoA {
  std::vector<int> ids;
  std::vector<Box> boxes;
  std::vector<double> x1, y1, x2, y2, area, score;
  std::vector<char> alive;
  int live = 0;

  int size() const { return static_cast<int>(ids.size()); }
};

// Uniform grid over one frame's box centers, used to enumerate overlap
// candidates without scanning the whole frame.
struct Grid {
  double cell_w = 1.0, cell_h = 1.0;
  double min_cx = 0.0, min_cy = 0.0;
  double max_w = 0.0, max_h = 0.0;
  int ncx = 1, ncy = 1;
  std::vector<std::vector<int>> cells;
};

struct Workspace {
  std::vector<FrameSoA> frames;
  // succ[t][i]: indices into frames[t+1] with iou > tau, ascending.
  // Filled on demand (succ_ready) from the next frame's grid; the full DP
  // prebuilds everything, the beam only touches what it visits. Lists
  // cover the original proposal set; dead entries are skipped at walk
  // time.
  std::vector<std::vector<std::vector<int>>> succ;
  std::vector<std::vector<char>> succ_ready;
  std::vector<Grid> grids;  // grids[t] indexes frame t+1
  double tau = 0.0;
};

double pair_iou(const FrameSoA& fa, int i, const FrameSoA& fb, int j) {
  const double iw = std::min(fa.x2[i], fb.x2[j]) - std::max(fa.x1[i], fb.x1[j]);
  if (iw <= 0.0) return 0.0;
  const double ih = std::min(fa.y2[i], fb.y2[j]) - std::max(fa.y1[i], fb.y1[j]);
  if (ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (fa.area[i] + fb.area[j] - inter);
}

void validate_config(const LinkerConfig& cfg) {
  if (!(cfg.tau >= 0.0 && cfg.tau <= 1.0)) {
    throw std::invalid_argument("linker: tau must be in [0, 1]");
  }
  if (cfg.k < 1) throw std::invalid_argument("linker: k must be >= 1");
  if (cfg.m < 1) throw std::invalid_argument("linker: m must be >= 1");
}

Workspace make_workspace(const VideoProposals& v, double tau) {
  if (v.frames.empty()) {
    throw DataError("video '" + v.video_id + "' has no frames");
  }
  Workspace ws;
  ws.tau = tau;
  ws.frames.resize(v.frames.size());
  for (int t = 0; t < static_cast<int>(v.frames.size()); ++t) {
    const auto& src = v.frames[t];
    std::vector<int> order(src.size());
    for (std::size_t i = 0; i < src.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return src[a].id < src[b].id; });

    FrameSoA& f = ws.frames[t];
    f.ids.reserve(src.size());
    for (int oi : order) {
      const RegionProposal& rp = src[oi];
      if (!f.ids.empty() && f.ids.back() == rp.id) {
        throw DataError("duplicate proposal id " + std::to_string(rp.id) +
                        " in frame " + std::to_string(t));
      }
      if (rp.frame != t) {
        throw DataError("proposal " + std::to_string(rp.id) + " in frame " +
                        std::to_string(t) + " carries frame index " +
                        std::to_string(rp.frame));
      }
      if (!rp.box.valid()) {
        throw DataError("invalid box for proposal " + std::to_string(rp.id) +
                        " in frame " + std::to_string(t));
      }
      if (!(rp.objectness >= 0.0 && rp.objectness <= 1.0)) {
        throw DataError("objectness out of [0,1] for proposal " +
                        std::to_string(rp.id) + " in frame " + std::to_string(t));
      }
      f.ids.push_back(rp.id);
      f.boxes.push_back(rp.box);
      f.x1.push_back(rp.box.x1());
      f.y1.push_back(rp.box.y1());
      f.x2.push_back(rp.box.x2());
      f.y2.push_back(rp.box.y2());
      // Corner-derived area keeps pair_iou bit-identical to iou().
      f.area.push_back((f.x2.back() - f.x1.back()) * (f.y2.back() - f.y1.back()));
      f.score.push_back(rp.objectness);
      f.alive.push_back(1);
    }
    f.live = f.size();
  }
  return ws;
}

void require_nonempty_frames(const Workspace& ws) {
  for (int t = 0; t < static_cast<int>(ws.frames.size()); ++t) {
    if (ws.frames[t].size() == 0) {
      throw DataError("frame " + std::to_string(t) + " has no proposals");
    }
  }
}

void prepare_adjacency(Workspace& ws) {
  const int T = static_cast<int>(ws.frames.size());
  ws.succ.assign(std::max(0, T - 1), {});
  ws.succ_ready.assign(std::max(0, T - 1), {});
  ws.grids.assign(std::max(0, T - 1), {});
  for (int t = 0; t + 1 < T; ++t) {
    const FrameSoA& b = ws.frames[t + 1];
    ws.succ[t].assign(ws.frames[t].size(), {});
    ws.succ_ready[t].assign(ws.frames[t].size(), 0);
    Grid& g = ws.grids[t];
    if (b.size() == 0) continue;

    double max_cx = b.boxes[0].cx, max_cy = b.boxes[0].cy;
    g.min_cx = b.boxes[0].cx;
    g.min_cy = b.boxes[0].cy;
    for (int j = 0; j < b.size(); ++j) {
      g.max_w = std::max(g.max_w, b.boxes[j].w);
      g.max_h = std::max(g.max_h, b.boxes[j].h);
      g.min_cx = std::min(g.min_cx, b.boxes[j].cx);
      g.min_cy = std::min(g.min_cy, b.boxes[j].cy);
      max_cx = std::max(max_cx, b.boxes[j].cx);
      max_cy = std::max(max_cy, b.boxes[j].cy);
    }
    g.cell_w = std::max(1e-9, g.max_w);
    g.cell_h = std::max(1e-9, g.max_h);
    g.ncx = static_cast<int>((max_cx - g.min_cx) / g.cell_w) + 1;
    g.ncy = static_cast<int>((max_cy - g.min_cy) / g.cell_h) + 1;
    g.cells.assign(static_cast<std::size_t>(g.ncx) * g.ncy, {});
    for (int j = 0; j < b.size(); ++j) {
      const int gx = std::clamp(
          static_cast<int>((b.boxes[j].cx - g.min_cx) / g.cell_w), 0, g.ncx - 1);
      const int gy = std::clamp(
          static_cast<int>((b.boxes[j].cy - g.min_cy) / g.cell_h), 0, g.ncy - 1);
      g.cells[static_cast<std::size_t>(gy) * g.ncx + gx].push_back(j);
    }
  }
}

// Legal successors of (t, i), ascending. Pure acceleration over a full
// scan: the result is exactly {j : iou(i, j) > tau}, independent of when
// it gets computed.
const std::vector<int>& get_succ(Workspace& ws, int t, int i) {
  if (ws.succ_ready[t][i]) return ws.succ[t][i];
  const FrameSoA& a = ws.frames[t];
  const FrameSoA& b = ws.frames[t + 1];
  const Grid& g = ws.grids[t];
  auto& out = ws.succ[t][i];
  if (b.size() > 0) {
    // Overlap requires center distance below half the summed extents, so
    // only cells within that reach can hold legal successors.
    const double rx = 0.5 * (a.boxes[i].w + g.max_w);
    const double ry = 0.5 * (a.boxes[i].h + g.max_h);
    auto cell_x = [&](double cx) {
      return std::clamp(static_cast<int>((cx - g.min_cx) / g.cell_w), 0, g.ncx - 1);
    };
    auto cell_y = [&](double cy) {
      return std::clamp(static_cast<int>((cy - g.min_cy) / g.cell_h), 0, g.ncy - 1);
    };
    const int x_lo = cell_x(a.boxes[i].cx - rx);
    const int x_hi = cell_x(a.boxes[i].cx + rx);
    const int y_lo = cell_y(a.boxes[i].cy - ry);
    const int y_hi = cell_y(a.boxes[i].cy + ry);
    for (int gy = y_lo; gy <= y_hi; ++gy) {
      for (int gx = x_lo; gx <= x_hi; ++gx) {
        for (int j : g.cells[static_cast<std::size_t>(gy) * g.ncx + gx]) {
          if (pair_iou(a, i, b, j) > ws.tau) out.push_back(j);
        }
      }
    }
    std::sort(out.begin(), out.end());
  }
  ws.succ_ready[t][i] = 1;
  return out;
}

void build_adjacency(Workspace& ws) {
  prepare_adjacency(ws);
  for (int t = 0; t + 1 < static_cast<int>(ws.frames.size()); ++t) {
    for (int i = 0; i < ws.frames[t].size(); ++i) get_succ(ws, t, i);
  }
}

// A path is a per-frame index sequence plus its cumulative objectness,
// accumulated front to back (first frame first). All linkers and the
// oracle sum in this order so scores compare bitwise.
struct RawPath {
  std::vector<int> idxs;
  double cum = 0.0;
};

// Index chain ending at (t, j), front first. Index order equals id order,
// so comparing chains compares id sequences.
void chain_of(const std::vector<std::vector<int>>& parent, int t, int j,
              std::vector<int>& out) {
  out.clear();
  int cur = j;
  for (int s = t; s >= 0; --s) {
    out.push_back(cur);
    if (s > 0) cur = parent[s][cur];
  }
  std::reverse(out.begin(), out.end());
}

// Forward Viterbi over legal links only. Each state keeps the best
// cumulative objectness and, on exact ties, the lexicographically
// smallest prefix; the final winner is therefore the smallest-id optimal
// tube.
std::optional<RawPath> run_ht(Workspace& ws) {
  const int T = static_cast<int>(ws.frames.size());
  std::vector<std::vector<double>> cum(T);
  std::vector<std::vector<int>> parent(T);
  for (int t = 0; t < T; ++t) {
    cum[t].assign(ws.frames[t].size(), kNegInf);
    parent[t].assign(ws.frames[t].size(), -1);
  }
  const FrameSoA& f0 = ws.frames[0];
  for (int i = 0; i < f0.size(); ++i) {
    if (f0.alive[i]) cum[0][i] = f0.score[i];
  }

  std::vector<int> ca, cb;
  for (int t = 0; t + 1 < T; ++t) {
    const FrameSoA& fa = ws.frames[t];
    const FrameSoA& fb = ws.frames[t + 1];
    auto& cn = cum[t + 1];
    auto& pn = parent[t + 1];
    // Phase 1: cn[j] holds the best predecessor value.
    for (int i = 0; i < fa.size(); ++i) {
      if (!fa.alive[i] || cum[t][i] == kNegInf) continue;
      const double c = cum[t][i];
      for (int j : get_succ(ws, t, i)) {
        if (!fb.alive[j]) continue;
        if (pn[j] < 0 || c > cn[j]) {
          cn[j] = c;
          pn[j] = i;
        } else if (c == cn[j]) {
          chain_of(parent, t, i, ca);
          chain_of(parent, t, pn[j], cb);
          if (ca < cb) pn[j] = i;
        }
      }
    }
    // Phase 2: add the frame's own objectness.
    for (int j = 0; j < fb.size(); ++j) {
      if (pn[j] >= 0) {
        cn[j] += fb.score[j];
      } else {
        cn[j] = kNegInf;
      }
    }
  }

  int best = -1;
  for (int j = 0; j < ws.frames[T - 1].size(); ++j) {
    if (!ws.frames[T - 1].alive[j] || cum[T - 1][j] == kNegInf) continue;
    if (best < 0 || cum[T - 1][j] > cum[T - 1][best]) {
      best = j;
    } else if (cum[T - 1][j] == cum[T - 1][best]) {
      chain_of(parent, T - 1, j, ca);
      chain_of(parent, T - 1, best, cb);
      if (ca < cb) best = j;
    }
  }
  if (best < 0) return std::nullopt;

  RawPath p;
  p.cum = cum[T - 1][best];
  chain_of(parent, T - 1, best, p.idxs);
  return p;
}

// Beam search: keep the k best partial tubes per frame, ranked by
// cumulative objectness with ties by proposal id. Predecessor and final
// ties fall back to the lexicographically smallest prefix, which makes a
// full-width beam reproduce run_ht exactly.
std::optional<RawPath> run_beam(Workspace& ws, int k) {
  struct Slot {
    double cum;
    int idx;
    int parent;  // slot index in the previous level
  };
  const int T = static_cast<int>(ws.frames.size());
  std::vector<std::vector<Slot>> levels(T);

  const FrameSoA& f0 = ws.frames[0];
  std::vector<int> first;
  for (int i = 0; i < f0.size(); ++i) {
    if (f0.alive[i]) first.push_back(i);
  }
  if (first.empty()) return std::nullopt;
  const auto first_rank = [&](int i, int j) {
    if (f0.score[i] != f0.score[j]) return f0.score[i] > f0.score[j];
    return i < j;
  };
  if (static_cast<int>(first.size()) > k) {
    std::partial_sort(first.begin(), first.begin() + k, first.end(), first_rank);
    first.resize(k);
  } else {
    std::sort(first.begin(), first.end(), first_rank);
  }
  for (int i : first) levels[0].push_back({f0.score[i], i, -1});

  auto slot_chain = [&](int t, int s, std::vector<int>& out) {
    out.clear();
    while (s >= 0) {
      out.push_back(levels[t][s].idx);
      s = levels[t][s].parent;
      --t;
    }
    std::reverse(out.begin(), out.end());
  };

  std::vector<double> bestval;
  std::vector<int> bestslot;
  std::vector<int> touched;
  std::vector<int> ca, cb;

  for (int t = 1; t < T; ++t) {
    const FrameSoA& fb = ws.frames[t];
    bestval.assign(fb.size(), 0.0);
    bestslot.assign(fb.size(), -1);
    touched.clear();

    const auto& prev = levels[t - 1];
    for (int s = 0; s < static_cast<int>(prev.size()); ++s) {
      const double c = prev[s].cum;
      for (int j : get_succ(ws, t - 1, prev[s].idx)) {
        if (!fb.alive[j]) continue;
        if (bestslot[j] < 0) {
          bestslot[j] = s;
          bestval[j] = c;
          touched.push_back(j);
        } else if (c > bestval[j]) {
          bestslot[j] = s;
          bestval[j] = c;
        } else if (c == bestval[j]) {
          slot_chain(t - 1, s, ca);
          slot_chain(t - 1, bestslot[j], cb);
          if (ca < cb) bestslot[j] = s;
        }
      }
    }
    if (touched.empty()) return std::nullopt;  // beam died

    auto& lvl = levels[t];
    lvl.clear();
    for (int j : touched) lvl.push_back({bestval[j] + fb.score[j], j, bestslot[j]});
    std::sort(lvl.begin(), lvl.end(), [](const Slot& a, const Slot& b) {
      if (a.cum != b.cum) return a.cum > b.cum;
      return a.idx < b.idx;
    });
    if (static_cast<int>(lvl.size()) > k) lvl.resize(k);
  }

  const auto& last = levels[T - 1];
  int best = 0;
  for (int s = 1; s < static_cast<int>(last.size()); ++s) {
    if (last[s].cum > last[best].cum) {
      best = s;
    } else if (last[s].cum == last[best].cum) {
      slot_chain(T - 1, s, ca);
      slot_chain(T - 1, best, cb);
      if (ca < cb) best = s;
    }
  }

  RawPath p;
  p.cum = last[best].cum;
  slot_chain(T - 1, best, p.idxs);
  return p;
}

struct ExactResult {
  std::optional<RawPath> legal;
  RawPath any;
};

// Unrestricted optimum: the legal table is a full pairwise DP with the
// IoU computed inline for every live pair (the unaccelerated baseline);
// the unconstrained table is just the per-frame objectness maxima.
ExactResult run_exact(const Workspace& ws) {
  const int T = static_cast<int>(ws.frames.size());
  ExactResult res;

  for (int t = 0; t < T; ++t) {
    const FrameSoA& f = ws.frames[t];
    int bi = -1;
    for (int i = 0; i < f.size(); ++i) {
      if (!f.alive[i]) continue;
      if (bi < 0 || f.score[i] > f.score[bi]) bi = i;
    }
    res.any.idxs.push_back(bi);
    res.any.cum += f.score[bi];
  }

  std::vector<std::vector<double>> cum(T);
  std::vector<std::vector<int>> parent(T);
  for (int t = 0; t < T; ++t) {
    cum[t].assign(ws.frames[t].size(), kNegInf);
    parent[t].assign(ws.frames[t].size(), -1);
  }
  const FrameSoA& f0 = ws.frames[0];
  for (int i = 0; i < f0.size(); ++i) {
    if (f0.alive[i]) cum[0][i] = f0.score[i];
  }

  std::vector<int> ca, cb;
  for (int t = 0; t + 1 < T; ++t) {
    const FrameSoA& fa = ws.frames[t];
    const FrameSoA& fb = ws.frames[t + 1];
    for (int j = 0; j < fb.size(); ++j) {
      if (!fb.alive[j]) continue;
      double best = kNegInf;
      int bp = -1;
      for (int i = 0; i < fa.size(); ++i) {
        if (!fa.alive[i] || cum[t][i] == kNegInf) continue;
        if (pair_iou(fa, i, fb, j) <= ws.tau) continue;
        if (bp < 0 || cum[t][i] > best) {
          best = cum[t][i];
          bp = i;
        } else if (cum[t][i] == best) {
          chain_of(parent, t, i, ca);
          chain_of(parent, t, bp, cb);
          if (ca < cb) bp = i;
        }
      }
      cum[t + 1][j] = (bp < 0) ? kNegInf : best + fb.score[j];
      parent[t + 1][j] = bp;
    }
  }

  int best = -1;
  for (int j = 0; j < ws.frames[T - 1].size(); ++j) {
    if (!ws.frames[T - 1].alive[j] || cum[T - 1][j] == kNegInf) continue;
    if (best < 0 || cum[T - 1][j] > cum[T - 1][best]) {
      best = j;
    } else if (cum[T - 1][j] == cum[T - 1][best]) {
      chain_of(parent, T - 1, j, ca);
      chain_of(parent, T - 1, best, cb);
      if (ca < cb) best = j;
    }
  }
  if (best >= 0) {
    RawPath p;
    p.cum = cum[T - 1][best];
    chain_of(parent, T - 1, best, p.idxs);
    res.legal = std::move(p);
  }
  return res;
}

// Score the two branches of run_exact against each other. A legal path
// scores cum + T, an unconstrained one just cum (any sum-maximizing path
// is provably illegal whenever it matters, but legality is recomputed
// from the boxes when the tube is materialized anyway).
RawPath pick_exact_winner(ExactResult&& r, int T) {
  if (!r.legal) return std::move(r.any);
  const double legal_score = r.legal->cum + static_cast<double>(T);
  if (legal_score > r.any.cum) return std::move(*r.legal);
  if (legal_score < r.any.cum) return std::move(r.any);
  return (r.legal->idxs < r.any.idxs) ? std::move(*r.legal) : std::move(r.any);
}

// Per-frame objectness maxima, ignoring overlap. Used by the optional
// fill stage once the legal supply is exhausted.
std::optional<RawPath> run_fill(const Workspace& ws) {
  RawPath p;
  for (const FrameSoA& f : ws.frames) {
    int bi = -1;
    for (int i = 0; i < f.size(); ++i) {
      if (!f.alive[i]) continue;
      if (bi < 0 || f.score[i] > f.score[bi]) bi = i;
    }
    if (bi < 0) return std::nullopt;
    p.idxs.push_back(bi);
    p.cum += f.score[bi];
  }
  return p;
}

bool all_links_legal(std::span<const Box> boxes, double tau) {
  for (std::size_t t = 0; t + 1 < boxes.size(); ++t) {
    if (iou(boxes[t], boxes[t + 1]) <= tau) return false;
  }
  return true;
}

Tube make_tube(const Workspace& ws, const RawPath& p, double tau) {
  Tube tube;
  const int T = static_cast<int>(ws.frames.size());
  tube.proposal_ids.reserve(T);
  tube.boxes.reserve(T);
  tube.objectness.reserve(T);
  for (int t = 0; t < T; ++t) {
    const int idx = p.idxs[t];
    tube.proposal_ids.push_back(ws.frames[t].ids[idx]);
    tube.boxes.push_back(ws.frames[t].boxes[idx]);
    tube.objectness.push_back(ws.frames[t].score[idx]);
  }
  tube.legal = all_links_legal(tube.boxes, tau);
  tube.score = action_score(tube.boxes, tube.objectness, tau);
  return tube;
}

std::optional<RawPath> run_variant(Workspace& ws, const LinkerConfig& cfg) {
  switch (cfg.variant) {
    case LinkVariant::exact:
      return pick_exact_winner(run_exact(ws), static_cast<int>(ws.frames.size()));
    case LinkVariant::ht:
      return run_ht(ws);
    case LinkVariant::ht_ts:
      return run_beam(ws, cfg.k);
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(LinkVariant v) {
  switch (v) {
    case LinkVariant::exact:
      return "exact";
    case LinkVariant::ht:
      return "ht";
    case LinkVariant::ht_ts:
      return "ht-ts";
  }
  return "?";
}

std::optional<LinkVariant> variant_from_string(std::string_view name) {
  if (name == "exact") return LinkVariant::exact;
  if (name == "ht") return LinkVariant::ht;
  if (name == "ht-ts" || name == "ht_ts") return LinkVariant::ht_ts;
  return std::nullopt;
}

double action_score(std::span<const Box> boxes,
                    std::span<const double> objectness, double tau) {
  if (boxes.size() != objectness.size() || boxes.empty()) {
    throw std::invalid_argument("action_score: need one box and one score per frame");
  }
  double s = 0.0;
  for (double a : objectness) s += a;
  if (all_links_legal(boxes, tau)) s += static_cast<double>(boxes.size());
  return s;
}

Tube link_exact(const VideoProposals& v, const LinkerConfig& cfg) {
  validate_config(cfg);
  Workspace ws = make_workspace(v, cfg.tau);
  require_nonempty_frames(ws);
  RawPath p = pick_exact_winner(run_exact(ws), static_cast<int>(ws.frames.size()));
  return make_tube(ws, p, cfg.tau);
}

std::optional<Tube> link_ht(const VideoProposals& v, const LinkerConfig& cfg) {
  validate_config(cfg);
  Workspace ws = make_workspace(v, cfg.tau);
  require_nonempty_frames(ws);
  prepare_adjacency(ws);
  auto p = run_ht(ws);
  if (!p) return std::nullopt;
  return make_tube(ws, *p, cfg.tau);
}

std::optional<Tube> link_ht_ts(const VideoProposals& v, const LinkerConfig& cfg) {
  validate_config(cfg);
  Workspace ws = make_workspace(v, cfg.tau);
  require_nonempty_frames(ws);
  prepare_adjacency(ws);
  auto p = run_beam(ws, cfg.k);
  if (!p) return std::nullopt;
  return make_tube(ws, *p, cfg.tau);
}

std::vector<Tube> extract_tubes(const VideoProposals& v, const LinkerConfig& cfg) {
  validate_config(cfg);
  Workspace ws = make_workspace(v, cfg.tau);
  if (cfg.variant != LinkVariant::exact) prepare_adjacency(ws);

  std::vector<Tube> out;
  bool filling = false;
  while (static_cast<int>(out.size()) < cfg.m) {
    bool frame_empty = false;
    for (const FrameSoA& f : ws.frames) {
      if (f.live == 0) {
        frame_empty = true;
        break;
      }
    }
    if (frame_empty) break;

    std::optional<RawPath> path;
    if (!filling) path = run_variant(ws, cfg);
    if (!path) {
      if (!cfg.fill_illegal) break;
      // The legal supply never regrows under deletion, so stay in fill
      // mode for the rest of the loop.
      filling = true;
      path = run_fill(ws);
      if (!path) break;
    }

    out.push_back(make_tube(ws, *path, cfg.tau));
    for (int t = 0; t < static_cast<int>(path->idxs.size()); ++t) {
      FrameSoA& f = ws.frames[t];
      f.alive[path->idxs[t]] = 0;
      --f.live;
    }
  }
  return out;
}

std::optional<Tube> oracle_exhaustive(const VideoProposals& v, double tau,
                                      bool legal_only) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw std::invalid_argument("oracle_exhaustive: tau must be in [0, 1]");
  }
  Workspace ws = make_workspace(v, tau);
  const int T = static_cast<int>(ws.frames.size());

  double tube_count = 1.0;
  for (const FrameSoA& f : ws.frames) tube_count *= static_cast<double>(f.size());
  if (tube_count > 1e6) {
    throw std::invalid_argument("oracle_exhaustive: instance too large (> 1e6 tubes)");
  }
  for (const FrameSoA& f : ws.frames) {
    if (f.size() == 0) return std::nullopt;
  }

  // Odometer enumeration: last frame varies fastest, so tubes appear in
  // ascending lexicographic id order and a strict > keeps the smallest
  // optimal sequence.
  std::vector<int> idx(T, 0);
  bool have = false;
  double best_score = 0.0;
  std::vector<int> best_idx;
  while (true) {
    double s = 0.0;
    for (int t = 0; t < T; ++t) s += ws.frames[t].score[idx[t]];
    bool legal = true;
    for (int t = 0; t + 1 < T; ++t) {
      if (pair_iou(ws.frames[t], idx[t], ws.frames[t + 1], idx[t + 1]) <= tau) {
        legal = false;
        break;
      }
    }
    if (!legal_only || legal) {
      const double total = s + (legal ? static_cast<double>(T) : 0.0);
      if (!have || total > best_score) {
        have = true;
        best_score = total;
        best_idx = idx;
      }
    }
    int pos = T - 1;
    while (pos >= 0 && ++idx[pos] == ws.frames[pos].size()) {
      idx[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  if (!have) return std::nullopt;

  RawPath p;
  p.idxs = std::move(best_idx);
  return make_tube(ws, p, tau);
}

double measure_avg_legal_successors(const VideoProposals& v, double tau) {
  Workspace ws = make_workspace(v, tau);
  if (ws.frames.size() < 2) return 0.0;
  build_adjacency(ws);
  long long edges = 0;
  long long sources = 0;
  for (std::size_t t = 0; t + 1 < ws.frames.size(); ++t) {
    sources += ws.frames[t].size();
    for (const auto& lst : ws.succ[t]) edges += static_cast<long long>(lst.size());
  }
  if (sources == 0) return 0.0;
  return static_cast<double>(edges) / static_cast<double>(sources);
}

}  // namespace tubelink
