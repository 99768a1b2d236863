#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tubelink/geometry.hpp"
#include "tubelink/proposals.hpp"

namespace tubelink {

enum class LinkVariant { exact, ht, ht_ts };

std::string_view to_string(LinkVariant v);
std::optional<LinkVariant> variant_from_string(std::string_view name);

/// Everything that parameterizes tube extraction.
struct LinkerConfig {
  double tau = 0.3;  // IoU legality threshold for consecutive links
  int k = 10;        // beam width (ht_ts only)
  int m = 200;       // tubes to extract
  LinkVariant variant = LinkVariant::ht_ts;
  /// After the legal supply is exhausted, keep emitting tubes built from
  /// the per-frame objectness maxima (no overlap constraint). Off by
  /// default; extraction then simply stops early.
  bool fill_illegal = false;
};

/// One linked track: one proposal per frame across the whole clip.
/// `score` is the tube's action score; `legal` records whether every
/// consecutive pair of boxes overlaps more than the tau that produced it.
struct Tube {
  std::vector<int> proposal_ids;  // one per frame
  std::vector<Box> boxes;
  std::vector<double> objectness;
  double score = 0.0;
  bool legal = false;
};

/// Action score of a box/objectness sequence: sum of per-frame objectness
/// plus a bonus of T when every consecutive pair has iou > tau (strict).
/// A single-frame tube is vacuously legal.
double action_score(std::span<const Box> boxes,
                    std::span<const double> objectness, double tau);

/// Full dynamic program over every per-frame choice. Links with
/// iou <= tau are allowed; they only forfeit the legality bonus. O(T*N^2)
/// per call. Ties broken by lexicographically smallest proposal-id
/// sequence. Throws DataError when some frame has no proposals.
Tube link_exact(const VideoProposals& v, const LinkerConfig& cfg);

/// Maximum-score tube among legal tubes only (every link iou > tau).
/// Optimal over that restricted set; returns nullopt when no legal tube
/// spans all frames. Same tie-break as link_exact.
std::optional<Tube> link_ht(const VideoProposals& v, const LinkerConfig& cfg);

/// Beam-pruned variant of link_ht: frame 1 keeps the cfg.k
/// highest-objectness proposals; at each later frame every proposal
/// extends its best legal predecessor in the beam and the k best partials
/// (by cumulative objectness, ties by proposal id) survive. Legal but not
/// guaranteed optimal; identical to link_ht whenever k >= max_t N^t.
/// Returns nullopt when the beam dies.
std::optional<Tube> link_ht_ts(const VideoProposals& v, const LinkerConfig& cfg);

/// Greedy extraction of up to cfg.m proposal-disjoint tubes: run the
/// configured variant, delete the winning tube's proposals from their
/// frames, repeat. Stops early when the variant yields nothing (unless
/// cfg.fill_illegal) or any frame runs empty. Scores are non-increasing
/// for the optimal variants.
std::vector<Tube> extract_tubes(const VideoProposals& v, const LinkerConfig& cfg);

/// Test oracle: enumerates every tube (product of per-frame choices) and
/// returns the maximum-score one, optionally restricted to legal tubes.
/// Same tie-break as the linkers. Refuses instances with more than 10^6
/// tubes.
std::optional<Tube> oracle_exhaustive(const VideoProposals& v, double tau,
                                      bool legal_only);

/// Mean number of legal successors (iou > tau in the next frame) per
/// proposal, over frames 0..T-2. 0 for single-frame clips.
double measure_avg_legal_successors(const VideoProposals& v, double tau);

}  // namespace tubelink
