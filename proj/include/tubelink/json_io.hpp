#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tubelink/linker.hpp"
#include "tubelink/proposals.hpp"

namespace tubelink {

/// Ground-truth annotations for one video.
struct GroundTruthFile {
  std::string video_id;
  std::vector<GroundTruthTube> tubes;
};

/// Linked tubes for one video, in extraction order.
struct TubeFile {
  std::string video_id;
  std::vector<Tube> tubes;
};

/// A classified, scored tube (prediction input for the evaluators).
struct ClassifiedTube {
  int label = 1;
  double confidence = 0.0;
  std::vector<Box> boxes;
};

struct PredictionFile {
  std::string video_id;
  std::vector<ClassifiedTube> tubes;
};

// All loaders throw DataError with a message naming the offending
// frame/id/field. Files hold either a single video object or an array of
// them; the *_many loaders accept both. Reals are written as shortest
// round-trip decimals, so load(save(x)) == x.

VideoProposals load_proposals(const std::string& path);
void save_proposals(const VideoProposals& v, const std::string& path);
std::string proposals_to_string(const VideoProposals& v);
std::vector<VideoProposals> load_proposals_many(const std::string& path);

GroundTruthFile load_ground_truth(const std::string& path);
void save_ground_truth(const GroundTruthFile& g, const std::string& path);
std::vector<GroundTruthFile> load_ground_truth_many(const std::string& path);

TubeFile load_tubes(const std::string& path);
void save_tubes(const TubeFile& t, const std::string& path);
std::string tubes_to_string(const TubeFile& t);
std::vector<TubeFile> load_tubes_many(const std::string& path);
void save_tubes_many(const std::vector<TubeFile>& ts, const std::string& path);

PredictionFile load_predictions(const std::string& path);
void save_predictions(const PredictionFile& p, const std::string& path);
std::vector<PredictionFile> load_predictions_many(const std::string& path);

}  // namespace tubelink
