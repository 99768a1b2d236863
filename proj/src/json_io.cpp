#include "tubelink/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "tubelink/error.hpp"

namespace tubelink {

namespace {

using nlohmann::json;

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError("malformed JSON in '" + path + "': " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
  if (!out) throw DataError("write failed for '" + path + "'");
}

double as_finite_double(const json& j, const std::string& what) {
  if (!j.is_number()) throw DataError(what + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw DataError(what + " must be finite");
  return v;
}

json box_to_json(const Box& b) { return json::array({b.cx, b.cy, b.w, b.h}); }

Box box_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 4) {
    throw DataError(what + ": box must be an array [cx, cy, w, h]");
  }
  Box b{as_finite_double(j[0], what + ".cx"), as_finite_double(j[1], what + ".cy"),
        as_finite_double(j[2], what + ".w"), as_finite_double(j[3], what + ".h")};
  if (!b.valid()) throw DataError(what + ": box extent must be positive");
  return b;
}

json proposals_to_json(const VideoProposals& v) {
  json frames = json::array();
  for (int t = 0; t < v.num_frames(); ++t) {
    json props = json::array();
    for (const RegionProposal& p : v.frames[t]) {
      props.push_back({{"id", p.id}, {"box", box_to_json(p.box)}, {"score", p.objectness}});
    }
    frames.push_back({{"t", t}, {"proposals", std::move(props)}});
  }
  return {{"video_id", v.video_id}, {"T", v.num_frames()}, {"frames", std::move(frames)}};
}

VideoProposals proposals_from_json(const json& j) {
  if (!j.is_object()) throw DataError("proposals: expected an object");
  VideoProposals v;
  v.video_id = j.value("video_id", std::string{});
  if (!j.contains("T") || !j["T"].is_number_integer()) {
    throw DataError("proposals: missing integer field 'T'");
  }
  const int T = j["T"].get<int>();
  if (T < 1) throw DataError("proposals: T must be >= 1");
  if (!j.contains("frames") || !j["frames"].is_array() ||
      static_cast<int>(j["frames"].size()) != T) {
    throw DataError("proposals: 'frames' must be an array of length T");
  }
  v.frames.resize(T);
  for (int t = 0; t < T; ++t) {
    const json& jf = j["frames"][t];
    if (!jf.contains("t") || !jf["t"].is_number_integer() || jf["t"].get<int>() != t) {
      throw DataError("proposals: non-contiguous frame indices (expected t=" +
                      std::to_string(t) + ")");
    }
    if (!jf.contains("proposals") || !jf["proposals"].is_array()) {
      throw DataError("proposals: frame " + std::to_string(t) +
                      " missing 'proposals' array");
    }
    std::vector<int> seen;
    for (const json& jp : jf["proposals"]) {
      RegionProposal p;
      p.frame = t;
      if (!jp.contains("id") || !jp["id"].is_number_integer()) {
        throw DataError("proposals: frame " + std::to_string(t) +
                        " has a proposal without integer 'id'");
      }
      p.id = jp["id"].get<int>();
      const std::string where =
          "frame " + std::to_string(t) + " proposal " + std::to_string(p.id);
      if (!jp.contains("box")) throw DataError(where + ": missing box");
      p.box = box_from_json(jp["box"], where);
      if (!jp.contains("score")) throw DataError(where + ": missing score");
      p.objectness = as_finite_double(jp["score"], where + ".score");
      if (p.objectness < 0.0 || p.objectness > 1.0) {
        throw DataError(where + ": score must be in [0, 1]");
      }
      seen.push_back(p.id);
      v.frames[t].push_back(std::move(p));
    }
    std::sort(seen.begin(), seen.end());
    for (std::size_t i = 0; i + 1 < seen.size(); ++i) {
      if (seen[i] == seen[i + 1]) {
        throw DataError("proposals: duplicate id " + std::to_string(seen[i]) +
                        " in frame " + std::to_string(t));
      }
    }
  }
  return v;
}

json ground_truth_to_json(const GroundTruthFile& g) {
  json tubes = json::array();
  for (const GroundTruthTube& t : g.tubes) {
    json boxes = json::array();
    for (const Box& b : t.boxes) boxes.push_back(box_to_json(b));
    tubes.push_back({{"label", t.label}, {"boxes", std::move(boxes)}});
  }
  return {{"video_id", g.video_id}, {"tubes", std::move(tubes)}};
}

GroundTruthFile ground_truth_from_json(const json& j) {
  if (!j.is_object()) throw DataError("ground truth: expected an object");
  GroundTruthFile g;
  g.video_id = j.value("video_id", std::string{});
  if (!j.contains("tubes") || !j["tubes"].is_array()) {
    throw DataError("ground truth: missing 'tubes' array");
  }
  for (const json& jt : j["tubes"]) {
    GroundTruthTube t;
    if (!jt.contains("label") || !jt["label"].is_number_integer() ||
        jt["label"].get<int>() < 1) {
      throw DataError("ground truth: tube label must be an integer >= 1");
    }
    t.label = jt["label"].get<int>();
    if (!jt.contains("boxes") || !jt["boxes"].is_array() || jt["boxes"].empty()) {
      throw DataError("ground truth: tube needs a non-empty 'boxes' array");
    }
    for (const json& jb : jt["boxes"]) t.boxes.push_back(box_from_json(jb, "ground truth box"));
    g.tubes.push_back(std::move(t));
  }
  return g;
}

json tube_to_json(const Tube& t) {
  json boxes = json::array();
  for (const Box& b : t.boxes) boxes.push_back(box_to_json(b));
  return {{"score", t.score},
          {"legal", t.legal},
          {"ids", t.proposal_ids},
          {"boxes", std::move(boxes)}};
}

Tube tube_from_json(const json& j, const std::string& where) {
  Tube t;
  if (!j.is_object() || !j.contains("score") || !j.contains("legal") ||
      !j.contains("ids") || !j.contains("boxes")) {
    throw DataError(where + ": tube needs score/legal/ids/boxes");
  }
  t.score = as_finite_double(j["score"], where + ".score");
  if (!j["legal"].is_boolean()) throw DataError(where + ".legal must be a bool");
  t.legal = j["legal"].get<bool>();
  for (const json& ji : j["ids"]) {
    if (!ji.is_number_integer()) throw DataError(where + ".ids must be integers");
    t.proposal_ids.push_back(ji.get<int>());
  }
  for (const json& jb : j["boxes"]) t.boxes.push_back(box_from_json(jb, where));
  if (t.boxes.size() != t.proposal_ids.size() || t.boxes.empty()) {
    throw DataError(where + ": ids/boxes must be non-empty and equal length");
  }
  return t;
}

json tubes_to_json(const TubeFile& tf) {
  json tubes = json::array();
  for (const Tube& t : tf.tubes) tubes.push_back(tube_to_json(t));
  return {{"video_id", tf.video_id}, {"tubes", std::move(tubes)}};
}

TubeFile tubes_from_json(const json& j) {
  if (!j.is_object()) throw DataError("tubes: expected an object");
  TubeFile tf;
  tf.video_id = j.value("video_id", std::string{});
  if (!j.contains("tubes") || !j["tubes"].is_array()) {
    throw DataError("tubes: missing 'tubes' array");
  }
  int i = 0;
  for (const json& jt : j["tubes"]) {
    tf.tubes.push_back(tube_from_json(jt, "tube " + std::to_string(i)));
    ++i;
  }
  return tf;
}

json predictions_to_json(const PredictionFile& p) {
  json tubes = json::array();
  for (const ClassifiedTube& t : p.tubes) {
    json boxes = json::array();
    for (const Box& b : t.boxes) boxes.push_back(box_to_json(b));
    tubes.push_back(
        {{"label", t.label}, {"confidence", t.confidence}, {"boxes", std::move(boxes)}});
  }
  return {{"video_id", p.video_id}, {"tubes", std::move(tubes)}};
}

PredictionFile predictions_from_json(const json& j) {
  if (!j.is_object()) throw DataError("predictions: expected an object");
  PredictionFile p;
  p.video_id = j.value("video_id", std::string{});
  if (!j.contains("tubes") || !j["tubes"].is_array()) {
    throw DataError("predictions: missing 'tubes' array");
  }
  for (const json& jt : j["tubes"]) {
    ClassifiedTube t;
    if (!jt.contains("label") || !jt["label"].is_number_integer() ||
        jt["label"].get<int>() < 1) {
      throw DataError("predictions: tube label must be an integer >= 1");
    }
    t.label = jt["label"].get<int>();
    if (!jt.contains("confidence")) throw DataError("predictions: tube missing confidence");
    t.confidence = as_finite_double(jt["confidence"], "prediction confidence");
    if (!jt.contains("boxes") || !jt["boxes"].is_array() || jt["boxes"].empty()) {
      throw DataError("predictions: tube needs a non-empty 'boxes' array");
    }
    for (const json& jb : jt["boxes"]) t.boxes.push_back(box_from_json(jb, "prediction box"));
    p.tubes.push_back(std::move(t));
  }
  return p;
}

// Accept a single video object or an array of them.
template <typename T, typename FromJson>
std::vector<T> many_from_json(const json& j, FromJson from) {
  std::vector<T> out;
  if (j.is_array()) {
    for (const json& e : j) out.push_back(from(e));
  } else {
    out.push_back(from(j));
  }
  return out;
}

}  // namespace

VideoProposals load_proposals(const std::string& path) {
  return proposals_from_json(read_json_file(path));
}

void save_proposals(const VideoProposals& v, const std::string& path) {
  write_text_file(path, proposals_to_string(v));
}

std::string proposals_to_string(const VideoProposals& v) {
  return proposals_to_json(v).dump(2) + "\n";
}

std::vector<VideoProposals> load_proposals_many(const std::string& path) {
  return many_from_json<VideoProposals>(read_json_file(path), proposals_from_json);
}

GroundTruthFile load_ground_truth(const std::string& path) {
  return ground_truth_from_json(read_json_file(path));
}

void save_ground_truth(const GroundTruthFile& g, const std::string& path) {
  write_text_file(path, ground_truth_to_json(g).dump(2) + "\n");
}

std::vector<GroundTruthFile> load_ground_truth_many(const std::string& path) {
  return many_from_json<GroundTruthFile>(read_json_file(path), ground_truth_from_json);
}

TubeFile load_tubes(const std::string& path) {
  return tubes_from_json(read_json_file(path));
}

void save_tubes(const TubeFile& t, const std::string& path) {
  write_text_file(path, tubes_to_string(t));
}

std::string tubes_to_string(const TubeFile& t) {
  return tubes_to_json(t).dump(2) + "\n";
}

std::vector<TubeFile> load_tubes_many(const std::string& path) {
  return many_from_json<TubeFile>(read_json_file(path), tubes_from_json);
}

void save_tubes_many(const std::vector<TubeFile>& ts, const std::string& path) {
  json arr = json::array();
  for (const TubeFile& t : ts) arr.push_back(tubes_to_json(t));
  write_text_file(path, arr.dump(2) + "\n");
}

PredictionFile load_predictions(const std::string& path) {
  return predictions_from_json(read_json_file(path));
}

void save_predictions(const PredictionFile& p, const std::string& path) {
  write_text_file(path, predictions_to_json(p).dump(2) + "\n");
}

std::vector<PredictionFile> load_predictions_many(const std::string& path) {
  return many_from_json<PredictionFile>(read_json_file(path), predictions_from_json);
}

}  // namespace tubelink
