#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tubelink/bench.hpp"
#include "tubelink/error.hpp"
#include "tubelink/eval.hpp"
#include "tubelink/json_io.hpp"
#include "tubelink/linker.hpp"
#include "tubelink/proposals.hpp"

namespace {

using nlohmann::json;
using namespace tubelink;

constexpr int kExitOk = 0;
constexpr int kExitData = 2;
constexpr int kExitUsage = 64;

// TUBELINK_SEED, when set, wins over --seed.
std::uint64_t effective_seed(std::uint64_t cli_seed) {
  const char* env = std::getenv("TUBELINK_SEED");
  if (env == nullptr || *env == '\0') return cli_seed;
  try {
    return std::stoull(env);
  } catch (const std::exception&) {
    throw DataError(std::string("TUBELINK_SEED is not a valid integer: '") + env + "'");
  }
}

void write_or_print(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
}

struct GenerateArgs {
  SyntheticScenario scenario;
  std::string out;
  std::string gt_out;
  std::string video_id;
};

int cmd_generate(GenerateArgs& a) {
  a.scenario.seed = effective_seed(a.scenario.seed);
  GeneratedVideo gv = generate(a.scenario);
  if (!a.video_id.empty()) gv.proposals.video_id = a.video_id;
  save_proposals(gv.proposals, a.out);
  if (!a.gt_out.empty()) {
    save_ground_truth({gv.proposals.video_id, gv.ground_truth}, a.gt_out);
  }
  return kExitOk;
}

struct LinkArgs {
  std::string input;
  std::string output;
  std::string algo = "ht-ts";
  LinkerConfig cfg;
};

bool file_holds_array(const std::string& path) {
  std::ifstream in(path);
  char c;
  while (in.get(c)) {
    if (!std::isspace(static_cast<unsigned char>(c))) return c == '[';
  }
  return false;
}

int cmd_link(const LinkArgs& a) {
  const bool array_input = file_holds_array(a.input);
  const std::vector<VideoProposals> videos = load_proposals_many(a.input);
  std::vector<TubeFile> results;
  for (const VideoProposals& v : videos) {
    for (int t = 0; t < v.num_frames(); ++t) {
      if (v.frames[t].empty()) {
        throw DataError("frame " + std::to_string(t) + " of '" + v.video_id +
                        "' has no proposals");
      }
    }
    results.push_back({v.video_id, extract_tubes(v, a.cfg)});
  }
  if (array_input) {
    if (a.output.empty()) {
      throw DataError("array input needs --output");
    }
    save_tubes_many(results, a.output);
  } else {
    write_or_print(tubes_to_string(results.at(0)), a.output);
  }
  return kExitOk;
}

struct BenchArgs {
  BenchParams params;
  std::string csv;
};

int cmd_bench(BenchArgs& a) {
  a.params.seed = effective_seed(a.params.seed);
  const BenchReport report = run_bench(a.params);
  std::ostringstream csv;
  write_bench_csv(report, csv);
  write_or_print(csv.str(), a.csv);
  for (const BenchCell& c : report.cells) {
    std::cerr << "# " << to_string(c.variant) << " N=" << c.n
              << " m_achieved=" << c.m_achieved << "\n";
  }
  return kExitOk;
}

struct EvalArgs {
  std::string pred;
  std::string gt;
  std::string metric = "frame-map";
  double sigma = -1.0;  // negative = metric default
};

int cmd_eval(const EvalArgs& a) {
  const auto preds = load_predictions_many(a.pred);
  const auto gts = load_ground_truth_many(a.gt);

  std::map<std::string, const PredictionFile*> by_id;
  for (const auto& p : preds) {
    if (!by_id.emplace(p.video_id, &p).second) {
      throw DataError("duplicate video_id '" + p.video_id + "' in predictions");
    }
  }
  std::map<std::string, const GroundTruthFile*> gt_by_id;
  for (const auto& g : gts) {
    if (!gt_by_id.emplace(g.video_id, &g).second) {
      throw DataError("duplicate video_id '" + g.video_id + "' in ground truth");
    }
    if (by_id.find(g.video_id) == by_id.end()) {
      throw DataError("video '" + g.video_id + "' present in ground truth but not in predictions");
    }
  }
  for (const auto& [id, p] : by_id) {
    (void)p;
    if (gt_by_id.find(id) == gt_by_id.end()) {
      throw DataError("video '" + id + "' present in predictions but not in ground truth");
    }
  }

  MapResult result;
  double sigma = a.sigma;
  if (a.metric == "frame-map") {
    if (sigma < 0.0) sigma = 0.5;
    std::vector<FrameDetection> dets;
    std::vector<FrameGroundTruth> truth;
    for (const auto& g : gts) {
      for (const auto& tube : g.tubes) {
        for (std::size_t t = 0; t < tube.boxes.size(); ++t) {
          truth.push_back({g.video_id + ":" + std::to_string(t), tube.label, tube.boxes[t]});
        }
      }
      for (const auto& tube : by_id.at(g.video_id)->tubes) {
        for (std::size_t t = 0; t < tube.boxes.size(); ++t) {
          dets.push_back({g.video_id + ":" + std::to_string(t), tube.label,
                          tube.confidence, tube.boxes[t]});
        }
      }
    }
    result = frame_map(dets, truth, sigma);
  } else if (a.metric == "video-map") {
    if (sigma < 0.0) sigma = 0.2;
    std::vector<TubeDetection> dets;
    std::vector<TubeGroundTruth> truth;
    for (const auto& g : gts) {
      for (const auto& tube : g.tubes) {
        truth.push_back({g.video_id, tube.label, tube.boxes});
      }
      for (const auto& tube : by_id.at(g.video_id)->tubes) {
        dets.push_back({g.video_id, tube.label, tube.confidence, tube.boxes});
      }
    }
    result = video_map(dets, truth, sigma);
  } else {
    std::cerr << "error: unknown metric '" << a.metric << "'\n";
    return kExitUsage;
  }

  json per_class = json::object();
  for (const auto& [c, ap] : result.per_class) per_class[std::to_string(c)] = ap;
  json out = {{"metric", a.metric},
              {"sigma", sigma},
              {"value", result.mean},
              {"per_class", per_class}};
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

struct CoselectArgs {
  std::string a_path;
  std::string b_path;
  std::vector<double> thetas{0.7};
  std::vector<int> ns{50};
  std::string csv;
};

int cmd_coselect(const CoselectArgs& a) {
  const auto as = load_tubes_many(a.a_path);
  const auto bs = load_tubes_many(a.b_path);
  std::map<std::string, const TubeFile*> b_by_id;
  for (const auto& b : bs) b_by_id[b.video_id] = &b;
  if (as.empty()) throw DataError("no videos in '" + a.a_path + "'");
  for (const auto& av : as) {
    if (b_by_id.find(av.video_id) == b_by_id.end()) {
      throw DataError("video '" + av.video_id + "' missing from '" + a.b_path + "'");
    }
  }

  struct Cell {
    double theta;
    int n;
    double gamma;
  };
  std::vector<Cell> cells;
  for (double theta : a.thetas) {
    for (int n : a.ns) {
      double sum = 0.0;
      for (const auto& av : as) {
        CoselectionInput in;
        in.set_a = av.tubes;
        in.set_b = b_by_id.at(av.video_id)->tubes;
        in.theta = theta;
        in.n = n;
        sum += coselection_rate(in);
      }
      cells.push_back({theta, n, sum / static_cast<double>(as.size())});
    }
  }

  if (cells.size() == 1 && a.csv.empty()) {
    json out = {{"metric", "coselection_rate"},
                {"theta", cells[0].theta},
                {"n", cells[0].n},
                {"value", cells[0].gamma}};
    std::cout << out.dump(2) << "\n";
    return kExitOk;
  }
  std::ostringstream csv;
  csv << "theta,n,gamma\n";
  char line[96];
  for (const Cell& c : cells) {
    std::snprintf(line, sizeof(line), "%.2f,%d,%.6f\n", c.theta, c.n, c.gamma);
    csv << line;
  }
  write_or_print(csv.str(), a.csv);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deformable tube linking over per-frame region proposals"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* g = app.add_subcommand("generate", "Generate a synthetic proposal clip");
  g->add_option("--out", gen.out, "Proposals JSON output path")->required();
  g->add_option("--gt-out", gen.gt_out, "Ground-truth JSON output path");
  g->add_option("--video-id", gen.video_id, "Override the video id");
  g->add_option("--actors", gen.scenario.actors, "Number of actors");
  g->add_option("--proposals-per-actor", gen.scenario.proposals_per_actor,
                "Proposals per actor per frame");
  g->add_option("--motion-step", gen.scenario.motion_step, "Max per-axis step (px)");
  g->add_option("--jitter", gen.scenario.jitter, "Proposal jitter (px)");
  g->add_option("--background", gen.scenario.background_count,
                "Background proposals per frame");
  g->add_option("--signal", gen.scenario.objectness_signal, "Actor objectness mean");
  g->add_option("--noise", gen.scenario.objectness_noise, "Background objectness mean");
  g->add_option("--seed", gen.scenario.seed, "RNG seed");
  g->add_option("--width", gen.scenario.frame_width, "Frame width (px)");
  g->add_option("--height", gen.scenario.frame_height, "Frame height (px)");
  g->add_option("--frames", gen.scenario.num_frames, "Clip length T");
  g->add_option("--classes", gen.scenario.num_classes, "Number of action classes");

  LinkArgs link;
  std::string algo = "ht-ts";
  CLI::App* l = app.add_subcommand("link", "Extract tubes from a proposals file");
  l->add_option("--input", link.input, "Proposals JSON")->required();
  l->add_option("--output", link.output, "Tube JSON output (default stdout)");
  l->add_option("--tau", link.cfg.tau, "IoU legality threshold");
  l->add_option("--k", link.cfg.k, "Beam width (ht-ts)");
  l->add_option("--m", link.cfg.m, "Tubes to extract");
  l->add_option("--algo", algo, "exact | ht | ht-ts");
  l->add_flag("--fill-illegal", link.cfg.fill_illegal,
              "Fill up to m with objectness-only tubes once legal tubes run out");

  BenchArgs bench;
  CLI::App* b = app.add_subcommand("bench", "Time the linking variants");
  b->add_option("--n", bench.params.ns, "Proposal counts")->delimiter(',');
  b->add_option("--t", bench.params.t, "Frames per clip");
  b->add_option("--m", bench.params.m, "Tubes per extraction");
  b->add_option("--k", bench.params.k, "Beam width");
  b->add_option("--tau", bench.params.tau, "IoU legality threshold");
  b->add_option("--seed", bench.params.seed, "Scenario seed");
  b->add_option("--repeat", bench.params.repeat, "Timed repetitions (median)");
  b->add_option("--csv", bench.csv, "CSV output path (default stdout)");

  EvalArgs eval;
  CLI::App* e = app.add_subcommand("eval", "Score predictions against ground truth");
  e->add_option("--pred", eval.pred, "Predictions JSON")->required();
  e->add_option("--gt", eval.gt, "Ground-truth JSON")->required();
  e->add_option("--metric", eval.metric, "frame-map | video-map");
  e->add_option("--sigma", eval.sigma, "IoU threshold (default 0.5 / 0.2)");

  CoselectArgs cosel;
  CLI::App* c = app.add_subcommand("coselect", "Agreement rate between two tube sets");
  c->add_option("--a", cosel.a_path, "Tube JSON (pruned search)")->required();
  c->add_option("--b", cosel.b_path, "Tube JSON (reference search)")->required();
  c->add_option("--theta", cosel.thetas, "Overlap thresholds")->delimiter(',');
  c->add_option("--n", cosel.ns, "Top-n cutoffs")->delimiter(',');
  c->add_option("--csv", cosel.csv, "CSV output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e2) {
    return app.exit(e2);
  } catch (const CLI::CallForAllHelp& e2) {
    return app.exit(e2);
  } catch (const CLI::CallForVersion& e2) {
    return app.exit(e2);
  } catch (const CLI::ParseError& e2) {
    app.exit(e2);
    return kExitUsage;
  }

  try {
    if (g->parsed()) return cmd_generate(gen);
    if (l->parsed()) {
      const auto variant = variant_from_string(algo);
      if (!variant) {
        std::cerr << "error: unknown algo '" << algo << "' (use exact, ht or ht-ts)\n";
        return kExitUsage;
      }
      link.cfg.variant = *variant;
      return cmd_link(link);
    }
    if (b->parsed()) return cmd_bench(bench);
    if (e->parsed()) return cmd_eval(eval);
    if (c->parsed()) return cmd_coselect(cosel);
  } catch (const DataError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitData;
  } catch (const std::overflow_error& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}
