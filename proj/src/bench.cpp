#include "tubelink/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace tubelink {

namespace {

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  if (n % 2 == 1) return xs[n / 2];
  return 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

double time_once(const VideoProposals& v, const LinkerConfig& cfg, int* m_achieved) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto tubes = extract_tubes(v, cfg);
  const auto t1 = std::chrono::steady_clock::now();
  *m_achieved = static_cast<int>(tubes.size());
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

SyntheticScenario bench_scenario(int n, int t, std::uint64_t seed) {
  SyntheticScenario s;
  s.actors = 4;
  s.proposals_per_actor = 10;
  if (n < s.actors * s.proposals_per_actor) {
    throw std::invalid_argument("bench: n must be at least 40");
  }
  s.background_count = n - s.actors * s.proposals_per_actor;
  s.motion_step = 5.0;
  s.jitter = 2.0;
  s.objectness_signal = 0.85;
  s.objectness_noise = 0.35;
  s.num_frames = t;
  s.seed = seed;
  s.frame_width = 640.0;
  s.frame_height = 480.0;
  s.actor_width = 60.0;
  s.actor_height = 80.0;
  s.background_size_min = 16.0;
  s.background_size_max = 60.0;
  return s;
}

BenchReport run_bench(const BenchParams& p) {
  if (p.repeat < 1) throw std::invalid_argument("bench: repeat must be >= 1");
  BenchReport report;
  report.params = p;

  for (int n : p.ns) {
    const GeneratedVideo gv = generate(bench_scenario(n, p.t, p.seed));
    const double q = measure_avg_legal_successors(gv.proposals, p.tau);

    double exact_seconds = 0.0;
    for (LinkVariant variant :
         {LinkVariant::exact, LinkVariant::ht, LinkVariant::ht_ts}) {
      LinkerConfig cfg;
      cfg.tau = p.tau;
      cfg.k = p.k;
      cfg.m = p.m;
      cfg.variant = variant;
      // The fast variants stop once the legal supply runs out; filling
      // with objectness-only tubes keeps the workload per extraction
      // comparable across variants (exact never needs it).
      cfg.fill_illegal = (variant != LinkVariant::exact);

      BenchCell cell;
      cell.variant = variant;
      cell.n = n;
      cell.q = q;

      int m_achieved = 0;
      time_once(gv.proposals, cfg, &m_achieved);  // warm-up, discarded
      std::vector<double> times(p.repeat);
      for (int r = 0; r < p.repeat; ++r) {
        times[r] = time_once(gv.proposals, cfg, &m_achieved);
      }
      cell.seconds = median(std::move(times));
      cell.m_achieved = m_achieved;
      if (variant == LinkVariant::exact) exact_seconds = cell.seconds;
      cell.speedup = exact_seconds / cell.seconds;
      report.cells.push_back(cell);
    }
  }
  return report;
}

void write_bench_csv(const BenchReport& r, std::ostream& out) {
  out << "variant,N,seconds,Q,speedup\n";
  char line[160];
  for (const BenchCell& c : r.cells) {
    std::snprintf(line, sizeof(line), "%s,%d,%.6f,%.4f,%.3f\n",
                  std::string(to_string(c.variant)).c_str(), c.n, c.seconds,
                  c.q, c.speedup);
    out << line;
  }
}

}  // namespace tubelink
