#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "tubelink/linker.hpp"
#include "tubelink/proposals.hpp"

namespace tubelink {

/// Runtime-sweep parameters. For each proposal count in `ns` a synthetic
/// clip is generated and every linking variant is timed over `repeat`
/// runs (median reported, one warm-up run discarded). The timed region is
/// the extraction call only.
struct BenchParams {
  std::vector<int> ns{300, 500, 700, 1000};
  int t = 5;
  int m = 200;
  int k = 10;
  double tau = 0.3;
  std::uint64_t seed = 42;
  int repeat = 5;
};

struct BenchCell {
  LinkVariant variant = LinkVariant::exact;
  int n = 0;
  double seconds = 0.0;
  double q = 0.0;       // measured mean legal successors per proposal
  int m_achieved = 0;   // tubes actually extracted
  double speedup = 1.0; // time(exact) / time(this variant) at the same n
};

struct BenchReport {
  BenchParams params;
  std::vector<BenchCell> cells;  // grouped by n, variant order exact/ht/ht-ts
};

/// The clip shape used by the sweep: a few smoothly moving actors plus
/// uniform background clutter padding each frame up to n proposals.
SyntheticScenario bench_scenario(int n, int t, std::uint64_t seed);

BenchReport run_bench(const BenchParams& p);

/// CSV with header variant,N,seconds,Q,speedup ('.' decimal separator).
void write_bench_csv(const BenchReport& r, std::ostream& out);

}  // namespace tubelink
