#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <set>

#include "hlpt/particle_system.hpp"
#include "hlpt/replica.hpp"
#include "json.hpp"

using namespace hlpt;

namespace {
std::vector<long long> iota_positions(long long L) {
  std::vector<long long> v(static_cast<std::size_t>(L) + 1);
  for (long long i = 0; i <= L; ++i) v[static_cast<std::size_t>(i)] = i;
  return v;
}
}  // namespace

TEST_CASE("sample_initial fills step data deterministically") {
  Rng rng(7);
  const ModelParams params{0.5, 7};
  const Configuration step =
      sample_initial(params, InitialCondition{Step{4}}, rng);
  CHECK(step.positions == std::vector<long long>{0, 1, 2, 3, 4});
  const Configuration bern =
      sample_initial(params, InitialCondition{StepBernoulli{1.0, 4}}, rng);
  CHECK(bern.positions == step.positions);  // rho = 1 reduces to Step
  CHECK(step.time == 0.0);
}

TEST_CASE("sample_initial Bernoulli mean particle count") {
  // Binomial mean (L+1) rho = 5000.5 at L=1e4, rho=0.5; MC over 1000 seeds.
  const ModelParams params{0.5, 1};
  double total = 0.0;
  const int seeds = 1000;
  for (int s = 0; s < seeds; ++s) {
    Rng rng = replica_rng(11, static_cast<std::uint64_t>(s));
    total += static_cast<double>(
        sample_initial(params, InitialCondition{StepBernoulli{0.5, 10000}}, rng)
            .positions.size());
  }
  const double mean = total / seeds;
  const double sigma_mc = std::sqrt(10001.0 * 0.25 / seeds);
  CHECK(std::abs(mean - 5000.5) < 3.0 * sigma_mc);
}

TEST_CASE("sample_initial validation and empty state") {
  Rng rng(3);
  const ModelParams params{0.5, 3};
  CHECK_THROWS_AS(sample_initial({1.5, 1}, InitialCondition{Step{4}}, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      sample_initial(params, InitialCondition{StepBernoulli{0.0, 4}}, rng),
      std::invalid_argument);
  CHECK_THROWS_AS(
      sample_initial(params, InitialCondition{Explicit{{3, 3, 5}}}, rng),
      std::invalid_argument);
  // rho small, L=1: empty comes up quickly for some seed
  bool saw_empty = false;
  for (int s = 0; s < 64 && !saw_empty; ++s) {
    Rng r = replica_rng(5, static_cast<std::uint64_t>(s));
    try {
      sample_initial(params, InitialCondition{StepBernoulli{0.01, 1}}, r);
    } catch (const EmptyStateError&) {
      saw_empty = true;
    }
  }
  CHECK(saw_empty);
}

TEST_CASE("activate jump law on an open gap") {
  // positions [0,5]: P(new position 1) = 1-b.
  const double b = 0.5;
  int hits = 0;
  const int n = 100000;
  Rng rng(17);
  for (int i = 0; i < n; ++i) {
    Configuration c;
    c.positions = {0, 5};
    activate(c, 0, b, rng);
    CHECK(c.ordered());
    if (c.positions[0] == 1) ++hits;
  }
  const double phat = static_cast<double>(hits) / n;
  CHECK(std::abs(phat - (1.0 - b)) < 3.0 * std::sqrt(0.25 / n));
}

TEST_CASE("activate forced push at gap one") {
  Rng rng(19);
  for (int i = 0; i < 200; ++i) {
    Configuration c;
    c.positions = {0, 1};
    activate(c, 0, 0.5, rng);
    CHECK(c.positions[0] == 1);   // lands on the neighbour's site
    CHECK(c.positions[1] >= 2);   // neighbour was activated
    CHECK(c.boundary_touched);    // rightmost particle moved
    CHECK(c.max_cascade_depth >= 2);
  }
}

TEST_CASE("activate cascade tree probability") {
  // b=0.5, [0,3,4], activate 0: P(final [2,3,4]) = (1-b) b = 0.25.
  const int n = 100000;
  int hits = 0;
  Rng rng(23);
  for (int i = 0; i < n; ++i) {
    Configuration c;
    c.positions = {0, 3, 4};
    activate(c, 0, 0.5, rng);
    if (c.positions == std::vector<long long>{2, 3, 4}) ++hits;
  }
  const double phat = static_cast<double>(hits) / n;
  CHECK(std::abs(phat - 0.25) < 3.0 * std::sqrt(0.25 * 0.75 / n));
}

TEST_CASE("step holding times") {
  Rng rng(29);
  double total = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    Configuration c;
    c.positions = {0};
    step(c, 0.5, rng);
    total += c.time;
  }
  CHECK(std::abs(total / n - 1.0) < 3.0 / std::sqrt(static_cast<double>(n)));

  double total10 = 0.0;
  const int n10 = 200000;
  for (int i = 0; i < n10; ++i) {
    Configuration c;
    c.positions = iota_positions(9);
    step(c, 0.5, rng);
    total10 += c.time;
  }
  CHECK(std::abs(total10 / n10 - 0.1) <
        3.0 * 0.1 / std::sqrt(static_cast<double>(n10)));
}

TEST_CASE("single particle drift matches compound Poisson mean") {
  // E[position at t] = t/(1-b) = 2 at b=0.5, t=1.
  const int n = 100000;
  double total = 0.0;
  Rng rng(31);
  for (int i = 0; i < n; ++i) {
    Configuration c;
    c.positions = {0};
    run_until(c, 0.5, 1.0, rng);
    total += static_cast<double>(c.positions[0]);
  }
  const double sd = std::sqrt(6.0);  // var = t E[G^2] = (1+b)/(1-b)^2
  CHECK(std::abs(total / n - 2.0) < 3.0 * sd / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("run_until zero-length and chaining") {
  Rng rng(37);
  Configuration c;
  c.positions = {0, 2, 5};
  c.time = 1.0;
  const Configuration before = c;
  run_until(c, 0.5, 1.0, rng);
  CHECK(c.positions == before.positions);
  CHECK(c.time == 1.0);
  CHECK_THROWS_AS(run_until(c, 0.5, 0.5, rng), std::invalid_argument);

  // run_until(1) then run_until(2) has the law of run_until(2): compare the
  // mean final height at x=6 over replicas (equality in distribution; the
  // two paths consume different stream lengths).
  const int n = 20000;
  double sum_a = 0.0, sum_b = 0.0, sumsq_a = 0.0;
  for (int i = 0; i < n; ++i) {
    Rng ra = replica_rng(41, static_cast<std::uint64_t>(i));
    Configuration a;
    a.positions = iota_positions(5);
    run_until(a, 0.5, 1.0, ra);
    run_until(a, 0.5, 2.0, ra);
    const double ha = static_cast<double>(height(a, 6));
    sum_a += ha;
    sumsq_a += ha * ha;

    Rng rb = replica_rng(43, static_cast<std::uint64_t>(i));
    Configuration bb;
    bb.positions = iota_positions(5);
    run_until(bb, 0.5, 2.0, rb);
    sum_b += static_cast<double>(height(bb, 6));
  }
  const double mean_a = sum_a / n, mean_b = sum_b / n;
  const double sd = std::sqrt(sumsq_a / n - mean_a * mean_a);
  CHECK(std::abs(mean_a - mean_b) < 4.0 * sd * std::sqrt(2.0 / n));
}

TEST_CASE("height counts particles weakly left of x") {
  Configuration c;
  c.positions = {0, 2, 5};
  CHECK(height(c, 3) == 2);
  CHECK(height(c, -1) == 0);
  CHECK(height(c, std::numeric_limits<long long>::max()) == 3);
  CHECK(height(c, 0) == 1);
}

TEST_CASE("jump-size law chi-square at gap 6") {
  const double b = 0.5;
  const long long gap = 6;
  std::vector<long long> counts(static_cast<std::size_t>(gap) + 1, 0);
  const long long n = 1000000;
  Rng rng(47);
  for (long long i = 0; i < n; ++i) {
    Configuration c;
    c.positions = {0, gap, gap + 50};
    activate(c, 0, b, rng);
    const long long j = c.positions[0] - 0;  // displacement of the mover
    REQUIRE(j >= 1);
    REQUIRE(j <= gap);
    ++counts[static_cast<std::size_t>(j)];
  }
  double chi2 = 0.0;
  for (long long j = 1; j <= gap; ++j) {
    const double p = (j < gap) ? (1.0 - b) * std::pow(b, static_cast<double>(j - 1))
                               : std::pow(b, static_cast<double>(gap - 1));
    const double expect = p * static_cast<double>(n);
    const double diff = static_cast<double>(counts[static_cast<std::size_t>(j)]) - expect;
    chi2 += diff * diff / expect;
  }
  CHECK(chi2 < 30.0);  // df = 5, far beyond the 0.9999 quantile 25.7
}

TEST_CASE("rate identity: rings per particle-time") {
  Rng rng(53);
  Configuration c;
  c.positions = iota_positions(49);
  run_until(c, 0.5, 100.0, rng);
  const double rate =
      static_cast<double>(c.clock_rings) / (50.0 * 100.0);
  CHECK(std::abs(rate - 1.0) < 0.05);
}

TEST_CASE("determinism: identical seed, identical trajectory") {
  auto run = [] {
    Rng rng(59);
    Configuration c;
    c.positions = iota_positions(20);
    run_until(c, 0.4, 5.0, rng);
    return c;
  };
  const Configuration a = run(), b = run();
  CHECK(a.positions == b.positions);
  CHECK(a.clock_rings == b.clock_rings);
  CHECK(a.time == b.time);
}

TEST_CASE("ordering and monotonicity under random evolution") {
  Rng rng(61);
  Configuration c;
  c.positions = {0, 1, 4, 9, 10, 30};
  std::vector<long long> prev = c.positions;
  for (int e = 0; e < 3000; ++e) {
    step(c, 0.3, rng);
    REQUIRE(c.ordered());
    for (std::size_t i = 0; i < prev.size(); ++i)
      REQUIRE(c.positions[i] >= prev[i]);  // particles never move left
    prev = c.positions;
  }
}

TEST_CASE("run_window agrees with run_until when nothing escapes") {
  Rng r1(67), r2(67);
  Configuration c;
  c.positions = iota_positions(10);
  run_until(c, 0.5, 2.0, r1);
  const WindowResult w =
      run_window(iota_positions(10), 0.5, 1LL << 40, 2.0, r2);
  CHECK(w.live == c.positions);
  CHECK(w.clock_rings == c.clock_rings);
}

TEST_CASE("law of large numbers toward the limit shape") {
  // Step data, b=0.5, nu=4, t=1000: mean N_{nu t}(t)/t near 0.343146.
  const double b = 0.5, t = 1000.0, nu = 4.0;
  const long long x = static_cast<long long>(nu * t);
  const int reps = 100;
  struct Acc { double sum = 0.0; int touched = 0; };
  Acc acc = parallel_reduce<Acc>(
      reps, 71,
      [&](Rng& rng, Acc& a) {
        const WindowResult w = run_window(iota_positions(x), b, x, t, rng);
        a.sum += static_cast<double>(height_of(w.live, x)) / t;
      },
      [](Acc& into, const Acc& from) {
        into.sum += from.sum;
        into.touched += from.touched;
      });
  CHECK(std::abs(acc.sum / reps - 0.34314575050762) < 0.02);
}

TEST_CASE("reservoir influx keeps Bernoulli marginals (light)") {
  // Full-strength stationarity is acceptance criterion 9; this is a smoke
  // version: window 60, burn-in 60, occupation of site 5 within 4 sigma.
  const double rho = 0.4, b = 0.5;
  const int reps = 4000;
  struct Acc { double occ5 = 0.0, pair = 0.0; };
  Acc acc = parallel_reduce<Acc>(
      reps, 73,
      [&](Rng& rng, Acc& a) {
        const Configuration c = run_with_influx({b, 0}, rho, 60.0, 60, rng);
        const bool o5 = std::binary_search(c.positions.begin(),
                                           c.positions.end(), 5LL);
        const bool o3 = std::binary_search(c.positions.begin(),
                                           c.positions.end(), 3LL);
        const bool o7 = std::binary_search(c.positions.begin(),
                                           c.positions.end(), 7LL);
        a.occ5 += o5 ? 1.0 : 0.0;
        a.pair += (o3 && o7) ? 1.0 : 0.0;
      },
      [](Acc& into, const Acc& from) {
        into.occ5 += from.occ5;
        into.pair += from.pair;
      });
  const double se1 = std::sqrt(rho * (1 - rho) / reps);
  CHECK(std::abs(acc.occ5 / reps - rho) < 4.0 * se1);
  const double p2 = rho * rho;
  CHECK(std::abs(acc.pair / reps - p2) < 4.0 * std::sqrt(p2 * (1 - p2) / reps));
}

TEST_CASE("influx rate formula") {
  // tau = rho (1-rho)^{-1} (1-b)^{-1} = 4/3 at rho=0.4, b=0.5; exercised
  // through the arrival count of a short run.
  const double tau = 0.4 / 0.6 / 0.5;
  CHECK(tau == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("six vertex: b1=1 identity, b1=0 forced push") {
  Rng rng(79);
  Configuration c;
  c.positions = {0, 1, 2, 7};
  Configuration id = c;
  six_vertex_step(id, {1.0, 0.5, 1}, rng);
  CHECK(id.positions == c.positions);

  Configuration push;
  push.positions = {0, 1};
  six_vertex_step(push, {0.0, 0.5, 1}, rng);
  CHECK(push.positions[0] == 1);  // deterministic contact at gap 1
  CHECK(push.positions[1] >= 2);
}

TEST_CASE("six vertex sweep keeps exclusion and moves once per particle") {
  Rng rng(83);
  Configuration c;
  c.positions = {0, 1, 2, 3, 10, 11, 25};
  for (int s = 0; s < 500; ++s) {
    six_vertex_step(c, {0.3, 0.5, 1}, rng);
    REQUIRE(c.ordered());
  }
  CHECK(c.time == 500.0);
}

TEST_CASE("six vertex converges to HL-PushTASEP for one particle (light)") {
  // Y^{1-eps,b}(t/eps) displacement at eps=0.05, t=1 vs the exact
  // compound-binomial law; the acceptance suite runs the eps=0.01 bridge
  // against the compound-Poisson oracle.
  const double eps = 0.05, b = 0.5;
  const int steps = 20;
  const int n = 200000;
  std::map<long long, long long> hist;
  Rng rng(89);
  for (int i = 0; i < n; ++i) {
    Configuration c;
    c.positions = {0};
    for (int s = 0; s < steps; ++s) six_vertex_step(c, {1.0 - eps, b, 1}, rng);
    ++hist[c.positions[0]];
  }
  // Exact law: D = sum of Bin(steps, eps) iid geometric(1-b) jumps.
  std::vector<double> exact(200, 0.0);
  std::vector<double> binom(static_cast<std::size_t>(steps) + 1);
  for (int m = 0; m <= steps; ++m)
    binom[static_cast<std::size_t>(m)] =
        std::exp(std::lgamma(steps + 1.0) - std::lgamma(m + 1.0) -
                 std::lgamma(steps - m + 1.0) +
                 m * std::log(eps) + (steps - m) * std::log1p(-eps));
  for (int m = 0; m <= steps; ++m) {
    if (m == 0) {
      exact[0] += binom[0];
      continue;
    }
    // NB(k; m): C(k-1,m-1)(1-b)^m b^{k-m}
    for (int k = m; k < 190; ++k) {
      const double lnb = std::lgamma(k * 1.0) - std::lgamma(m * 1.0) -
                         std::lgamma(k - m + 1.0) + m * std::log1p(-b) +
                         (k - m) * std::log(b);
      exact[static_cast<std::size_t>(k)] +=
          binom[static_cast<std::size_t>(m)] * std::exp(lnb);
    }
  }
  double tv = 0.0;
  for (int k = 0; k < 190; ++k) {
    const auto it = hist.find(k);
    const double emp =
        it == hist.end() ? 0.0 : static_cast<double>(it->second) / n;
    tv += std::abs(emp - exact[static_cast<std::size_t>(k)]);
  }
  CHECK(tv / 2.0 < 0.02);  // simulator matches its own exact sweep law
}

TEST_CASE("snapshot serialization is valid JSON with the promised fields") {
  Configuration c;
  c.positions = {0, 4, 9};
  c.time = 1.25;
  c.clock_rings = 17;
  const auto parsed = nlohmann::json::parse(snapshot_jsonl(c));
  CHECK(parsed["time"].get<double>() == doctest::Approx(1.25));
  CHECK(parsed["positions"].size() == 3);
  CHECK(parsed["clock_rings"].get<int>() == 17);
}

TEST_CASE("recommended window formula") {
  CHECK(recommended_window(4.0, 1000.0, 0.5) ==
        static_cast<long long>(std::ceil(4000.0 + 10.0 * std::sqrt(4000.0) + 2000.0)));
}

TEST_CASE("ziggurat exponential sampler law") {
  Rng rng(271828);
  const int n = 2000000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = rng.exp1();
    REQUIRE(e >= 0.0);
    sum += e;
    sumsq += e * e;
  }
  const double mean = sum / n, var = sumsq / n - mean * mean;
  CHECK(std::abs(mean - 1.0) < 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(var - 1.0) < 7.0 / std::sqrt(static_cast<double>(n)));
  // KS against the exponential CDF on a fresh, smaller sample
  std::vector<double> xs(20000);
  for (double& x : xs) x = rng.exp1();
  std::sort(xs.begin(), xs.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = 1.0 - std::exp(-xs[i]);
    ks = std::max(ks, std::abs(f - (static_cast<double>(i) + 0.5) /
                                       static_cast<double>(xs.size())));
  }
  CHECK(ks < 1.63 / std::sqrt(static_cast<double>(xs.size())));
}

TEST_CASE("influx snapshots chain like a single run") {
  // Occupation statistics from snapshot runs match the one-shot runner in
  // distribution (same seed gives the same stream up to the pause points).
  const double b = 0.5, rho = 0.4;
  const int reps = 3000;
  double one = 0.0, chained = 0.0;
  for (int r = 0; r < reps; ++r) {
    Rng r1 = replica_rng(616, static_cast<std::uint64_t>(r));
    const Configuration a = run_with_influx({b, 0}, rho, 40.0, 60, r1);
    one += static_cast<double>(height_of(a.positions, 30));
    Rng r2 = replica_rng(617, static_cast<std::uint64_t>(r));
    double h = 0.0;
    run_with_influx_snapshots({b, 0}, rho, {20.0, 40.0}, 60, r2,
                              [&](std::size_t k, const Configuration& cfg) {
                                if (k == 1)
                                  h = static_cast<double>(
                                      height_of(cfg.positions, 30));
                              });
    chained += h;
  }
  // ~12.4 particles below site 30 at stationarity; generous 4-sigma gate
  CHECK(std::abs(one - chained) / reps < 4.0 * 3.5 * std::sqrt(2.0 / reps));
}
