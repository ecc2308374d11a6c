#pragma once
// Counter-based random number generation. SplitMix64 walks a Weyl sequence
// and scrambles each counter value independently, so replica streams derived
// from (master seed, replica index) are reproducible regardless of thread
// scheduling. All samplers are written out explicitly; nothing here depends
// on implementation-defined std::<distribution> behaviour.
//
// Exponential variates come from a 256-layer ziggurat (Marsaglia-Tsang),
// which the event loop leans on: one exponential for the holding time and
// one for the geometric jump length (ceil(E / -log b) is geometric(1-b)).

#include <cmath>
#include <cstdint>

namespace hlpt {

namespace detail {

struct ExpZiggurat {
  // layer edges scaled to the 53-bit mantissa draw
  double w[256];
  double f[256];
  std::uint64_t k[256];
  static constexpr double kTailStart = 7.69711747013104972;

  ExpZiggurat() {
    constexpr double r = kTailStart;
    constexpr double v = 3.949659822581572e-3;  // layer area
    constexpr double two53 = 9007199254740992.0;
    double de = r, te = r;
    const double q = v / std::exp(-de);
    k[0] = static_cast<std::uint64_t>((de / q) * two53);
    k[1] = 0;
    w[0] = q / two53;
    w[255] = de / two53;
    f[0] = 1.0;
    f[255] = std::exp(-de);
    for (int i = 254; i >= 1; --i) {
      de = -std::log(v / de + std::exp(-de));
      k[i + 1] = static_cast<std::uint64_t>((de / te) * two53);
      te = de;
      f[i] = std::exp(-de);
      w[i] = de / two53;
    }
  }
};

inline const ExpZiggurat& exp_tables() {
  static const ExpZiggurat tables;
  return tables;
}

}  // namespace detail

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on (0,1); never returns 0, safe to pass through log().
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Exp(1) via the ziggurat; falls back to the analytic tail beyond 7.697.
  double exp1() {
    const auto& t = detail::exp_tables();
    for (;;) {
      const std::uint64_t bits = next_u64();
      const int i = static_cast<int>(bits & 255);
      const std::uint64_t jz = bits >> 11;
      const double x = static_cast<double>(jz) * t.w[i];
      if (jz < t.k[i]) return x;
      if (i == 0) return detail::ExpZiggurat::kTailStart - std::log(uniform());
      if (t.f[i] + uniform() * (t.f[i - 1] - t.f[i]) < std::exp(-x)) return x;
    }
  }

  double exponential(double rate) { return exp1() / rate; }

  // P(k) = (1-b) b^{k-1}, k >= 1. neg_inv_log_b must equal -1/log(b).
  long long geometric(double neg_inv_log_b) {
    return 1 + static_cast<long long>(exp1() * neg_inv_log_b);
  }

  // Uniform integer in [0, n); Lemire's multiply-shift (n fixed and small
  // relative to 2^64, the modulo bias is < 2^-40 for any n < 2^24).
  std::size_t below(std::size_t n) {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  std::uint64_t state_;
};

// Stream-splitting rule: replica r of master seed s starts at the scrambled
// counter s + (r+1) * odd constant. Streams for distinct replicas are
// disjoint segments of distinct Weyl walks.
inline Rng replica_rng(std::uint64_t master_seed, std::uint64_t replica) {
  std::uint64_t z = master_seed + (replica + 1) * 0xda942042e4dd58b5ULL;
  z = (z ^ (z >> 29)) * 0xff51afd7ed558ccdULL;
  z = (z ^ (z >> 32));
  return Rng(z);
}

}  // namespace hlpt
