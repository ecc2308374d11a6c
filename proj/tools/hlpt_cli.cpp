// Reproducible experiment runner for the HL-PushTASEP suite: simulation,
// distribution tabulation, exact-vs-Monte-Carlo cross-checks, weak-scaling
// diagnostics, and the acceptance suite. Configuration comes from an
// optional JSON file with flag overrides (flags win); every output file
// embeds the resolved configuration and the build version for replay.

#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "hlpt/acceptance.hpp"
#include "hlpt/exact_formulas.hpp"
#include "hlpt/fredholm.hpp"
#include "hlpt/observables.hpp"
#include "hlpt/particle_system.hpp"
#include "hlpt/replica.hpp"
#include "hlpt/she.hpp"
#include "hlpt/version.hpp"

namespace {

using nlohmann::json;

std::string out_path(const std::string& name) {
  if (name.empty()) return name;
  if (name.front() == '/' || name.front() == '.') return name;
  if (const char* dir = std::getenv("HLPT_OUT_DIR"))
    return (std::filesystem::path(dir) / name).string();
  return name;
}

std::string render(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void write_header(std::ostream& os, const json& config) {
  os << "# version: " << hlpt::kVersion << "\n";
  os << "# config: " << config.dump() << "\n";
}

// Applies JSON config defaults to CLI11 options that the user did not set.
void apply_config(CLI::App* cmd, const json& cfg) {
  for (const auto& [key, value] : cfg.items()) {
    CLI::Option* opt = cmd->get_option_no_throw("--" + key);
    if (opt == nullptr || opt->count() > 0) continue;
    std::ostringstream os;
    os.precision(17);
    if (value.is_number()) {
      os << value.get<double>();
    } else if (value.is_boolean()) {
      os << (value.get<bool>() ? "true" : "false");
    } else {
      os << value.get<std::string>();
    }
    opt->add_result(os.str());
    opt->run_callback();
  }
}

struct SimulateArgs {
  double b = 0.5, rho = 1.0, nu = 4.0, t = 100.0;
  std::uint64_t replicas = 100, seed = 1;
  unsigned threads = 0;
  long long window = 0;  // 0: recommended_window
  std::string out = "simulate.csv";
  bool regime_auto = false;
};

int cmd_simulate(const SimulateArgs& a) {
  hlpt::validate(hlpt::ModelParams{a.b, a.seed});
  if (!(a.rho > 0.0 && a.rho <= 1.0)) throw CLI::ValidationError("rho", "rho must lie in (0,1]");
  if (!(a.nu > 0.0 && a.t > 0.0)) throw CLI::ValidationError("nu/t", "nu and t must be positive");

  if (a.regime_auto) {
    const hlpt::ScalingConstants sc = hlpt::classify_regime(a.nu, a.b, a.rho);
    std::cout << "regime: " << hlpt::to_string(sc.regime);
    if (sc.m_nu) std::cout << "  m_nu=" << render(*sc.m_nu);
    if (sc.sigma_nu) std::cout << " sigma_nu=" << render(*sc.sigma_nu);
    if (sc.m_tilde) std::cout << "  m_tilde=" << render(*sc.m_tilde);
    if (sc.sigma_tilde) std::cout << " sigma_tilde=" << render(*sc.sigma_tilde);
    std::cout << "\n";
  }

  const long long window =
      a.window > 0 ? a.window : hlpt::recommended_window(a.nu, a.t, a.b);
  const long long x = static_cast<long long>(a.nu * a.t);
  std::vector<long long> counts(a.replicas);
  std::vector<char> touched(a.replicas, 0);
  hlpt::parallel_for_replicas(
      a.replicas, a.seed,
      [&](std::uint64_t idx, hlpt::Rng& rng) {
        std::vector<long long> init;
        init.reserve(static_cast<std::size_t>(window) + 1);
        for (long long i = 0; i <= window; ++i)
          if (a.rho >= 1.0 || rng.uniform() < a.rho) init.push_back(i);
        const hlpt::WindowResult w =
            hlpt::run_window(std::move(init), a.b, window, a.t, rng);
        counts[idx] = hlpt::height_of(w.live, x);
        touched[idx] = w.boundary_touched ? 1 : 0;
      },
      a.threads);

  const json config = {{"command", "simulate"}, {"b", a.b},      {"rho", a.rho},
                       {"nu", a.nu},            {"t", a.t},      {"window", window},
                       {"replicas", a.replicas}, {"seed", a.seed}};
  std::ofstream os(out_path(a.out));
  write_header(os, config);
  os << "seed,t,x,N_x,boundary_touched\n";
  double sum = 0.0, sumsq = 0.0;
  long long contaminated = 0;
  for (std::uint64_t i = 0; i < a.replicas; ++i) {
    os << i << "," << render(a.t) << "," << x << "," << counts[i] << ","
       << static_cast<int>(touched[i]) << "\n";
    sum += static_cast<double>(counts[i]);
    sumsq += static_cast<double>(counts[i]) * static_cast<double>(counts[i]);
    contaminated += touched[i];
  }
  if (a.replicas > 0) {
    const double mean = sum / static_cast<double>(a.replicas);
    os << "# summary: mean=" << render(mean) << " variance="
       << render(sumsq / static_cast<double>(a.replicas) - mean * mean)
       << " boundary_touched=" << contaminated << "\n";
  }
  std::cout << "wrote " << out_path(a.out) << "\n";
  return 0;
}

struct TabulateArgs {
  std::string dist = "gue";
  double smin = -5.0, smax = 3.0, step = 0.1, delta = 0.3;
  std::string out = "table.csv";
};

int cmd_tabulate(const TabulateArgs& a) {
  if (!(a.step > 0.0) || a.smax < a.smin)
    throw CLI::ValidationError("grid", "need smin <= smax and step > 0");
  hlpt::LimitDist kind;
  if (a.dist == "gue") kind = hlpt::LimitDist::GUE;
  else if (a.dist == "goe2") kind = hlpt::LimitDist::GOE2;
  else if (a.dist == "gauss") kind = hlpt::LimitDist::Gauss;
  else throw CLI::ValidationError("dist", "dist must be gue|goe2|gauss");

  std::vector<double> grid;
  for (double s = a.smin; s <= a.smax + 1e-12; s += a.step) grid.push_back(s);
  const hlpt::DistTable table = hlpt::tabulate_distribution(kind, grid, a.delta);

  const json config = {{"command", "tabulate"}, {"dist", a.dist},
                       {"smin", a.smin},        {"smax", a.smax},
                       {"step", a.step},        {"delta", a.delta}};
  std::ofstream os(out_path(a.out));
  write_header(os, config);
  os << "s,F,certified\n";
  double prev = -1.0;
  bool monotone = true;
  for (std::size_t i = 0; i < table.s.size(); ++i) {
    const bool certified = std::isfinite(table.F[i]);
    os << render(table.s[i]) << "," << render(table.F[i]) << ","
       << (certified ? 1 : 0) << "\n";
    if (certified) {
      if (table.F[i] < prev - 1e-12) monotone = false;
      prev = table.F[i];
    }
  }
  std::cout << "wrote " << out_path(a.out) << "\n";
  if (!monotone) {
    std::cerr << "tabulate: output column is not monotone\n";
    return 2;
  }
  return table.all_certified ? 0 : 1;
}

struct CrosscheckArgs {
  std::string kind = "transition";
  double b = 0.5, rho = 1.0, t = 1.0, eps = 0.01, zeta_exp = -3.0;
  long long x = 5;
  int moment_l = 1;
  std::uint64_t replicas = 1000000, seed = 1;
  unsigned threads = 0;
};

int cmd_crosscheck(const CrosscheckArgs& a) {
  using hlpt::Cplx;
  if (a.kind == "transition") {
    // contour vs compound-Poisson law for a single particle
    double worst = 0.0;
    for (long long k = 0; k <= 25; ++k) {
      const auto tr = hlpt::transition_pmf_contour({0}, {k}, a.t, a.b);
      worst = std::max(worst,
                       std::abs(tr.value - hlpt::single_particle_pmf(a.t, k, a.b)));
    }
    std::cout << "transition: sup gap " << render(worst) << " (tolerance 1e-8)\n";
    return worst < 1e-8 ? 0 : 1;
  }
  if (a.kind == "qlaplace" || a.kind == "moment") {
    const Cplx zeta(-std::pow(a.b, a.zeta_exp), 0.0);
    double exact = 0.0;
    if (a.kind == "qlaplace")
      exact = hlpt::q_laplace_finite_t(a.x, a.t, a.b, a.rho, zeta).value.real();
    else
      exact = hlpt::moment_qL(a.x, a.t, a.b, a.rho, a.moment_l);
    if (a.t == 0.0) {
      // exact-vs-exact branch: closed forms, no Monte Carlo needed
      double closed = 0.0;
      if (a.kind == "qlaplace" && a.rho >= 1.0) {
        closed = (1.0 / hlpt::q_pochhammer_inf(
                            zeta * std::pow(a.b, static_cast<double>(a.x + 1)),
                            a.b))
                     .real();
      } else if (a.kind == "moment") {
        closed = std::pow(1.0 - a.rho + a.rho * std::pow(a.b, a.moment_l),
                          static_cast<double>(a.x + 1));
      } else {
        std::cout << "qlaplace t=0 closed form requires rho=1\n";
        return 1;
      }
      const double gap = std::abs(exact - closed);
      std::cout << a.kind << " t=0: exact " << render(exact) << " closed "
                << render(closed) << " gap " << render(gap) << "\n";
      return gap < 1e-6 ? 0 : 1;
    }
    struct Acc {
      double s = 0, ss = 0;
    };
    Acc acc = hlpt::parallel_reduce<Acc>(
        a.replicas, a.seed,
        [&](hlpt::Rng& rng, Acc& ac) {
          std::vector<long long> init;
          for (long long i = 0; i <= a.x; ++i)
            if (a.rho >= 1.0 || rng.uniform() < a.rho) init.push_back(i);
          const auto w = hlpt::run_window(std::move(init), a.b, a.x, a.t, rng);
          const long long n = hlpt::height_of(w.live, a.x);
          double v;
          if (a.kind == "qlaplace")
            v = 1.0 / hlpt::q_pochhammer_inf(
                          zeta * std::pow(a.b, static_cast<double>(n)), a.b)
                          .real();
          else
            v = std::pow(a.b, static_cast<double>(a.moment_l * n));
          ac.s += v;
          ac.ss += v * v;
        },
        [](Acc& i, const Acc& f) {
          i.s += f.s;
          i.ss += f.ss;
        },
        a.threads);
    const double n = static_cast<double>(a.replicas);
    const double mean = acc.s / n;
    const double se = std::sqrt((acc.ss / n - mean * mean) / n);
    const double dev = (mean - exact) / se;
    std::cout << a.kind << ": exact " << render(exact) << " MC " << render(mean)
              << " +- " << render(se) << " (" << render(dev)
              << " se, gate 3)\n";
    return std::abs(dev) < 3.0 ? 0 : 1;
  }
  if (a.kind == "she-mean") {
    const hlpt::WeakScaling ws = hlpt::WeakScaling::make(a.eps);
    const auto rep = hlpt::she_mean_residual(ws, a.t, a.replicas, a.seed);
    std::cout << "she-mean: max standardized deviation "
              << render(rep.max_std_dev) << " over sites [" << rep.window_lo
              << "," << rep.window_hi << "] (gate 4)\n";
    return rep.max_std_dev <= 4.0 ? 0 : 1;
  }
  throw CLI::ValidationError("kind", "kind must be qlaplace|moment|transition|she-mean");
}

struct SheArgs {
  double eps = 0.01, t = 50.0;
  std::uint64_t replicas = 10000, seed = 1;
  unsigned threads = 0;
  std::string out = "she_field.csv";
};

int cmd_she(const SheArgs& a) {
  const hlpt::WeakScaling ws = hlpt::WeakScaling::make(a.eps);
  const auto rep = hlpt::she_mean_residual(ws, a.t, a.replicas, a.seed);
  const hlpt::LatticeField p = hlpt::heat_kernel_p(ws, a.t);

  const json config = {{"command", "she"},   {"eps", a.eps},
                       {"t", a.t},           {"replicas", a.replicas},
                       {"seed", a.seed},     {"mu_eps", ws.mu_eps},
                       {"b_eps", ws.b_eps}};
  const long long frame_shift =
      static_cast<long long>(std::floor(a.t * ws.frame_speed()));
  std::ofstream os(out_path(a.out));
  write_header(os, config);
  os << "# field: mc mean of Z(t, xi) on frame labels xi; lattice offset "
     << frame_shift << " (absolute site = xi + offset)\n";
  os << "xi,value,predicted,std_err\n";
  for (std::size_t i = 0; i < rep.mc_mean.size(); ++i)
    os << (rep.window_lo - frame_shift + static_cast<long long>(i)) << ","
       << render(rep.mc_mean[i]) << "," << render(rep.predicted[i]) << ","
       << render(rep.std_err[i]) << "\n";
  os << "# heat kernel: eps=" << render(a.eps) << " t=" << render(a.t)
     << " offset=" << render(p.offset) << "\n";
  std::cout << "she: max standardized deviation " << render(rep.max_std_dev)
            << "; wrote " << out_path(a.out) << "\n";
  return rep.max_std_dev <= 4.0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HL-PushTASEP simulator and numerical-analysis suite"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (flags win)")
      ->check(CLI::ExistingFile);

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "height-function replicas");
  simulate->add_option("--b", sim.b);
  simulate->add_option("--rho", sim.rho);
  simulate->add_option("--nu", sim.nu);
  simulate->add_option("--t", sim.t);
  simulate->add_option("--window", sim.window);
  simulate->add_option("--replicas", sim.replicas);
  simulate->add_option("--seed", sim.seed);
  simulate->add_option("--threads", sim.threads);
  simulate->add_option("--out", sim.out);
  simulate->add_flag("--regime-auto", sim.regime_auto,
                     "print the regime classification");

  TabulateArgs tab;
  CLI::App* tabulate = app.add_subcommand("tabulate", "limit distribution tables");
  tabulate->add_option("--dist", tab.dist);
  tabulate->add_option("--smin", tab.smin);
  tabulate->add_option("--smax", tab.smax);
  tabulate->add_option("--step", tab.step);
  tabulate->add_option("--delta", tab.delta);
  tabulate->add_option("--out", tab.out);

  CrosscheckArgs cross;
  CLI::App* crosscheck =
      app.add_subcommand("crosscheck", "exact formulas vs Monte Carlo");
  crosscheck->add_option("--kind", cross.kind);
  crosscheck->add_option("--b", cross.b);
  crosscheck->add_option("--rho", cross.rho);
  crosscheck->add_option("--t", cross.t);
  crosscheck->add_option("--eps", cross.eps);
  crosscheck->add_option("--x", cross.x);
  crosscheck->add_option("--zeta-exp", cross.zeta_exp,
                         "zeta = -b^{zeta_exp}");
  crosscheck->add_option("--moment-l", cross.moment_l);
  crosscheck->add_option("--replicas", cross.replicas);
  crosscheck->add_option("--seed", cross.seed);
  crosscheck->add_option("--threads", cross.threads);

  SheArgs she;
  CLI::App* she_cmd = app.add_subcommand("she", "weak-scaling diagnostics");
  she_cmd->add_option("--eps", she.eps);
  she_cmd->add_option("--t", she.t);
  she_cmd->add_option("--replicas", she.replicas);
  she_cmd->add_option("--seed", she.seed);
  she_cmd->add_option("--threads", she.threads);
  she_cmd->add_option("--out", she.out);

  hlpt::AcceptanceOptions acc;
  CLI::App* validate = app.add_subcommand("validate", "full acceptance suite");
  validate->add_option("--seed", acc.seed);
  validate->add_option("--threads", acc.threads);
  validate->add_option("--only", acc.only);

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      json cfg = json::parse(is);
      for (CLI::App* cmd : {simulate, tabulate, crosscheck, she_cmd, validate})
        if (cmd->parsed()) apply_config(cmd, cfg);
    }
    if (simulate->parsed()) return cmd_simulate(sim);
    if (tabulate->parsed()) return cmd_tabulate(tab);
    if (crosscheck->parsed()) return cmd_crosscheck(cross);
    if (she_cmd->parsed()) return cmd_she(she);
    if (validate->parsed()) {
      const auto results = hlpt::run_acceptance(acc, std::cout);
      int failures = 0;
      for (const auto& r : results)
        if (!r.pass) ++failures;
      return failures;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
