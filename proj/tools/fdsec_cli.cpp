#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fdsec/baselines.hpp"
#include "fdsec/channel.hpp"
#include "fdsec/errors.hpp"
#include "fdsec/linalg.hpp"
#include "fdsec/precoder.hpp"
#include "fdsec/rates.hpp"
#include "fdsec/rng.hpp"
#include "fdsec/sim.hpp"

namespace {

struct ConfigFlags {
  int na_t = 3, na_r = 2, nb_t = 3, nb_r = 2, ne = 5;
  double rho = 1.0, power_dbm = 0.0, noise_dbm = -60.0;
  std::string config_file;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--na-t", na_t, "Transmit antennas at node A");
    cmd->add_option("--na-r", na_r, "Receive antennas at node A");
    cmd->add_option("--nb-t", nb_t, "Transmit antennas at node B");
    cmd->add_option("--nb-r", nb_r, "Receive antennas at node B");
    cmd->add_option("--ne", ne, "Eavesdropper antennas");
    cmd->add_option("--rho", rho, "Residual self-interference factor in [0,1]");
    cmd->add_option("--power-dbm", power_dbm, "Transmit power budget (dBm)");
    cmd->add_option("--noise-dbm", noise_dbm, "Receiver noise power (dBm)");
    cmd->add_option("--config", config_file, "JSON file overriding the antenna flags");
  }

  fdsec::NetworkConfig build() const {
    if (!config_file.empty()) {
      return fdsec::parse_network_config(read_file(config_file));
    }
    fdsec::NetworkConfig cfg;
    cfg.na_t = na_t;
    cfg.na_r = na_r;
    cfg.nb_t = nb_t;
    cfg.nb_r = nb_r;
    cfg.ne = ne;
    cfg.rho = rho;
    cfg.power_dbm = power_dbm;
    cfg.noise_dbm = noise_dbm;
    cfg.validate();
    return cfg;
  }

  static std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw fdsec::ConfigError("cannot read file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }
};

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw fdsec::ConfigError("cannot write file '" + out_path + "'");
  out << text;
}

int run_sdof(const ConfigFlags& flags, const std::string& out_path) {
  write_output(fdsec::sdof_table({flags.build()}), out_path);
  return 0;
}

int run_sweep_cmd(const std::string& spec_path, const std::string& out_path, int runs_override,
                  bool seed_given, std::uint64_t seed) {
  fdsec::ExperimentSpec spec = fdsec::parse_experiment_spec(ConfigFlags::read_file(spec_path));
  if (runs_override > 0) spec.runs = runs_override;
  if (seed_given) spec.seed = seed;
  write_output(fdsec::run_sweep(spec), out_path);
  return 0;
}

int run_slope(const ConfigFlags& flags, double p_start, double p_stop, int points,
              std::uint64_t seed) {
  if (points < 2) throw fdsec::ConfigError("--points must be at least 2");
  if (p_stop <= p_start) throw fdsec::ConfigError("--p-stop must exceed --p-start");
  const fdsec::NetworkConfig cfg = flags.build();
  const fdsec::ChannelSet ch = fdsec::gen_rayleigh(cfg, seed);

  std::vector<double> grid;
  for (int i = 0; i < points; ++i) {
    grid.push_back(p_start + (p_stop - p_start) * i / (points - 1));
  }
  const auto builder = [&](double watts) {
    fdsec::NetworkConfig at_power = cfg;
    at_power.power_dbm = 10.0 * std::log10(watts) + 30.0;
    return fdsec::construct_precoders(ch, at_power, false, seed);
  };
  const fdsec::SlopePair slope = fdsec::empirical_sdof(ch, builder, grid, cfg.rho);
  const fdsec::SDoFPair closed =
      fdsec::sum_sdof_closed_form(fdsec::subset_budgets(ch), cfg);

  std::cout << "closed_a=" << closed.ds_a << " closed_b=" << closed.ds_b
            << " closed_total=" << closed.sum() << " slope_a=" << slope.slope_a
            << " slope_b=" << slope.slope_b << " slope_total=" << slope.sum() << "\n";
  return 0;
}

int run_gsvd_check(int trials, int max_dim, std::uint64_t seed) {
  if (trials < 1) throw fdsec::ConfigError("--trials must be at least 1");
  if (max_dim < 1 || max_dim > 64) throw fdsec::ConfigError("--max-dim must lie in [1, 64]");
  fdsec::Rng rng(seed);
  double worst_recon = 0.0, worst_lambda = 0.0;
  int dim_failures = 0;

  for (int t = 0; t < trials; ++t) {
    const int n = 1 + static_cast<int>(rng.uniform() * max_dim);
    const int m = 1 + static_cast<int>(rng.uniform() * max_dim);
    const int k = 1 + static_cast<int>(rng.uniform() * max_dim);
    fdsec::CMatrix a(n, m), b(n, k);
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = rng.cgaussian();
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = rng.cgaussian();

    const fdsec::GsvdResult g = fdsec::gsvd(a, b);
    const auto& d = g.dims;

    fdsec::CMatrix ra(n, m), rb(n, k);
    ra.setZero();
    rb.setZero();
    ra.middleCols(m - d.s - d.r, d.s) =
        g.x2() * g.lambda1.cast<std::complex<double>>().asDiagonal();
    ra.rightCols(d.r) = g.x.rightCols(d.r);
    rb.leftCols(d.p) = g.x.leftCols(d.p);
    rb.middleCols(d.p, d.s) = g.x2() * g.lambda2.cast<std::complex<double>>().asDiagonal();

    const double denom = std::max(1.0, std::max(a.norm(), b.norm()));
    const double recon =
        std::max((a * g.psi1 - ra).norm(), (b * g.psi2 - rb).norm()) / denom;
    worst_recon = std::max(worst_recon, recon);
    for (int i = 0; i < d.s; ++i) {
      worst_lambda = std::max(worst_lambda, std::abs(g.lambda1(i) * g.lambda1(i) +
                                                     g.lambda2(i) * g.lambda2(i) - 1.0));
    }

    const int exp_k = std::min(m + k, n);
    const int exp_p = exp_k - std::min(m, n);
    const int exp_r = exp_k - std::min(k, n);
    const int exp_s = std::min(m, n) + std::min(k, n) - exp_k;
    if (d.k != exp_k || d.p != exp_p || d.r != exp_r || d.s != std::max(exp_s, 0)) {
      ++dim_failures;
    }
  }

  const bool ok = worst_recon <= 1e-10 && worst_lambda <= 1e-10 && dim_failures == 0;
  std::cout << "trials=" << trials << " max_rel_residual=" << worst_recon
            << " max_lambda_err=" << worst_lambda << " dim_failures=" << dim_failures << " "
            << (ok ? "ok" : "FAIL") << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secrecy-degrees-of-freedom precoder toolkit for full-duplex MIMO links"};
  app.require_subcommand(1);
  app.fallthrough();  // lets --seed appear after the subcommand name too

  std::uint64_t seed = 1;
  app.add_option("--seed", seed, "Base RNG seed")->envname("FDW_SEED");

  std::string out_path;

  CLI::App* sdof = app.add_subcommand("sdof", "Print budgets, selection and closed form");
  ConfigFlags sdof_flags;
  sdof_flags.add_to(sdof);
  sdof->add_option("--out", out_path, "Output file (default: stdout)");

  CLI::App* sweep = app.add_subcommand("sweep", "Run a Monte Carlo sweep from a JSON spec");
  std::string spec_path;
  int runs_override = 0;
  sweep->add_option("--spec", spec_path, "Experiment spec JSON file")->required();
  sweep->add_option("--out", out_path, "Output CSV file (default: stdout)");
  sweep->add_option("--runs", runs_override, "Override the run count in the spec");

  CLI::App* slope = app.add_subcommand("slope", "Fit the empirical secrecy slope");
  ConfigFlags slope_flags;
  slope_flags.add_to(slope);
  double p_start = 60.0, p_stop = 120.0;
  int points = 7;
  slope->add_option("--p-start", p_start, "Grid start (dBm)");
  slope->add_option("--p-stop", p_stop, "Grid stop (dBm)");
  slope->add_option("--points", points, "Grid size");

  CLI::App* gsvd_check = app.add_subcommand("gsvd-check", "Self-test the joint factorization");
  int trials = 200, max_dim = 8;
  gsvd_check->add_option("--trials", trials, "Number of random trials");
  gsvd_check->add_option("--max-dim", max_dim, "Largest random dimension");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const bool seed_given = app.count("--seed") > 0;
    if (sdof->parsed()) return run_sdof(sdof_flags, out_path);
    if (sweep->parsed()) return run_sweep_cmd(spec_path, out_path, runs_override, seed_given, seed);
    if (slope->parsed()) return run_slope(slope_flags, p_start, p_stop, points, seed);
    if (gsvd_check->parsed()) return run_gsvd_check(trials, max_dim, seed);
    return 2;
  } catch (const fdsec::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
