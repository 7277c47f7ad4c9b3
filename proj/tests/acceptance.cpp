// Release gate for the precoder library: every check below must print PASS.
// Each criterion exercises a complete user-visible contract (budget
// arithmetic, closed-form totals, constructive achievability, empirical rate
// slopes, decomposition identities, alignment projection, Monte Carlo
// comparisons against the reference schemes, and CSI-error robustness) and
// reports one line with its wall-clock time. The process exit code is the
// number of failed criteria.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdsec/baselines.hpp"
#include "fdsec/channel.hpp"
#include "fdsec/linalg.hpp"
#include "fdsec/precoder.hpp"
#include "fdsec/rates.hpp"
#include "fdsec/rng.hpp"
#include "fdsec/sim.hpp"

namespace {

using fdsec::ChannelSet;
using fdsec::CMatrix;
using fdsec::ExperimentSpec;
using fdsec::NetworkConfig;
using fdsec::PrecoderPair;
using fdsec::SDoFPair;
using fdsec::SubsetBudget;
using fdsec::SubsetId;
using fdsec::SweepAxis;

NetworkConfig make_config(int na_t, int na_r, int nb_t, int nb_r, int ne) {
  NetworkConfig cfg;
  cfg.na_t = na_t;
  cfg.na_r = na_r;
  cfg.nb_t = nb_t;
  cfg.nb_r = nb_r;
  cfg.ne = ne;
  return cfg;
}

std::string config_str(const NetworkConfig& c) {
  std::ostringstream os;
  os << '(' << c.na_t << ',' << c.na_r << ',' << c.nb_t << ',' << c.nb_r << ';' << c.ne << ')';
  return os.str();
}

// --- Monte Carlo CSV access -------------------------------------------------

struct SweepRow {
  std::string scheme;
  double value = 0.0;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double mean_sum = 0.0;
};

std::vector<SweepRow> parse_sweep(const std::string& csv) {
  std::vector<SweepRow> rows;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    SweepRow row;
    row.scheme = fields[0];
    row.value = std::stod(fields[2]);
    row.mean_a = std::stod(fields[5]);
    row.mean_b = std::stod(fields[6]);
    row.mean_sum = std::stod(fields[7]);
    rows.push_back(row);
  }
  return rows;
}

double sweep_mean(const std::vector<SweepRow>& rows, const std::string& scheme, double value) {
  for (const SweepRow& row : rows) {
    if (row.scheme == scheme && std::abs(row.value - value) < 1e-9) return row.mean_sum;
  }
  throw std::runtime_error("missing sweep row " + scheme + " @ " + std::to_string(value));
}

// --- criteria ----------------------------------------------------------------

bool check_budgets(std::string& detail) {
  struct Row {
    NetworkConfig cfg;
    std::array<int, 8> d;
    int total;
  };
  const std::vector<Row> rows = {
      {make_config(5, 2, 4, 3, 5), {0, 0, 0, 0, 0, 1, 2, 1}, 3},
      {make_config(4, 6, 8, 2, 5), {0, 0, 1, 2, 0, 4, 0, 0}, 5},
      {make_config(7, 4, 7, 4, 2), {1, 4, 1, 4, 2, 0, 0, 0}, 7},
  };
  bool ok = true;
  int idx = 0;
  for (const Row& row : rows) {
    const ChannelSet ch = fdsec::gen_rayleigh(row.cfg, 1000 + idx++);
    const SubsetBudget budget = fdsec::subset_budgets(ch);
    for (int i = 0; i < 8; ++i) {
      if (budget.d[i] != row.d[i]) {
        detail += config_str(row.cfg) + " family " + std::to_string(i) + ": got " +
                  std::to_string(budget.d[i]) + " want " + std::to_string(row.d[i]) + "; ";
        ok = false;
      }
    }
    const SDoFPair closed = fdsec::sum_sdof_closed_form(budget, row.cfg);
    if (closed.sum() != row.total) {
      detail += config_str(row.cfg) + " total: got " + std::to_string(closed.sum()) +
                " want " + std::to_string(row.total) + "; ";
      ok = false;
    }
  }
  return ok;
}

bool check_reference_pairs(std::string& detail) {
  bool ok = true;
  const auto expect_pair = [&](const NetworkConfig& cfg, bool constrained, SDoFPair want,
                               std::uint64_t seed) {
    const ChannelSet ch = fdsec::gen_rayleigh(cfg, seed);
    const PrecoderPair pair = fdsec::construct_precoders(ch, cfg, constrained, seed + 1);
    const SDoFPair got = fdsec::achieved_sdof(ch, pair);
    if (!(got == want)) {
      detail += config_str(cfg) + (constrained ? " capped" : "") + ": got (" +
                std::to_string(got.ds_a) + "," + std::to_string(got.ds_b) + ") want (" +
                std::to_string(want.ds_a) + "," + std::to_string(want.ds_b) + "); ";
      ok = false;
    }
  };

  const NetworkConfig base = make_config(3, 2, 3, 2, 5);
  expect_pair(base, false, {1, 1}, 2000);

  const NetworkConfig oneway = fdsec::oneway_config(base);
  const ChannelSet ch_ow = fdsec::gen_rayleigh(oneway, 2010);
  const SDoFPair ow =
      fdsec::achieved_sdof(ch_ow, fdsec::construct_precoders(ch_ow, oneway, false, 2011));
  if (ow.sum() != 1) {
    detail += "reshaped one-way total: got " + std::to_string(ow.sum()) + " want 1; ";
    ok = false;
  }

  expect_pair(make_config(4, 3, 5, 2, 5), false, {1, 2}, 2020);
  expect_pair(make_config(4, 3, 5, 2, 5), true, {1, 1}, 2020);
  expect_pair(make_config(4, 3, 4, 3, 4), false, {2, 2}, 2030);
  return ok;
}

bool check_construction_agreement(std::string& detail) {
  fdsec::Rng rng(3000);
  const auto draw = [&rng] { return 1 + static_cast<int>(rng.uniform() * 6); };
  int agreed = 0;
  const int trials = 500;
  for (int t = 0; t < trials; ++t) {
    const NetworkConfig cfg = make_config(draw(), draw(), draw(), draw(), draw());
    const ChannelSet ch = fdsec::gen_rayleigh(cfg, 3100 + t);
    try {
      const PrecoderPair pair = fdsec::construct_precoders(ch, cfg, false, 3200 + t);
      const SDoFPair closed = fdsec::sum_sdof_closed_form(fdsec::subset_budgets(ch), cfg);
      if (fdsec::achieved_sdof(ch, pair) == closed) {
        ++agreed;
      } else {
        detail += "mismatch at " + config_str(cfg) + "; ";
      }
    } catch (const std::exception& e) {
      detail += config_str(cfg) + " threw: " + e.what() + "; ";
    }
  }
  detail += std::to_string(agreed) + "/" + std::to_string(trials) + " agree";
  return agreed == trials;
}

bool check_empirical_slopes(std::string& detail) {
  struct Row {
    NetworkConfig cfg;
    int total;
  };
  const std::vector<Row> rows = {
      {make_config(5, 2, 4, 3, 5), 3},
      {make_config(4, 6, 8, 2, 5), 5},
      {make_config(7, 4, 7, 4, 2), 7},
      {make_config(3, 2, 3, 2, 5), 2},
  };
  const std::vector<double> grid = {60, 70, 80, 90, 100, 110, 120};
  bool ok = true;
  int idx = 0;
  for (const Row& row : rows) {
    const ChannelSet ch = fdsec::gen_rayleigh(row.cfg, 4000 + idx++);
    const auto builder = [&](double watts) {
      PrecoderPair pair = fdsec::construct_precoders(ch, row.cfg, false, 4100);
      fdsec::normalize_pair_power(pair, watts);
      return pair;
    };
    const fdsec::SDoFPair closed =
        fdsec::sum_sdof_closed_form(fdsec::subset_budgets(ch), row.cfg);
    const fdsec::SlopePair slope = fdsec::empirical_sdof(ch, builder, grid, 1.0);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%s slopes (%.3f,%.3f) (want (%d,%d)); ",
                  config_str(row.cfg).c_str(), slope.slope_a, slope.slope_b, closed.ds_a,
                  closed.ds_b);
    detail += buf;
    if (closed.sum() != row.total || std::abs(slope.slope_a - closed.ds_a) > 0.15 ||
        std::abs(slope.slope_b - closed.ds_b) > 0.15) {
      ok = false;
    }
  }
  return ok;
}

bool check_decomposition(std::string& detail) {
  fdsec::Rng rng(5000);
  const auto draw = [&rng] { return 1 + static_cast<int>(rng.uniform() * 8); };
  const int trials = 1000;
  int bad = 0;
  double worst_residual = 0.0;
  double worst_lambda = 0.0;
  for (int t = 0; t < trials; ++t) {
    const int n = draw(), m = draw(), k = draw();
    CMatrix a(n, m), b(n, k);
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = rng.cgaussian();
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = rng.cgaussian();

    const fdsec::GsvdResult g = fdsec::gsvd(a, b);

    const int want_k = std::min(m + k, n);
    const int want_p = want_k - std::min(m, n);
    const int want_r = want_k - std::min(k, n);
    const int want_s = std::min(m, n) + std::min(k, n) - want_k;
    if (g.dims.k != want_k || g.dims.p != want_p || g.dims.r != want_r || g.dims.s != want_s) {
      ++bad;
      continue;
    }

    CMatrix expect_a = CMatrix::Zero(n, m);
    expect_a.middleCols(m - g.dims.s - g.dims.r, g.dims.s) =
        g.x2() * g.lambda1.cast<std::complex<double>>().asDiagonal();
    expect_a.rightCols(g.dims.r) = g.x.rightCols(g.dims.r);
    CMatrix expect_b = CMatrix::Zero(n, k);
    expect_b.leftCols(g.dims.p) = g.x.leftCols(g.dims.p);
    expect_b.middleCols(g.dims.p, g.dims.s) =
        g.x2() * g.lambda2.cast<std::complex<double>>().asDiagonal();

    const double res_a = (a * g.psi1 - expect_a).norm() / std::max(1.0, a.norm());
    const double res_b = (b * g.psi2 - expect_b).norm() / std::max(1.0, b.norm());
    worst_residual = std::max({worst_residual, res_a, res_b});

    for (int i = 0; i < g.dims.s; ++i) {
      worst_lambda = std::max(
          worst_lambda,
          std::abs(g.lambda1(i) * g.lambda1(i) + g.lambda2(i) * g.lambda2(i) - 1.0));
    }
    if (res_a > 1e-10 || res_b > 1e-10) ++bad;
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max residual %.2e, max weight error %.2e, %d/%d bad",
                worst_residual, worst_lambda, bad, trials);
  detail += buf;
  return bad == 0 && worst_lambda <= 1e-10;
}

bool check_alignment(std::string& detail) {
  bool ok = true;

  // Constructed pairs land exactly on the aligned set.
  fdsec::Rng cfg_rng(6000);
  double worst = 0.0;
  for (int t = 0; t < 40; ++t) {
    const NetworkConfig cfg = make_config(
        1 + static_cast<int>(cfg_rng.uniform() * 6), 1 + static_cast<int>(cfg_rng.uniform() * 6),
        1 + static_cast<int>(cfg_rng.uniform() * 6), 1 + static_cast<int>(cfg_rng.uniform() * 6),
        1 + static_cast<int>(cfg_rng.uniform() * 6));
    const ChannelSet ch = fdsec::gen_rayleigh(cfg, 6100 + t);
    const PrecoderPair pair = fdsec::construct_precoders(ch, cfg, false, 6200 + t);
    worst = std::max(worst, fdsec::alignment_residual(ch, pair));
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "constructed residual %.2e; ", worst);
  detail += buf;
  if (worst > 1e-9) ok = false;

  // Projecting arbitrary pairs never loses a signed subspace component.
  fdsec::Rng rng(6500);
  int kept = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    const NetworkConfig cfg = make_config(
        1 + static_cast<int>(rng.uniform() * 5), 1 + static_cast<int>(rng.uniform() * 4),
        1 + static_cast<int>(rng.uniform() * 5), 1 + static_cast<int>(rng.uniform() * 4),
        1 + static_cast<int>(rng.uniform() * 5));
    const ChannelSet ch = fdsec::gen_rayleigh(cfg, 6600 + t);
    const int cols = 1 + static_cast<int>(rng.uniform() * 4);
    PrecoderPair raw;
    raw.v_a = CMatrix(cfg.na_t, cols);
    raw.v_b = CMatrix(cfg.nb_t, cols);
    for (Eigen::Index i = 0; i < raw.v_a.size(); ++i) raw.v_a(i) = rng.cgaussian();
    for (Eigen::Index i = 0; i < raw.v_b.size(); ++i) raw.v_b(i) = rng.cgaussian();
    raw.power = 1e-3;

    const SDoFPair before = fdsec::lemma1_sdof(ch, raw);
    const PrecoderPair aligned = fdsec::align_project(ch, raw);
    const SDoFPair after = fdsec::lemma1_sdof(ch, aligned);
    const bool good = after.ds_a >= before.ds_a && after.ds_b >= before.ds_b &&
                      fdsec::alignment_residual(ch, aligned) <= 1e-9;
    if (good) {
      ++kept;
    } else {
      detail += "drop at " + config_str(cfg) + "; ";
    }
  }
  detail += std::to_string(kept) + "/" + std::to_string(trials) + " projections kept";
  return ok && kept == trials;
}

bool check_monte_carlo(std::string& detail) {
  bool ok = true;
  char buf[160];

  // (a) Eavesdropper proximity sweep on a wide link: the aligned scheme is
  // insensitive, the references collapse when the eavesdropper moves close.
  ExperimentSpec near_far;
  near_far.config = make_config(3, 2, 3, 2, 5);
  near_far.geometry.alice_pos = {-10.0, 0.0};
  near_far.geometry.bob_pos = {10.0, 0.0};
  near_far.geometry.eve_pos = {0.0, 0.0};
  near_far.axis = SweepAxis::kY;
  near_far.start = 0.5;
  near_far.stop = 20.0;
  near_far.step = 19.5;
  near_far.runs = 500;
  near_far.schemes = {"proposed", "mf", "zf"};
  near_far.seed = 7001;
  const std::vector<SweepRow> rows = parse_sweep(fdsec::run_sweep(near_far));
  const double p_near = sweep_mean(rows, "proposed", 0.5);
  const double p_far = sweep_mean(rows, "proposed", 20.0);
  const double mf_near = sweep_mean(rows, "mf", 0.5);
  const double mf_far = sweep_mean(rows, "mf", 20.0);
  const double zf_near = sweep_mean(rows, "zf", 0.5);
  const double zf_far = sweep_mean(rows, "zf", 20.0);
  std::snprintf(buf, sizeof(buf), "near/far: proposed %.3f/%.3f, mf %.3f/%.3f, zf %.3f/%.3f; ",
                p_near, p_far, mf_near, mf_far, zf_near, zf_far);
  detail += buf;
  if (std::abs(p_near - p_far) > 0.15 * p_far) ok = false;
  if (!(mf_near < 0.25 * mf_far)) ok = false;
  if (!(zf_near < 0.25 * zf_far)) ok = false;

  // (b) Default geometry: the aligned scheme beats both references.
  ExperimentSpec mid;
  mid.config = make_config(3, 2, 3, 2, 5);
  mid.runs = 500;
  mid.schemes = {"proposed", "mf", "zf"};
  mid.seed = 7002;
  const std::vector<SweepRow> mid_rows = parse_sweep(fdsec::run_sweep(mid));
  const double p_mid = sweep_mean(mid_rows, "proposed", 0.0);
  const double mf_mid = sweep_mean(mid_rows, "mf", 0.0);
  const double zf_mid = sweep_mean(mid_rows, "zf", 0.0);
  std::snprintf(buf, sizeof(buf), "midpoint: proposed %.3f vs mf %.3f, zf %.3f; ", p_mid,
                mf_mid, zf_mid);
  detail += buf;
  if (!(p_mid > mf_mid && p_mid > zf_mid)) ok = false;

  // (c) Residual self-interference barely dents the aligned scheme.
  ExperimentSpec with_si = mid;
  with_si.schemes = {"proposed"};
  with_si.seed = 7003;
  with_si.config.rho = 1.0;
  ExperimentSpec no_si = with_si;
  no_si.config.rho = 0.0;
  const double rho1 = parse_sweep(fdsec::run_sweep(with_si))[0].mean_sum;
  const double rho0 = parse_sweep(fdsec::run_sweep(no_si))[0].mean_sum;
  std::snprintf(buf, sizeof(buf), "rho 1 vs 0: %.3f/%.3f", rho1, rho0);
  detail += buf;
  if (!(rho1 >= 0.8 * rho0)) ok = false;

  return ok;
}

bool check_csi_error(std::string& detail) {
  bool ok = true;
  char buf[64];

  // Growing eavesdropper-CSI error never helps (up to Monte Carlo noise).
  ExperimentSpec sweep;
  sweep.config = make_config(3, 2, 3, 2, 5);
  sweep.axis = SweepAxis::kAlpha;
  sweep.alpha_axis = "g";
  sweep.start = 0.0;
  sweep.stop = 1.0;
  sweep.step = 0.2;
  sweep.runs = 500;
  sweep.schemes = {"proposed"};
  sweep.seed = 8001;
  const std::vector<SweepRow> rows = parse_sweep(fdsec::run_sweep(sweep));
  detail += "means:";
  for (const SweepRow& row : rows) {
    std::snprintf(buf, sizeof(buf), " %.3f", row.mean_sum);
    detail += buf;
  }
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    if (rows[i + 1].mean_sum > rows[i].mean_sum * 1.02) {
      detail += " (rise at step " + std::to_string(i + 1) + ")";
      ok = false;
    }
  }

  // The variant that never reads the node links cannot react to their error.
  ExperimentSpec blind = sweep;
  blind.alpha_axis = "h";
  blind.schemes = {"proposed-hblind"};
  blind.seed = 8002;
  const std::vector<SweepRow> blind_rows = parse_sweep(fdsec::run_sweep(blind));
  double lo = blind_rows[0].mean_sum, hi = blind_rows[0].mean_sum;
  for (const SweepRow& row : blind_rows) {
    lo = std::min(lo, row.mean_sum);
    hi = std::max(hi, row.mean_sum);
  }
  std::snprintf(buf, sizeof(buf), "; blind spread %.4f..%.4f", lo, hi);
  detail += buf;
  if (hi > lo * 1.03) ok = false;

  return ok;
}

}  // namespace

int main() {
  struct Criterion {
    const char* title;
    double time_limit_s;  // 0 = no limit
    std::function<bool(std::string&)> run;
  };
  const std::vector<Criterion> criteria = {
      {"per-family budgets and closed-form totals on the reference networks", 1.0,
       check_budgets},
      {"constructed pairs on the small reference networks", 0.0, check_reference_pairs},
      {"construction agrees with the closed form on 500 random networks", 120.0,
       check_construction_agreement},
      {"empirical secrecy-rate slopes match the closed-form pairs", 30.0,
       check_empirical_slopes},
      {"joint decomposition identities on 1000 random matrix pairs", 0.0,
       check_decomposition},
      {"alignment residuals and the alignment projection", 0.0, check_alignment},
      {"Monte Carlo comparison against the reference schemes", 300.0, check_monte_carlo},
      {"CSI error sweeps", 0.0, check_csi_error},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = criteria[i].run(detail);
    } catch (const std::exception& e) {
      detail += std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (criteria[i].time_limit_s > 0.0 && secs > criteria[i].time_limit_s) {
      detail += " [over the " + std::to_string(criteria[i].time_limit_s) + " s limit]";
      ok = false;
    }
    if (!ok) ++failures;
    std::printf("[%s] criterion %zu: %s (%.2f s)%s%s\n", ok ? "PASS" : "FAIL", i + 1,
                criteria[i].title, secs, detail.empty() ? "" : " - ", detail.c_str());
  }
  if (failures == 0) {
    std::printf("all %zu criteria passed\n", criteria.size());
  } else {
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  }
  return failures;
}
