#include "fdsec/sim.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "fdsec/baselines.hpp"
#include "fdsec/errors.hpp"
#include "fdsec/precoder.hpp"
#include "fdsec/rates.hpp"
#include "fdsec/rng.hpp"
#include "json_support.hpp"

namespace fdsec {
namespace {

using nlohmann::json;

// Sub-seed tags so the per-run draws of the channels and of the two CSI error
// processes stay independent streams.
constexpr std::uint64_t kEveCsiTag = 101;
constexpr std::uint64_t kNodeCsiTag = 102;

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

NetworkConfig default_sim_config() {
  NetworkConfig cfg;
  cfg.na_t = 3;
  cfg.na_r = 2;
  cfg.nb_t = 3;
  cfg.nb_r = 2;
  cfg.ne = 5;
  return cfg;
}

Vec2 parse_vec2(const json& node, const char* name) {
  if (!node.is_array() || node.size() != 2 || !node[0].is_number() || !node[1].is_number()) {
    throw ConfigError(std::string(name) + " must be a [x, y] number array");
  }
  return {node[0].get<double>(), node[1].get<double>()};
}

const char* axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kX:
      return "x";
    case SweepAxis::kY:
      return "y";
    case SweepAxis::kAlpha:
      return "alpha";
    default:
      return "none";
  }
}

SweepAxis axis_from_name(const std::string& name) {
  if (name == "x") return SweepAxis::kX;
  if (name == "y") return SweepAxis::kY;
  if (name == "alpha") return SweepAxis::kAlpha;
  if (name == "none") return SweepAxis::kNone;
  throw ConfigError("unknown axis '" + name + "' (expected none, x, y or alpha)");
}

void validate_spec(const ExperimentSpec& spec) {
  spec.config.validate();
  if (spec.runs < 1) throw ConfigError("runs must be at least 1");
  if (spec.schemes.empty()) throw ConfigError("schemes must not be empty");
  for (const auto& s : spec.schemes) {
    if (!known_scheme(s)) throw ConfigError("unknown scheme '" + s + "'");
  }
  if (spec.axis != SweepAxis::kNone) {
    if (spec.step <= 0.0) throw ConfigError("step must be positive");
    if (spec.stop < spec.start) throw ConfigError("stop must not be below start");
  }
  if (spec.csi_alpha_g < 0.0 || spec.csi_alpha_g > 1.0 || spec.csi_alpha_h < 0.0 ||
      spec.csi_alpha_h > 1.0) {
    throw ConfigError("csi_alpha values must lie in [0, 1]");
  }
  if (spec.alpha_axis != "g" && spec.alpha_axis != "h") {
    throw ConfigError("alpha_axis must be 'g' or 'h'");
  }
  if (spec.geometry.path_loss_exp <= 0.0) throw ConfigError("path_loss_exp must be positive");
}

std::vector<double> sweep_values(const ExperimentSpec& spec) {
  if (spec.axis == SweepAxis::kNone) return {0.0};
  std::vector<double> values;
  for (double v = spec.start; v <= spec.stop + 1e-9; v += spec.step) values.push_back(v);
  if (values.empty()) values.push_back(spec.start);
  return values;
}

PrecoderPair build_scheme_pair(const std::string& scheme, const ChannelSet& est,
                               const NetworkConfig& cfg, std::uint64_t run_seed) {
  if (scheme == "proposed") return construct_precoders(est, cfg, false, run_seed);
  if (scheme == "proposed-constrained") return construct_precoders(est, cfg, true, run_seed);
  if (scheme == "proposed-hblind") return construct_precoders(est, cfg, false, run_seed, true);
  if (scheme == "oneway") return construct_precoders(est, cfg, false, run_seed);
  if (scheme == "mf") return mf_precoders(est, cfg.power_watts());
  if (scheme == "zf") return zf_precoders(est, cfg.power_watts()).pair;
  throw ConfigError("unknown scheme '" + scheme + "'");
}

}  // namespace

bool known_scheme(const std::string& name) {
  return name == "proposed" || name == "proposed-constrained" || name == "proposed-hblind" ||
         name == "mf" || name == "zf" || name == "oneway";
}

ExperimentSpec parse_experiment_spec(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("experiment spec must be a JSON object");

  ExperimentSpec spec;
  spec.config = default_sim_config();
  try {
    if (doc.contains("config")) spec.config = network_config_from_json(doc["config"]);
    if (doc.contains("geometry")) {
      const json& g = doc["geometry"];
      if (!g.is_object()) throw ConfigError("geometry must be a JSON object");
      if (g.contains("alice")) spec.geometry.alice_pos = parse_vec2(g["alice"], "alice");
      if (g.contains("bob")) spec.geometry.bob_pos = parse_vec2(g["bob"], "bob");
      if (g.contains("eve")) spec.geometry.eve_pos = parse_vec2(g["eve"], "eve");
      spec.geometry.path_loss_exp = g.value("path_loss_exp", spec.geometry.path_loss_exp);
    }
    spec.axis = axis_from_name(doc.value("axis", std::string("none")));
    spec.start = doc.value("start", spec.start);
    spec.stop = doc.value("stop", spec.stop);
    spec.step = doc.value("step", spec.step);
    spec.runs = doc.value("runs", spec.runs);
    if (doc.contains("schemes")) {
      spec.schemes = doc["schemes"].get<std::vector<std::string>>();
    }
    spec.seed = doc.value("seed", spec.seed);
    spec.csi_alpha_g = doc.value("csi_alpha_g", spec.csi_alpha_g);
    spec.csi_alpha_h = doc.value("csi_alpha_h", spec.csi_alpha_h);
    spec.alpha_axis = doc.value("alpha_axis", spec.alpha_axis);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad experiment spec field: ") + e.what());
  }
  validate_spec(spec);
  return spec;
}

std::string run_sweep(const ExperimentSpec& spec) {
  validate_spec(spec);
  const std::vector<double> values = sweep_values(spec);

  std::string out = "scheme,axis,value,rho,alpha,mean_rs_a,mean_rs_b,mean_rs_sum,runs,seed\n";
  for (const std::string& scheme : spec.schemes) {
    NetworkConfig cfg = spec.config;
    if (scheme == "oneway") cfg = oneway_config(cfg);

    for (const double value : values) {
      Geometry geom = spec.geometry;
      double alpha_g = spec.csi_alpha_g;
      double alpha_h = spec.csi_alpha_h;
      switch (spec.axis) {
        case SweepAxis::kX:
          geom.eve_pos.x = value;
          break;
        case SweepAxis::kY:
          geom.eve_pos.y = value;
          break;
        case SweepAxis::kAlpha:
          if (value < 0.0 || value > 1.0) throw ConfigError("alpha sweep left [0, 1]");
          (spec.alpha_axis == "g" ? alpha_g : alpha_h) = value;
          break;
        default:
          break;
      }

      double sum_a = 0.0, sum_b = 0.0;
      for (int run = 0; run < spec.runs; ++run) {
        const std::uint64_t run_seed = Rng::mix(spec.seed, static_cast<std::uint64_t>(run));
        const ChannelSet truth = gen_pathloss(cfg, geom, run_seed);
        ChannelSet est = truth;
        if (alpha_g > 0.0) {
          est = perturb_csi(est, alpha_g, LinkGroup::kEveLinks, Rng::mix(run_seed, kEveCsiTag));
        }
        if (alpha_h > 0.0) {
          est = perturb_csi(est, alpha_h, LinkGroup::kNodeLinks, Rng::mix(run_seed, kNodeCsiTag));
        }
        const PrecoderPair pair = build_scheme_pair(scheme, est, cfg, run_seed);
        const RatePoint pt = rates(truth, pair, cfg.rho);
        sum_a += pt.rs_a;
        sum_b += pt.rs_b;
      }
      const double mean_a = sum_a / spec.runs;
      const double mean_b = sum_b / spec.runs;
      const double alpha_report = spec.axis == SweepAxis::kAlpha
                                      ? value
                                      : (spec.alpha_axis == "g" ? alpha_g : alpha_h);

      out += scheme;
      out += ',';
      out += axis_name(spec.axis);
      out += ',';
      out += fmt_g(value);
      out += ',';
      out += fmt_g(cfg.rho);
      out += ',';
      out += fmt_g(alpha_report);
      out += ',';
      out += fmt_g(mean_a);
      out += ',';
      out += fmt_g(mean_b);
      out += ',';
      out += fmt_g(mean_a + mean_b);
      out += ',';
      out += std::to_string(spec.runs);
      out += ',';
      out += std::to_string(spec.seed);
      out += '\n';
    }
  }
  return out;
}

std::string sdof_table(const std::vector<NetworkConfig>& configs) {
  std::string out =
      "na_t,na_r,nb_t,nb_r,ne,case,d11,d12,d13,d14,d21,d22,d23,d24,"
      "counts,closed_a,closed_b,closed_total,built_a,built_b,agree\n";
  for (std::size_t idx = 0; idx < configs.size(); ++idx) {
    const NetworkConfig& cfg = configs[idx];
    cfg.validate();
    const ChannelSet ch = gen_rayleigh(cfg, Rng::mix(9000, idx));
    const SubsetBudget budget = subset_budgets(ch);
    const SelectionCounts sel = selection_counts(budget, cfg);
    const SDoFPair closed = sum_sdof_closed_form(budget, cfg);
    const PrecoderPair pair = construct_precoders(ch, cfg, false, Rng::mix(9001, idx));
    const SDoFPair built = achieved_sdof(ch, pair);

    out += std::to_string(cfg.na_t) + ',' + std::to_string(cfg.na_r) + ',' +
           std::to_string(cfg.nb_t) + ',' + std::to_string(cfg.nb_r) + ',' +
           std::to_string(cfg.ne) + ',';
    out += case_name(sel.case_label);
    for (const SubsetId id :
         {SubsetId::S11, SubsetId::S12, SubsetId::S13, SubsetId::S14, SubsetId::S21,
          SubsetId::S22, SubsetId::S23, SubsetId::S24}) {
      out += ',' + std::to_string(budget[id]);
    }
    out += ',';
    for (std::size_t i = 0; i < sel.counts.size(); ++i) {
      if (i > 0) out += ';';
      out += std::to_string(sel.counts[i]);
    }
    out += ',' + std::to_string(closed.ds_a) + ',' + std::to_string(closed.ds_b) + ',' +
           std::to_string(closed.sum()) + ',' + std::to_string(built.ds_a) + ',' +
           std::to_string(built.ds_b) + ',' + (closed == built ? "1" : "0");
    out += '\n';
  }
  return out;
}

}  // namespace fdsec
