#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fdsec/channel.hpp"

namespace fdsec {

/// Quantity swept across the columns of one experiment.
enum class SweepAxis { kNone, kX, kY, kAlpha };

/// One Monte Carlo experiment: a node configuration and geometry, an optional
/// sweep over the eavesdropper position or the CSI error level, the schemes
/// to compare, and the randomization controls. Per-run channel draws depend
/// only on (seed, run) so every scheme and sweep value sees the same fading.
struct ExperimentSpec {
  NetworkConfig config;
  Geometry geometry;
  SweepAxis axis = SweepAxis::kNone;
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;
  int runs = 500;
  std::vector<std::string> schemes = {"proposed"};
  std::uint64_t seed = 1;
  double csi_alpha_g = 0.0;    ///< CSI error level on the eavesdropper links.
  double csi_alpha_h = 0.0;    ///< CSI error level on the node-to-node links.
  std::string alpha_axis = "g";  ///< Which error level an alpha sweep drives.
};

/// Names accepted in ExperimentSpec::schemes: "proposed",
/// "proposed-constrained", "proposed-hblind", "mf", "zf", "oneway".
bool known_scheme(const std::string& name);

/// Parses an ExperimentSpec from a JSON object string. Recognized keys:
/// config (object, see parse_network_config), geometry (object with alice,
/// bob, eve as [x, y] arrays and path_loss_exp), axis ("none", "x", "y",
/// "alpha"), start, stop, step, runs, schemes (array of strings), seed,
/// csi_alpha_g, csi_alpha_h, alpha_axis ("g" or "h"). Missing keys keep the
/// defaults above. Throws ConfigError on malformed input.
ExperimentSpec parse_experiment_spec(const std::string& json_text);

/// Runs the experiment and returns a CSV table with header
/// scheme,axis,value,rho,alpha,mean_rs_a,mean_rs_b,mean_rs_sum,runs,seed
/// (one row per scheme and sweep value; means over the Monte Carlo runs).
/// Precoders are always built from the (possibly mismatched) estimated
/// channels and rated on the true ones.
std::string run_sweep(const ExperimentSpec& spec);

/// Closed-form/constructed comparison table for a list of configurations:
/// per row the antenna counts, the selection regime, the per-family budgets,
/// the greedy counts (semicolon-joined), the closed-form pair, the pair
/// achieved by an actual construction on a generic draw, and an agreement
/// flag.
std::string sdof_table(const std::vector<NetworkConfig>& configs);

}  // namespace fdsec
