#pragma once

#include <cstdint>
#include <string>

#include "fdsec/linalg.hpp"

namespace fdsec {

/// Antenna and power configuration of the two full-duplex nodes and the
/// eavesdropper. Powers are in dBm; rho scales the residual self-interference
/// in the rate expressions (0 = perfect cancellation, 1 = none).
struct NetworkConfig {
  int na_t = 0;  ///< Transmit antennas at node A.
  int na_r = 0;  ///< Receive antennas at node A.
  int nb_t = 0;  ///< Transmit antennas at node B.
  int nb_r = 0;  ///< Receive antennas at node B.
  int ne = 0;    ///< Eavesdropper antennas.
  double rho = 1.0;
  double power_dbm = 0.0;
  double noise_dbm = -60.0;

  /// Transmit power budget in watts.
  double power_watts() const;
  /// Noise power in watts.
  double noise_watts() const;
  /// Throws ConfigError on negative counts or rho outside [0, 1].
  void validate() const;
};

/// dBm to watts.
double dbm_to_watts(double dbm);

/// The six channel matrices of the network. Shapes follow NetworkConfig:
/// h_ba: nb_r x na_t (A->B), h_ab: na_r x nb_t (B->A), h_aa: na_r x na_t and
/// h_bb: nb_r x nb_t (self-interference), g_a: ne x na_t, g_b: ne x nb_t
/// (eavesdropper taps).
struct ChannelSet {
  CMatrix h_ba, h_ab, h_aa, h_bb, g_a, g_b;
};

/// 2-D node placement for the path-loss model.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Vec2& p, const Vec2& q);

struct Geometry {
  Vec2 alice_pos{-5.0, 0.0};
  Vec2 bob_pos{5.0, 0.0};
  Vec2 eve_pos{0.0, -5.0};
  double path_loss_exp = 3.5;
};

/// Selector for the links affected by a CSI perturbation.
enum class LinkGroup : unsigned {
  kNone = 0,
  kGa = 1u << 0,
  kGb = 1u << 1,
  kHba = 1u << 2,
  kHab = 1u << 3,
  kHaa = 1u << 4,
  kHbb = 1u << 5,
  kEveLinks = kGa | kGb,
  kNodeLinks = kHba | kHab | kHaa | kHbb,
  kAll = kEveLinks | kNodeLinks,
};

constexpr LinkGroup operator|(LinkGroup a, LinkGroup b) {
  return static_cast<LinkGroup>(static_cast<unsigned>(a) | static_cast<unsigned>(b));
}
constexpr bool has_link(LinkGroup mask, LinkGroup bit) {
  return (static_cast<unsigned>(mask) & static_cast<unsigned>(bit)) != 0;
}

/// Generic fading draw: every entry i.i.d. circular complex Gaussian with
/// unit variance. Deterministic per seed (fixed link order h_ba, h_ab, h_aa,
/// h_bb, g_a, g_b; row-major entry order). Unit noise is assumed with this
/// generator, so the rate expressions apply literally.
ChannelSet gen_rayleigh(const NetworkConfig& config, std::uint64_t seed);

/// Geometric model: each propagation entry is d^{-c/2} e^{j*theta} with theta
/// uniform and d the scalar distance of the link, divided by the noise
/// amplitude so the unit-noise rate expressions stay literal. The
/// self-interference links carry unit-magnitude random-phase entries without
/// that normalization: they stand for the residue left by the hardware
/// canceller, with rho in the rate expressions setting how much survives.
/// Throws ZeroDistance if two distinct nodes coincide.
ChannelSet gen_pathloss(const NetworkConfig& config, const Geometry& geom, std::uint64_t seed);

/// Gauss-Markov CSI error: selected links become
/// sqrt(1-alpha^2)*M + alpha*scale*Delta with Delta i.i.d. CN(0,1) and scale
/// the RMS entry magnitude of M (the per-link path gain). alpha = 0 returns
/// the input unchanged; alpha = 1 replaces the link entirely. Deterministic:
/// links are processed in the fixed generation order.
ChannelSet perturb_csi(const ChannelSet& channels, double alpha, LinkGroup which,
                       std::uint64_t seed);

/// Parses a NetworkConfig from a JSON object string with keys na_t, na_r,
/// nb_t, nb_r, ne, rho, power_dbm, noise_dbm (missing keys keep defaults).
/// Throws ConfigError on malformed input.
NetworkConfig parse_network_config(const std::string& json_text);

}  // namespace fdsec
