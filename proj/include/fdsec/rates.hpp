#pragma once

#include <functional>
#include <vector>

#include "fdsec/channel.hpp"
#include "fdsec/precoder.hpp"

namespace fdsec {

/// Instantaneous rates of one precoder pair on one channel realization, all
/// in bits per channel use.
struct RatePoint {
  double power_dbm = 0.0;  ///< Transmit power the pair was built for.
  double r_a = 0.0;        ///< A->B information rate.
  double r_b = 0.0;        ///< B->A information rate.
  double r_e_a = 0.0;      ///< Eavesdropper rate on the A->B message.
  double r_e_b = 0.0;      ///< Eavesdropper rate on the B->A message.
  double rs_a = 0.0;       ///< Secrecy rate max(r_a - r_e_a, 0).
  double rs_b = 0.0;       ///< Secrecy rate max(r_b - r_e_b, 0).
};

/// Evaluates the information and secrecy rates of `pair` with unit-variance
/// receiver noise. `rho` in [0,1] scales the residual self-interference
/// power: 0 models perfect cancellation, 1 no cancellation. Each message is
/// decoded treating the residual self-interference as colored noise, and the
/// eavesdropper treats the other message as noise.
RatePoint rates(const ChannelSet& channels, const PrecoderPair& pair, double rho);

/// Per-link slopes of the secrecy rates against log2 of the transmit power.
struct SlopePair {
  double slope_a = 0.0;
  double slope_b = 0.0;
  double sum() const { return slope_a + slope_b; }
};

/// Empirical secrecy-slope estimate: rebuilds the pair at each power on the
/// grid (builder receives watts), evaluates both secrecy rates, and fits one
/// least-squares line per link against log2(power) over the top half of the
/// grid. Throws DegenerateGrid when fewer than two distinct powers are
/// available.
SlopePair empirical_sdof(const ChannelSet& channels,
                         const std::function<PrecoderPair(double)>& pair_builder,
                         const std::vector<double>& p_grid_dbm, double rho = 1.0);

}  // namespace fdsec
