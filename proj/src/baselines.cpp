#include "fdsec/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "fdsec/errors.hpp"
#include "fdsec/linalg.hpp"

namespace fdsec {
namespace {

/// Scales `m` so trace(m m^H) equals `power_watts` (no-op for zero matrices).
void scale_to_power(CMatrix& m, double power_watts) {
  const double tr = m.squaredNorm();
  if (tr > 0.0 && power_watts > 0.0) m *= std::sqrt(power_watts / tr);
}

/// Strongest right singular direction of the forward channel (one beam).
CMatrix mf_beams(const CMatrix& forward) {
  const CMatrix v = svd(forward).v;
  return v.leftCols(std::min<Eigen::Index>(1, v.cols()));
}

/// Single beam inside the null space of the self-interference channel, along
/// the direction with the largest forward gain.
CMatrix zf_beams(const CMatrix& forward, const CMatrix& self, bool& fallback) {
  const CMatrix null_self = null_basis(self);
  if (null_self.cols() == 0) {
    fallback = true;
    return mf_beams(forward);
  }
  fallback = false;
  const CMatrix projected = forward * null_self;
  return null_self * svd(projected).v.leftCols(1);
}

/// Zero-pads the narrower matrix so both sides report one column per stream
/// pair, as the pair container requires.
PrecoderPair as_pair(CMatrix v_a, CMatrix v_b, double power_watts) {
  const int cols = static_cast<int>(std::max(v_a.cols(), v_b.cols()));
  PrecoderPair pair;
  pair.v_a = CMatrix::Zero(v_a.rows(), cols);
  pair.v_b = CMatrix::Zero(v_b.rows(), cols);
  pair.v_a.leftCols(v_a.cols()) = v_a;
  pair.v_b.leftCols(v_b.cols()) = v_b;
  pair.power = power_watts;
  return pair;
}

}  // namespace

PrecoderPair mf_precoders(const ChannelSet& channels, double power_watts) {
  CMatrix v_a = mf_beams(channels.h_ba);
  CMatrix v_b = mf_beams(channels.h_ab);
  scale_to_power(v_a, power_watts);
  scale_to_power(v_b, power_watts);
  return as_pair(std::move(v_a), std::move(v_b), power_watts);
}

ZfResult zf_precoders(const ChannelSet& channels, double power_watts) {
  ZfResult out;
  CMatrix v_a = zf_beams(channels.h_ba, channels.h_aa, out.fallback_a);
  CMatrix v_b = zf_beams(channels.h_ab, channels.h_bb, out.fallback_b);
  scale_to_power(v_a, power_watts);
  scale_to_power(v_b, power_watts);
  out.pair = as_pair(std::move(v_a), std::move(v_b), power_watts);
  return out;
}

NetworkConfig oneway_config(const NetworkConfig& config) {
  if (config.na_r == 0 && config.nb_t <= 1) return config;
  NetworkConfig out = config;
  out.na_t = config.na_t + config.na_r;
  out.na_r = 0;
  const int total_b = config.nb_t + config.nb_r;
  out.nb_t = total_b > 0 ? 1 : 0;
  out.nb_r = total_b > 0 ? total_b - 1 : 0;
  return out;
}

}  // namespace fdsec
