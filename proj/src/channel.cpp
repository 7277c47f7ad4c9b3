#include "fdsec/channel.hpp"

#include <cmath>
#include <json.hpp>

#include "fdsec/errors.hpp"
#include "fdsec/rng.hpp"
#include "json_support.hpp"

namespace fdsec {

namespace {

using nlohmann::json;

void fill_gaussian(CMatrix& m, Rng& rng) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rng.cgaussian();
    }
  }
}

void fill_pathloss(CMatrix& m, double gain, Rng& rng) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = gain * rng.cphase();
    }
  }
}

double rms_entry_magnitude(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return std::sqrt(m.squaredNorm() / static_cast<double>(m.size()));
}

void perturb_one(CMatrix& m, double alpha, Rng& rng) {
  const double scale = rms_entry_magnitude(m);
  const double keep = std::sqrt(1.0 - alpha * alpha);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = keep * m(i, j) + alpha * scale * rng.cgaussian();
    }
  }
}

}  // namespace

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double NetworkConfig::power_watts() const { return dbm_to_watts(power_dbm); }

double NetworkConfig::noise_watts() const { return dbm_to_watts(noise_dbm); }

void NetworkConfig::validate() const {
  if (na_t < 0 || na_r < 0 || nb_t < 0 || nb_r < 0 || ne < 0) {
    throw ConfigError("antenna counts must be non-negative");
  }
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw ConfigError("rho must lie in [0, 1]");
  }
}

double distance(const Vec2& p, const Vec2& q) { return std::hypot(p.x - q.x, p.y - q.y); }

ChannelSet gen_rayleigh(const NetworkConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  ChannelSet ch;
  ch.h_ba = CMatrix(config.nb_r, config.na_t);
  ch.h_ab = CMatrix(config.na_r, config.nb_t);
  ch.h_aa = CMatrix(config.na_r, config.na_t);
  ch.h_bb = CMatrix(config.nb_r, config.nb_t);
  ch.g_a = CMatrix(config.ne, config.na_t);
  ch.g_b = CMatrix(config.ne, config.nb_t);
  fill_gaussian(ch.h_ba, rng);
  fill_gaussian(ch.h_ab, rng);
  fill_gaussian(ch.h_aa, rng);
  fill_gaussian(ch.h_bb, rng);
  fill_gaussian(ch.g_a, rng);
  fill_gaussian(ch.g_b, rng);
  return ch;
}

ChannelSet gen_pathloss(const NetworkConfig& config, const Geometry& geom, std::uint64_t seed) {
  config.validate();
  const double d_ab = distance(geom.alice_pos, geom.bob_pos);
  const double d_ae = distance(geom.alice_pos, geom.eve_pos);
  const double d_be = distance(geom.bob_pos, geom.eve_pos);
  if (config.ne > 0 && (d_ae == 0.0 || d_be == 0.0)) {
    throw ZeroDistance("eavesdropper coincides with a transmitting node");
  }
  if (d_ab == 0.0 && (config.na_t + config.nb_t) > 0) {
    throw ZeroDistance("the two nodes coincide");
  }

  const double c = geom.path_loss_exp;
  const double sigma = std::sqrt(config.noise_watts());
  const auto link_gain = [&](double d) { return std::pow(d, -c / 2.0) / sigma; };

  Rng rng(seed);
  ChannelSet ch;
  ch.h_ba = CMatrix(config.nb_r, config.na_t);
  ch.h_ab = CMatrix(config.na_r, config.nb_t);
  ch.h_aa = CMatrix(config.na_r, config.na_t);
  ch.h_bb = CMatrix(config.nb_r, config.nb_t);
  ch.g_a = CMatrix(config.ne, config.na_t);
  ch.g_b = CMatrix(config.ne, config.nb_t);
  fill_pathloss(ch.h_ba, link_gain(d_ab), rng);
  fill_pathloss(ch.h_ab, link_gain(d_ab), rng);
  // Residual self-interference: unit-magnitude random-phase entries, not
  // distance-derived and not noise-normalized (see the header comment).
  fill_pathloss(ch.h_aa, 1.0, rng);
  fill_pathloss(ch.h_bb, 1.0, rng);
  fill_pathloss(ch.g_a, link_gain(d_ae), rng);
  fill_pathloss(ch.g_b, link_gain(d_be), rng);
  return ch;
}

ChannelSet perturb_csi(const ChannelSet& channels, double alpha, LinkGroup which,
                       std::uint64_t seed) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError("CSI uncertainty alpha must lie in [0, 1]");
  }
  ChannelSet out = channels;
  if (alpha == 0.0) return out;
  Rng rng(seed);
  if (has_link(which, LinkGroup::kHba)) perturb_one(out.h_ba, alpha, rng);
  if (has_link(which, LinkGroup::kHab)) perturb_one(out.h_ab, alpha, rng);
  if (has_link(which, LinkGroup::kHaa)) perturb_one(out.h_aa, alpha, rng);
  if (has_link(which, LinkGroup::kHbb)) perturb_one(out.h_bb, alpha, rng);
  if (has_link(which, LinkGroup::kGa)) perturb_one(out.g_a, alpha, rng);
  if (has_link(which, LinkGroup::kGb)) perturb_one(out.g_b, alpha, rng);
  return out;
}

NetworkConfig parse_network_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  return network_config_from_json(doc);
}

NetworkConfig network_config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("network config must be a JSON object");
  NetworkConfig cfg;
  try {
    cfg.na_t = doc.value("na_t", cfg.na_t);
    cfg.na_r = doc.value("na_r", cfg.na_r);
    cfg.nb_t = doc.value("nb_t", cfg.nb_t);
    cfg.nb_r = doc.value("nb_r", cfg.nb_r);
    cfg.ne = doc.value("ne", cfg.ne);
    cfg.rho = doc.value("rho", cfg.rho);
    cfg.power_dbm = doc.value("power_dbm", cfg.power_dbm);
    cfg.noise_dbm = doc.value("noise_dbm", cfg.noise_dbm);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad network config field: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

}  // namespace fdsec
