#include "fdsec/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "fdsec/errors.hpp"

namespace fdsec {
namespace {

/// log2 det(I + X) for Hermitian positive semidefinite X, evaluated through
/// the eigenvalues so near-singular covariances stay numerically stable.
double logdet_ip(const CMatrix& x) {
  if (x.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(x, Eigen::EigenvaluesOnly);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    acc += std::log2(1.0 + std::max(es.eigenvalues()(i), 0.0));
  }
  return acc;
}

double dbm_of_watts(double watts) {
  return watts > 0.0 ? 10.0 * std::log10(watts) + 30.0 : -std::numeric_limits<double>::infinity();
}

}  // namespace

RatePoint rates(const ChannelSet& channels, const PrecoderPair& pair, double rho) {
  if (rho < 0.0 || rho > 1.0) throw ConfigError("rho must lie in [0, 1]");
  if (channels.h_ba.cols() != pair.v_a.rows() || channels.h_ab.cols() != pair.v_b.rows()) {
    throw DimensionMismatch("precoder row counts do not match the transmit antenna counts");
  }
  if (pair.v_a.cols() != pair.v_b.cols()) {
    throw DimensionMismatch("precoder pair has mismatched column counts");
  }

  const CMatrix q_a = pair.v_a * pair.v_a.adjoint();
  const CMatrix q_b = pair.v_b * pair.v_b.adjoint();

  const CMatrix sig_b = channels.h_ba * q_a * channels.h_ba.adjoint();
  const CMatrix si_b = rho * (channels.h_bb * q_b * channels.h_bb.adjoint());
  const CMatrix sig_a = channels.h_ab * q_b * channels.h_ab.adjoint();
  const CMatrix si_a = rho * (channels.h_aa * q_a * channels.h_aa.adjoint());
  const CMatrix eve_a = channels.g_a * q_a * channels.g_a.adjoint();
  const CMatrix eve_b = channels.g_b * q_b * channels.g_b.adjoint();

  RatePoint pt;
  pt.power_dbm = dbm_of_watts(pair.power);
  pt.r_a = logdet_ip(sig_b + si_b) - logdet_ip(si_b);
  pt.r_b = logdet_ip(sig_a + si_a) - logdet_ip(si_a);
  pt.r_e_a = logdet_ip(eve_a + eve_b) - logdet_ip(eve_b);
  pt.r_e_b = logdet_ip(eve_b + eve_a) - logdet_ip(eve_a);
  pt.rs_a = std::max(pt.r_a - pt.r_e_a, 0.0);
  pt.rs_b = std::max(pt.r_b - pt.r_e_b, 0.0);
  return pt;
}

SlopePair empirical_sdof(const ChannelSet& channels,
                         const std::function<PrecoderPair(double)>& pair_builder,
                         const std::vector<double>& p_grid_dbm, double rho) {
  std::vector<double> grid = p_grid_dbm;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.size() < 2) throw DegenerateGrid("power grid needs at least two distinct points");

  // The slope is an asymptote: fit only the upper half of the grid where the
  // rate curves have straightened out.
  const std::size_t keep = std::max<std::size_t>(2, (grid.size() + 1) / 2);
  const std::size_t first = grid.size() - keep;

  std::vector<double> xs, ya, yb;
  for (std::size_t i = first; i < grid.size(); ++i) {
    const double watts = dbm_to_watts(grid[i]);
    const PrecoderPair pair = pair_builder(watts);
    const RatePoint pt = rates(channels, pair, rho);
    xs.push_back(std::log2(watts));
    ya.push_back(pt.rs_a);
    yb.push_back(pt.rs_b);
  }

  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  for (const double x : xs) mx += x;
  mx /= n;
  double sxx = 0.0;
  for (const double x : xs) sxx += (x - mx) * (x - mx);
  if (sxx <= 0.0) throw DegenerateGrid("power grid collapsed to a single point");

  const auto fit = [&](const std::vector<double>& ys) {
    double my = 0.0;
    for (const double y : ys) my += y;
    my /= n;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) sxy += (xs[i] - mx) * (ys[i] - my);
    return sxy / sxx;
  };
  return {fit(ya), fit(yb)};
}

}  // namespace fdsec
