#include "fdsec/precoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "fdsec/errors.hpp"

namespace fdsec {
namespace {

constexpr SubsetId kS11 = SubsetId::S11;
constexpr SubsetId kS12 = SubsetId::S12;
constexpr SubsetId kS13 = SubsetId::S13;
constexpr SubsetId kS14 = SubsetId::S14;
constexpr SubsetId kS21 = SubsetId::S21;
constexpr SubsetId kS22 = SubsetId::S22;
constexpr SubsetId kS23 = SubsetId::S23;
constexpr SubsetId kS24 = SubsetId::S24;

int pos_part(int v) { return v > 0 ? v : 0; }

/// Floor division for possibly negative numerators (den > 0).
long long floor_div(long long num, long long den) {
  long long q = num / den;
  long long r = num % den;
  if (r != 0 && ((r < 0) != (den < 0))) --q;
  return q;
}

struct Shape {
  int na_t, na_r, nb_t, nb_r, ne;
};

Shape shape_of(const ChannelSet& ch) {
  return {static_cast<int>(ch.h_ba.cols()), static_cast<int>(ch.h_ab.rows()),
          static_cast<int>(ch.h_ab.cols()), static_cast<int>(ch.h_ba.rows()),
          static_cast<int>(ch.g_a.rows())};
}

void validate_channels(const ChannelSet& ch) {
  const Shape s = shape_of(ch);
  auto expect = [](const CMatrix& m, int rows, int cols, const char* name) {
    if (m.rows() != rows || m.cols() != cols) {
      throw DimensionMismatch(std::string("channel ") + name + " has shape " +
                              std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                              ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
    }
  };
  expect(ch.h_aa, s.na_r, s.na_t, "h_aa");
  expect(ch.h_bb, s.nb_r, s.nb_t, "h_bb");
  expect(ch.g_a, s.ne, s.na_t, "g_a");
  expect(ch.g_b, s.ne, s.nb_t, "g_b");
}

/// Ranks of two images arriving at one receiver (desired signal and
/// self-interference), all measured against a single tolerance. The scale
/// anchoring that tolerance must come from the factors that formed the
/// products (max of ||H||*||V|| per image), not from the realized singular
/// values: a nulled link leaves cancellation noise of order eps*||H||*||V||,
/// which must rank as zero even when the other image happens to be small.
struct ReceiverRanks {
  int sig = 0;
  int cov = 0;
  int joint = 0;
};

double product_scale(const CMatrix& h, const CMatrix& v) { return h.norm() * v.norm(); }

// Safety factor over the plain rank threshold: product-cancellation noise
// accumulates over the inner dimension, unlike representation error.
constexpr double kCancellationMargin = 4.0;

// Relative column-norm level below which a projected precoder column is a
// structural zero that picked up rounding noise; genuine directions sit many
// orders of magnitude above it.
constexpr double kStructuralZeroFloor = 1e-10;

// Rank of a product image measured against the scale of its factors, so an
// image that is zero up to rounding cannot pass for data.
int image_rank(const CMatrix& image, double scale) {
  if (image.rows() == 0 || image.cols() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> solver(image);
  const double anchor = std::max(solver.singularValues()(0), scale);
  return numeric_rank_at(image, kCancellationMargin * rank_tolerance(image, anchor));
}

ReceiverRanks receiver_ranks(const CMatrix& sig, const CMatrix& cov, double scale) {
  const CMatrix joint = hstack(sig, cov);
  if (joint.rows() == 0 || joint.cols() == 0) return {};
  Eigen::JacobiSVD<CMatrix> solver(joint);
  const double anchor = std::max(solver.singularValues()(0), scale);
  const double tol = kCancellationMargin * rank_tolerance(joint, anchor);
  ReceiverRanks out;
  for (Eigen::Index i = 0; i < solver.singularValues().size(); ++i) {
    if (solver.singularValues()(i) > tol) ++out.joint;
  }
  out.sig = numeric_rank_at(sig, tol);
  out.cov = numeric_rank_at(cov, tol);
  return out;
}

void require_full_rank(const ChannelSet& ch) {
  auto check = [](const CMatrix& m, const char* name) {
    const int full = static_cast<int>(std::min(m.rows(), m.cols()));
    if (numeric_rank(m) != full) {
      throw RankDegenerate(std::string("channel ") + name + " is rank deficient");
    }
  };
  check(ch.h_ba, "h_ba");
  check(ch.h_ab, "h_ab");
  check(ch.h_aa, "h_aa");
  check(ch.h_bb, "h_bb");
  check(ch.g_a, "g_a");
  check(ch.g_b, "g_b");
}

/// Lazily computed bases and factorizations shared by the family generators.
class SubsetContext {
 public:
  SubsetContext(const ChannelSet& ch, bool h_blind) : ch_(ch), h_blind_(h_blind) {}

  const ChannelSet& ch() const { return ch_; }
  bool h_blind() const { return h_blind_; }

  const CMatrix& null_ga() { return cached(null_ga_, [&] { return null_basis(ch_.g_a); }); }
  const CMatrix& null_gb() { return cached(null_gb_, [&] { return null_basis(ch_.g_b); }); }
  const CMatrix& gamma_aa() { return cached(gamma_aa_, [&] { return null_basis(ch_.h_aa); }); }
  const CMatrix& gamma_bb() { return cached(gamma_bb_, [&] { return null_basis(ch_.h_bb); }); }

  const GsvdResult& hat() {
    return cached(hat_, [&] { return gsvd(ch_.g_a * gamma_aa(), ch_.g_b * gamma_bb()); });
  }
  const GsvdResult& bar() {
    return cached(bar_, [&] { return gsvd(ch_.g_a, ch_.g_b * gamma_bb()); });
  }
  const GsvdResult& breve() {
    return cached(breve_, [&] { return gsvd(ch_.g_a * gamma_aa(), ch_.g_b); });
  }
  const GsvdResult& tilde() { return cached(tilde_, [&] { return gsvd(ch_.g_a, ch_.g_b); }); }

 private:
  template <typename T, typename F>
  const T& cached(std::optional<T>& slot, F make) {
    if (!slot) slot = make();
    return *slot;
  }

  const ChannelSet& ch_;
  bool h_blind_;
  std::optional<CMatrix> null_ga_, null_gb_, gamma_aa_, gamma_bb_;
  std::optional<GsvdResult> hat_, bar_, breve_, tilde_;
};

[[noreturn]] void throw_budget(SubsetId id, int count, long long avail) {
  throw BudgetExceeded(std::string(subset_name(id)) + " cannot supply " + std::to_string(count) +
                       " independent column pairs (capacity " + std::to_string(avail) + ")");
}

/// One-sided family columns: null directions of the own eavesdropper link,
/// split by whether they also null (S11/S13) or excite (S12/S14) the own
/// self-interference channel.
std::pair<CMatrix, CMatrix> gen_one_sided(SubsetContext& ctx, SubsetId id, int count) {
  const Shape sh = shape_of(ctx.ch());
  const bool a_side = (id == kS11 || id == kS12);
  const CMatrix& ng = a_side ? ctx.null_ga() : ctx.null_gb();
  const CMatrix& h_self = a_side ? ctx.ch().h_aa : ctx.ch().h_bb;

  CMatrix basis;
  if (id == kS11 || id == kS13) {
    basis = ng * null_basis(h_self * ng);
  } else if (ctx.h_blind()) {
    basis = ng;
  } else {
    basis = ng * row_basis(h_self * ng);
  }
  if (count > basis.cols()) throw_budget(id, count, basis.cols());

  CMatrix own = basis.leftCols(count);
  CMatrix other = CMatrix::Zero(a_side ? sh.nb_t : sh.na_t, count);
  return a_side ? std::make_pair(std::move(own), std::move(other))
                : std::make_pair(std::move(other), std::move(own));
}

/// Shared-image family columns. Both sides excite the same eavesdropper
/// directions (the x2 block of the family factorization); picks avoid the
/// span reserved for higher-ranked families so that all generated images
/// stay jointly independent.
std::pair<CMatrix, CMatrix> gen_shared(SubsetContext& ctx, SubsetId id, int count) {
  const Shape sh = shape_of(ctx.ch());
  const GsvdResult* g = nullptr;
  CMatrix pre_a, pre_b, excl;
  switch (id) {
    case kS21:
      g = &ctx.hat();
      pre_a = ctx.gamma_aa();
      pre_b = ctx.gamma_bb();
      excl = CMatrix::Zero(sh.ne, 0);
      break;
    case kS22:
      g = &ctx.bar();
      pre_a = CMatrix::Identity(sh.na_t, sh.na_t);
      pre_b = ctx.gamma_bb();
      excl = ctx.hat().x2();
      break;
    case kS23:
      g = &ctx.breve();
      pre_a = ctx.gamma_aa();
      pre_b = CMatrix::Identity(sh.nb_t, sh.nb_t);
      excl = ctx.hat().x2();
      break;
    default:  // kS24
      g = &ctx.tilde();
      pre_a = CMatrix::Identity(sh.na_t, sh.na_t);
      pre_b = CMatrix::Identity(sh.nb_t, sh.nb_t);
      excl = ctx.h_blind() ? CMatrix::Zero(sh.ne, 0) : hstack(ctx.bar().x2(), ctx.breve().x2());
      break;
  }

  const int s = g->dims.s;
  CMatrix x2 = g->x2();
  CMatrix resid = x2;
  if (excl.cols() > 0 && x2.cols() > 0) {
    CMatrix eb = range_basis(excl);
    resid -= eb * (eb.adjoint() * x2);
  }
  const int avail = numeric_rank(resid);
  if (count > avail) throw_budget(id, count, avail);

  CMatrix z(s, count);
  if (count > 0) {
    z = svd(resid).v.leftCols(count);
  }
  CMatrix z1 = z, z2 = z;
  for (int i = 0; i < s; ++i) {
    z1.row(i) /= g->lambda1(i);
    z2.row(i) /= g->lambda2(i);
  }
  CMatrix v_a = pre_a * (g->psi12() * z1);
  CMatrix v_b = pre_b * (g->psi22() * z2);
  return {std::move(v_a), std::move(v_b)};
}

std::pair<CMatrix, CMatrix> gen_family(SubsetContext& ctx, SubsetId id, int count) {
  const Shape sh = shape_of(ctx.ch());
  if (count < 0) throw ConfigError("column count must be nonnegative");
  if (count == 0) return {CMatrix::Zero(sh.na_t, 0), CMatrix::Zero(sh.nb_t, 0)};

  const bool needs_si_knowledge =
      id == kS11 || id == kS13 || id == kS21 || id == kS22 || id == kS23;
  if (ctx.h_blind() && needs_si_knowledge) throw_budget(id, count, 0);

  if (id == kS11 || id == kS12 || id == kS13 || id == kS14) return gen_one_sided(ctx, id, count);
  return gen_shared(ctx, id, count);
}

/// Receive-space accounting shared by selection and the closed form: how many
/// receive dimensions a pick occupies at (B, A).
std::pair<int, int> consumption(SubsetId id) {
  switch (id) {
    case kS11:
      return {1, 0};
    case kS12:
      return {1, 1};
    case kS13:
      return {0, 1};
    case kS14:
      return {1, 1};
    case kS21:
      return {1, 1};
    case kS22:
      return {1, 2};
    case kS23:
      return {2, 1};
    default:  // kS24
      return {2, 2};
  }
}

/// S12/S14 only raise one message's count while occupying a dimension at both
/// receivers, so they are worth taking only while both sides have room.
bool needs_room_on_both_sides(SubsetId id) { return id == kS12 || id == kS14; }

/// Greedy state walking the ranked phase list of a regime.
struct Selector {
  long long rem_b;  ///< Unclaimed receive dimensions at B.
  long long rem_a;  ///< Unclaimed receive dimensions at A.
  std::array<int, kSubsetCount> n{};
  std::vector<int> counts;
  std::vector<SubsetId> sequence;

  long long capacity(SubsetId id) const {
    auto [cb, ca] = consumption(id);
    if (ca == 0) return floor_div(rem_b, cb);
    if (cb == 0) return floor_div(rem_a, ca);
    const long long kb = floor_div(rem_b, cb);
    const long long ka = floor_div(rem_a, ca);
    return needs_room_on_both_sides(id) ? std::min(kb, ka) : std::max(kb, ka);
  }

  void commit(SubsetId id, long long take) {
    auto [cb, ca] = consumption(id);
    rem_b -= cb * take;
    rem_a -= ca * take;
    n[subset_index(id)] += static_cast<int>(take);
    for (long long i = 0; i < take; ++i) sequence.push_back(id);
  }

  long long take_single(SubsetId id, long long budget) {
    const long long take = std::max(0LL, std::min(capacity(id), budget));
    commit(id, take);
    counts.push_back(static_cast<int>(take));
    return take;
  }

  /// One pick of `first` and one of `second` per round (3 dimensions per
  /// receiver per round); reports the total pair count for the phase.
  long long take_alternating(SubsetId first, SubsetId second, long long round_budget) {
    const long long cap = std::max(floor_div(rem_b, 3), floor_div(rem_a, 3));
    const long long rounds = std::max(0LL, std::min(cap, round_budget));
    for (long long i = 0; i < rounds; ++i) {
      commit(first, 1);
      commit(second, 1);
    }
    counts.push_back(static_cast<int>(2 * rounds));
    return rounds;
  }
};

SDoFPair finalize_pair(const std::array<int, kSubsetCount>& n, const NetworkConfig& cfg) {
  const int si_b = n[subset_index(kS23)] + n[subset_index(kS24)] + n[subset_index(kS14)];
  const int si_a = n[subset_index(kS12)] + n[subset_index(kS22)] + n[subset_index(kS24)];
  const int l_a = n[subset_index(kS11)] + n[subset_index(kS12)] + n[subset_index(kS21)] +
                  n[subset_index(kS22)] + n[subset_index(kS23)] + n[subset_index(kS24)];
  const int l_b = n[subset_index(kS13)] + n[subset_index(kS14)] + n[subset_index(kS21)] +
                  n[subset_index(kS22)] + n[subset_index(kS23)] + n[subset_index(kS24)];
  return {std::min(pos_part(cfg.nb_r - si_b), l_a), std::min(pos_part(cfg.na_r - si_a), l_b)};
}

}  // namespace

const char* subset_name(SubsetId id) {
  switch (id) {
    case kS11:
      return "S11";
    case kS12:
      return "S12";
    case kS13:
      return "S13";
    case kS14:
      return "S14";
    case kS21:
      return "S21";
    case kS22:
      return "S22";
    case kS23:
      return "S23";
    default:
      return "S24";
  }
}

const char* case_name(CaseLabel label) {
  switch (label) {
    case CaseLabel::A_i_a:
      return "A(i)(a)";
    case CaseLabel::A_i_b:
      return "A(i)(b)";
    case CaseLabel::A_ii_a:
      return "A(ii)(a)";
    case CaseLabel::A_ii_b:
      return "A(ii)(b)";
    case CaseLabel::B:
      return "B";
    case CaseLabel::C:
      return "C";
    default:
      return "D";
  }
}

SubsetBudget subset_budgets(const ChannelSet& channels, bool h_blind) {
  validate_channels(channels);
  require_full_rank(channels);
  const Shape sh = shape_of(channels);

  SubsetBudget b;
  b[kS11] = pos_part(sh.na_t - sh.ne - sh.na_r);
  b[kS12] = std::min(sh.na_r, pos_part(sh.na_t - sh.ne));
  b[kS13] = pos_part(sh.nb_t - sh.ne - sh.nb_r);
  b[kS14] = std::min(sh.nb_r, pos_part(sh.nb_t - sh.ne));

  if (h_blind) {
    // Without self-interference knowledge the SI-nulling families are
    // unavailable, and every shared-image direction falls to the last family.
    b[kS11] = 0;
    b[kS13] = 0;
    b.s_tilde = gsvd(channels.g_a, channels.g_b).dims.s;
    b[kS24] = b.s_tilde;
    return b;
  }

  const CMatrix gamma_aa = null_basis(channels.h_aa);
  const CMatrix gamma_bb = null_basis(channels.h_bb);
  b.s_hat = gsvd(channels.g_a * gamma_aa, channels.g_b * gamma_bb).dims.s;
  b.s_bar = gsvd(channels.g_a, channels.g_b * gamma_bb).dims.s;
  b.s_breve = gsvd(channels.g_a * gamma_aa, channels.g_b).dims.s;
  b.s_tilde = gsvd(channels.g_a, channels.g_b).dims.s;

  b[kS21] = b.s_hat;
  b[kS22] = b.s_bar - b.s_hat;
  b[kS23] = b.s_breve - b.s_hat;
  b[kS24] = b.s_tilde - b.s_bar - b.s_breve + b.s_hat;
  if (b[kS22] < 0 || b[kS23] < 0 || b[kS24] < 0) {
    throw InternalInconsistency("shared-image dimensions violate nesting: s_hat=" +
                                std::to_string(b.s_hat) + " s_bar=" + std::to_string(b.s_bar) +
                                " s_breve=" + std::to_string(b.s_breve) +
                                " s_tilde=" + std::to_string(b.s_tilde));
  }
  return b;
}

std::pair<CMatrix, CMatrix> subset_vectors(const ChannelSet& channels, SubsetId id, int count,
                                           [[maybe_unused]] std::uint64_t seed, bool h_blind) {
  validate_channels(channels);
  SubsetContext ctx(channels, h_blind);
  return gen_family(ctx, id, count);
}

SelectionCounts selection_counts(const SubsetBudget& budget, const NetworkConfig& config) {
  config.validate();
  const bool a_saturated = config.na_t <= config.ne + config.na_r;
  const bool b_saturated = config.nb_t <= config.ne + config.nb_r;

  Selector sel{config.nb_r, config.na_r, {}, {}, {}};
  CaseLabel label;

  if (a_saturated && b_saturated) {
    if (config.nb_r >= config.na_r) {
      // B has at least as many receive dimensions: spend the surplus on the
      // family that loads B twice, then alternate with the A-loading family.
      const int head = std::min(budget[kS23], config.nb_r - config.na_r);
      const int tail = budget[kS23] - head;
      const bool leftover_is_s22 = budget[kS22] >= tail;
      label = leftover_is_s22 ? CaseLabel::A_i_a : CaseLabel::A_i_b;
      sel.take_single(kS21, budget[kS21]);
      sel.take_single(kS23, head);
      const long long rounds =
          sel.take_alternating(kS22, kS23, std::min<long long>(budget[kS22], tail));
      if (leftover_is_s22) {
        sel.take_single(kS22, budget[kS22] - rounds);
      } else {
        sel.take_single(kS23, tail - rounds);
      }
      sel.take_single(kS24, budget[kS24]);
      sel.take_single(kS12, budget[kS12]);
      sel.take_single(kS14, budget[kS14]);
    } else {
      const int head = std::min(budget[kS22], config.na_r - config.nb_r);
      const int tail = budget[kS22] - head;
      const bool leftover_is_s23 = budget[kS23] >= tail;
      label = leftover_is_s23 ? CaseLabel::A_ii_a : CaseLabel::A_ii_b;
      sel.take_single(kS21, budget[kS21]);
      sel.take_single(kS22, head);
      const long long rounds =
          sel.take_alternating(kS23, kS22, std::min<long long>(budget[kS23], tail));
      if (leftover_is_s23) {
        sel.take_single(kS23, budget[kS23] - rounds);
      } else {
        sel.take_single(kS22, tail - rounds);
      }
      sel.take_single(kS24, budget[kS24]);
      sel.take_single(kS12, budget[kS12]);
      sel.take_single(kS14, budget[kS14]);
    }
  } else if (a_saturated) {
    label = CaseLabel::B;
    sel.take_single(kS21, budget[kS21]);
    const long long head =
        sel.take_single(kS22, std::min<long long>(budget[kS22], config.nb_r));
    sel.take_single(kS13, budget[kS13]);
    sel.take_single(kS22, budget[kS22] - head);
    sel.take_single(kS12, budget[kS12]);
    sel.take_single(kS14, budget[kS14]);
  } else if (b_saturated) {
    label = CaseLabel::C;
    sel.take_single(kS21, budget[kS21]);
    const long long head =
        sel.take_single(kS23, std::min<long long>(budget[kS23], config.na_r));
    sel.take_single(kS11, budget[kS11]);
    sel.take_single(kS23, budget[kS23] - head);
    sel.take_single(kS12, budget[kS12]);
    sel.take_single(kS14, budget[kS14]);
  } else {
    label = CaseLabel::D;
    sel.take_single(kS21, budget[kS21]);
    sel.take_single(kS11, budget[kS11]);
    sel.take_single(kS13, budget[kS13]);
    sel.take_single(kS12, budget[kS12]);
    sel.take_single(kS14, budget[kS14]);
  }

  SelectionCounts out;
  out.case_label = label;
  out.counts = std::move(sel.counts);
  out.per_subset = sel.n;
  out.sequence = std::move(sel.sequence);
  return out;
}

SDoFPair sum_sdof_closed_form(const SubsetBudget& budget, const NetworkConfig& config) {
  const SelectionCounts sc = selection_counts(budget, config);
  return finalize_pair(sc.per_subset, config);
}

SDoFPair achieved_sdof(const ChannelSet& channels, const PrecoderPair& pair) {
  validate_channels(channels);
  const CMatrix sig_b = channels.h_ba * pair.v_a;  // desired signal arriving at B
  const CMatrix cov_b = channels.h_bb * pair.v_b;  // self-interference seen at B
  const CMatrix sig_a = channels.h_ab * pair.v_b;
  const CMatrix cov_a = channels.h_aa * pair.v_a;

  const double scale_b = std::max(product_scale(channels.h_ba, pair.v_a),
                                  product_scale(channels.h_bb, pair.v_b));
  const double scale_a = std::max(product_scale(channels.h_ab, pair.v_b),
                                  product_scale(channels.h_aa, pair.v_a));
  const ReceiverRanks at_b = receiver_ranks(sig_b, cov_b, scale_b);
  const ReceiverRanks at_a = receiver_ranks(sig_a, cov_a, scale_a);
  const int ds_a = at_b.joint - at_b.cov;
  const int ds_b = at_a.joint - at_a.cov;

  const int nb_r = static_cast<int>(channels.h_ba.rows());
  const int na_r = static_cast<int>(channels.h_ab.rows());
  const int check_a = std::min(pos_part(nb_r - at_b.cov), at_b.sig);
  const int check_b = std::min(pos_part(na_r - at_a.cov), at_a.sig);
  if (ds_a != check_a || ds_b != check_b) {
    throw InternalInconsistency(
        "subspace and rank accounting disagree: (" + std::to_string(ds_a) + "," +
        std::to_string(ds_b) + ") vs (" + std::to_string(check_a) + "," +
        std::to_string(check_b) + ")");
  }
  return {ds_a, ds_b};
}

SDoFPair lemma1_sdof(const ChannelSet& channels, const PrecoderPair& pair) {
  validate_channels(channels);
  const double scale_b = std::max(product_scale(channels.h_ba, pair.v_a),
                                  product_scale(channels.h_bb, pair.v_b));
  const double scale_a = std::max(product_scale(channels.h_ab, pair.v_b),
                                  product_scale(channels.h_aa, pair.v_a));
  const double scale_e = std::max(product_scale(channels.g_a, pair.v_a),
                                  product_scale(channels.g_b, pair.v_b));
  const ReceiverRanks at_b =
      receiver_ranks(channels.h_ba * pair.v_a, channels.h_bb * pair.v_b, scale_b);
  const ReceiverRanks at_a =
      receiver_ranks(channels.h_ab * pair.v_b, channels.h_aa * pair.v_a, scale_a);
  const ReceiverRanks eve_a =
      receiver_ranks(channels.g_a * pair.v_a, channels.g_b * pair.v_b, scale_e);
  const ReceiverRanks eve_b =
      receiver_ranks(channels.g_b * pair.v_b, channels.g_a * pair.v_a, scale_e);
  const int m_a = at_b.joint - at_b.cov;
  const int leak_a = eve_a.joint - eve_a.cov;
  const int m_b = at_a.joint - at_a.cov;
  const int leak_b = eve_b.joint - eve_b.cov;
  return {m_a - leak_a, m_b - leak_b};
}

double alignment_residual(const ChannelSet& channels, const PrecoderPair& pair) {
  const CMatrix ea = channels.g_a * pair.v_a;
  const CMatrix eb = channels.g_b * pair.v_b;
  return (ea - eb).norm() / std::max(1.0, ea.norm());
}

void normalize_pair_power(PrecoderPair& pair, double power_watts) {
  const int cols = static_cast<int>(pair.v_a.cols());
  pair.power = std::max(power_watts, 0.0);
  if (cols == 0 || power_watts <= 0.0) return;

  Eigen::VectorXd pa(cols), pb(cols);
  for (int i = 0; i < cols; ++i) {
    pa(i) = pair.v_a.col(i).squaredNorm();
    pb(i) = pair.v_b.col(i).squaredNorm();
  }
  const int active_a = static_cast<int>((pa.array() > 0.0).count());
  const int active_b = static_cast<int>((pb.array() > 0.0).count());

  // Per-column common scale: each active side offers its equal share, the
  // tighter side binds so neither trace can overshoot.
  for (int i = 0; i < cols; ++i) {
    double c2 = std::numeric_limits<double>::infinity();
    if (pa(i) > 0.0) c2 = std::min(c2, power_watts / (active_a * pa(i)));
    if (pb(i) > 0.0) c2 = std::min(c2, power_watts / (active_b * pb(i)));
    if (!std::isfinite(c2)) continue;
    const double c = std::sqrt(c2);
    pair.v_a.col(i) *= c;
    pair.v_b.col(i) *= c;
    pa(i) *= c2;
    pb(i) *= c2;
  }

  // One-sided columns can absorb the slack the shared columns left behind
  // without disturbing the other node's trace or the alignment.
  auto top_up = [cols, power_watts](CMatrix& own, Eigen::VectorXd& p_own,
                                    const Eigen::VectorXd& p_other) {
    const double slack = power_watts - p_own.sum();
    double pure = 0.0;
    for (int i = 0; i < cols; ++i) {
      if (p_own(i) > 0.0 && p_other(i) == 0.0) pure += p_own(i);
    }
    if (slack <= 0.0 || pure <= 0.0) return;
    const double f = std::sqrt((pure + slack) / pure);
    for (int i = 0; i < cols; ++i) {
      if (p_own(i) > 0.0 && p_other(i) == 0.0) {
        own.col(i) *= f;
        p_own(i) *= f * f;
      }
    }
  };
  top_up(pair.v_a, pa, pb);
  top_up(pair.v_b, pb, pa);
}

PrecoderPair construct_precoders(const ChannelSet& channels, const NetworkConfig& config,
                                 bool constrained, std::uint64_t seed, bool h_blind) {
  validate_channels(channels);
  config.validate();
  const Shape sh = shape_of(channels);
  if (sh.na_t != config.na_t || sh.na_r != config.na_r || sh.nb_t != config.nb_t ||
      sh.nb_r != config.nb_r || sh.ne != config.ne) {
    throw DimensionMismatch("channel shapes do not match the node configuration");
  }

  const SubsetBudget budget = subset_budgets(channels, h_blind);
  const SelectionCounts sc = selection_counts(budget, config);

  SubsetContext ctx(channels, h_blind);
  std::array<std::pair<CMatrix, CMatrix>, kSubsetCount> blocks;
  for (int i = 0; i < kSubsetCount; ++i) {
    blocks[i] = gen_family(ctx, static_cast<SubsetId>(i), sc.per_subset[i]);
  }

  const int total = static_cast<int>(sc.sequence.size());
  PrecoderPair pair;
  pair.v_a = CMatrix::Zero(sh.na_t, total);
  pair.v_b = CMatrix::Zero(sh.nb_t, total);
  pair.power = config.power_watts();

  std::array<int, kSubsetCount> cursor{};
  int accepted = 0;
  for (const SubsetId id : sc.sequence) {
    const int j = cursor[subset_index(id)]++;
    pair.v_a.col(accepted) = blocks[subset_index(id)].first.col(j);
    pair.v_b.col(accepted) = blocks[subset_index(id)].second.col(j);
    if (constrained) {
      // Stop before the first pick that would load either receiver with more
      // total stream dimensions (arriving + self-interference) than antennas.
      const CMatrix va = pair.v_a.leftCols(accepted + 1);
      const CMatrix vb = pair.v_b.leftCols(accepted + 1);
      const double scale_a = std::max(product_scale(channels.h_ab, vb),
                                      product_scale(channels.h_aa, va));
      const double scale_b = std::max(product_scale(channels.h_ba, va),
                                      product_scale(channels.h_bb, vb));
      const ReceiverRanks at_a =
          receiver_ranks(channels.h_ab * vb, channels.h_aa * va, scale_a);
      const ReceiverRanks at_b =
          receiver_ranks(channels.h_ba * va, channels.h_bb * vb, scale_b);
      if (at_a.sig + at_a.cov > sh.na_r || at_b.sig + at_b.cov > sh.nb_r) break;
    }
    pair.provenance.push_back(id);
    ++accepted;
  }
  if (accepted < total) {
    pair.v_a = CMatrix(pair.v_a.leftCols(accepted));
    pair.v_b = CMatrix(pair.v_b.leftCols(accepted));
  }

  normalize_pair_power(pair, config.power_watts());

  if (!constrained) {
    const SDoFPair closed = finalize_pair(sc.per_subset, config);
    const SDoFPair got = achieved_sdof(channels, pair);
    if (!(got == closed)) {
      throw InternalInconsistency("constructed pair achieves (" + std::to_string(got.ds_a) + "," +
                                  std::to_string(got.ds_b) + ") but the selection predicts (" +
                                  std::to_string(closed.ds_a) + "," + std::to_string(closed.ds_b) +
                                  ")");
    }
  }
  (void)seed;
  return pair;
}

PrecoderPair align_project(const ChannelSet& channels, const PrecoderPair& pair) {
  validate_channels(channels);
  if (pair.v_a.rows() != channels.h_ba.cols() || pair.v_b.rows() != channels.h_ab.cols()) {
    throw DimensionMismatch("precoder row counts do not match the transmit antenna counts");
  }

  const CMatrix ea = channels.g_a * pair.v_a;
  const CMatrix eb = channels.g_b * pair.v_b;
  const GsvdResult g = gsvd(eb, ea);

  // Keep, per side, the column combinations whose eavesdropper image is
  // either shared with the other side or zero; drop the private ones.
  const CMatrix va1 = pair.v_a * hstack(g.psi22(), g.psi23());
  const CMatrix vb1 = pair.v_b * hstack(g.psi11(), g.psi12());

  // Re-basis both sides so the shared images match column by column.
  const CMatrix fa = channels.g_a * va1;
  const CMatrix fb = channels.g_b * vb1;
  const int ra = image_rank(fa, product_scale(channels.g_a, va1));
  const int rb = image_rank(fb, product_scale(channels.g_b, vb1));
  const SvdResult sa = svd(fa);
  const SvdResult sb = svd(fb);
  const CMatrix ta1 = sa.v.leftCols(ra);
  const CMatrix ta0 = sa.v.rightCols(fa.cols() - ra);
  const CMatrix tb1 = sb.v.leftCols(rb);
  const CMatrix tb0 = sb.v.rightCols(fb.cols() - rb);

  // With no shared image (ra or rb zero) there is nothing to match and the
  // decomposition below has no data to work on; the shared block is empty.
  CMatrix mix = CMatrix::Zero(ra, rb);
  if (ra > 0 && rb > 0) {
    mix = (fa * ta1).completeOrthogonalDecomposition().solve(fb * tb1);
  }
  const CMatrix va_shared = va1 * ta1 * mix;
  const CMatrix vb_shared = vb1 * tb1;
  const CMatrix va_null = va1 * ta0;
  const CMatrix vb_null = vb1 * tb0;

  const int shared = static_cast<int>(vb_shared.cols());
  const int cols = shared + static_cast<int>(std::max(va_null.cols(), vb_null.cols()));
  PrecoderPair out;
  out.v_a = CMatrix::Zero(pair.v_a.rows(), cols);
  out.v_b = CMatrix::Zero(pair.v_b.rows(), cols);
  out.v_a.leftCols(shared) = va_shared;
  out.v_b.leftCols(shared) = vb_shared;
  out.v_a.middleCols(shared, va_null.cols()) = va_null;
  out.v_b.middleCols(shared, vb_null.cols()) = vb_null;

  // Columns at the rounding floor of the inputs are structural zeros that
  // picked up cancellation noise; restore the exact zeros and drop columns
  // that are dead on both sides, so the power normalization cannot amplify
  // noise into a transmit direction.
  const double floor_a = kStructuralZeroFloor * pair.v_a.norm();
  const double floor_b = kStructuralZeroFloor * pair.v_b.norm();
  int kept = 0;
  for (int i = 0; i < cols; ++i) {
    if (out.v_a.col(i).norm() <= floor_a) out.v_a.col(i).setZero();
    if (out.v_b.col(i).norm() <= floor_b) out.v_b.col(i).setZero();
    if (out.v_a.col(i).isZero(0.0) && out.v_b.col(i).isZero(0.0)) continue;
    out.v_a.col(kept) = out.v_a.col(i);
    out.v_b.col(kept) = out.v_b.col(i);
    ++kept;
  }
  out.v_a.conservativeResize(Eigen::NoChange, kept);
  out.v_b.conservativeResize(Eigen::NoChange, kept);
  normalize_pair_power(out, pair.power);
  return out;
}

}  // namespace fdsec
