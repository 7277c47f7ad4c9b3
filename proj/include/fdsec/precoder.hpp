#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "fdsec/channel.hpp"
#include "fdsec/linalg.hpp"

namespace fdsec {

/// The eight families of candidate precoding column pairs, classified by
/// which of the three constraints (eavesdropper-nulling at A, at B,
/// self-interference-nulling) each side of the pair satisfies. S1x families
/// are one-sided (the other side transmits nothing in that column); S2x
/// families carry a shared eavesdropper image on both sides.
enum class SubsetId { S11, S12, S13, S14, S21, S22, S23, S24 };

inline constexpr int kSubsetCount = 8;
inline constexpr int subset_index(SubsetId id) { return static_cast<int>(id); }
const char* subset_name(SubsetId id);

/// Antenna-count regime driving the selection ranking. A splits on which
/// receiver has more antennas (i/ii) and on which pooled budget runs out
/// first (a/b); B and C are the two one-sided-saturation regimes; D is
/// both-sides-saturated.
enum class CaseLabel { A_i_a, A_i_b, A_ii_a, A_ii_b, B, C, D };

const char* case_name(CaseLabel label);

/// Per-family capacities: the maximum number of linearly independent column
/// pairs each family can contribute, plus the four intersection dimensions
/// they derive from.
struct SubsetBudget {
  std::array<int, kSubsetCount> d{};
  int s_hat = 0;    ///< dim of the doubly-SI-nulled shared image space.
  int s_bar = 0;    ///< dim of the B-side-SI-nulled shared image space.
  int s_breve = 0;  ///< dim of the A-side-SI-nulled shared image space.
  int s_tilde = 0;  ///< dim of the unconstrained shared image space.

  int operator[](SubsetId id) const { return d[subset_index(id)]; }
  int& operator[](SubsetId id) { return d[subset_index(id)]; }
};

/// Integer degrees-of-freedom pair: ds_a for the A->B message (measured at
/// B's receiver), ds_b for the B->A message. Diagnostic uses (lemma1_sdof)
/// may carry negative components; constructed pairs never do.
struct SDoFPair {
  int ds_a = 0;
  int ds_b = 0;
  int sum() const { return ds_a + ds_b; }
  friend bool operator==(const SDoFPair&, const SDoFPair&) = default;
};

/// A transmit matrix pair with per-column family provenance. Column counts
/// always agree; a column may be all-zero on one side (one-sided families).
struct PrecoderPair {
  CMatrix v_a;  ///< na_t x L.
  CMatrix v_b;  ///< nb_t x L.
  std::vector<SubsetId> provenance;  ///< One tag per column pair (empty if untracked).
  double power = 0.0;                ///< Per-node power budget in watts.
};

/// Outcome of the ranked greedy selection: the regime label, the counts in
/// the regime's canonical phase order (7 entries for the A regimes, 6 for B
/// and C, 5 for D; the alternating phase reports total pairs), per-family
/// totals, and the realized pick order.
struct SelectionCounts {
  CaseLabel case_label = CaseLabel::D;
  std::vector<int> counts;
  std::array<int, kSubsetCount> per_subset{};
  std::vector<SubsetId> sequence;
};

/// Computes the per-family budgets from the channel realization. With
/// h_blind set, families whose generators need the self-interference
/// channels are zeroed and the shared-image family budget grows to the full
/// unconstrained intersection. Throws RankDegenerate when a channel matrix is
/// not full rank, DimensionMismatch on inconsistent shapes.
SubsetBudget subset_budgets(const ChannelSet& channels, bool h_blind = false);

/// Generates `count` column pairs from one family. Columns are deterministic
/// functions of the channels (the seed is reserved for future randomized
/// bases); within and across families the generated columns are linearly
/// independent by construction. Throws BudgetExceeded when the family cannot
/// supply `count` independent pairs.
std::pair<CMatrix, CMatrix> subset_vectors(const ChannelSet& channels, SubsetId id, int count,
                                           std::uint64_t seed, bool h_blind = false);

/// Runs the ranked greedy selection for the regime implied by `config`,
/// consuming receive-space dimensions per pick until no pick can raise the
/// sum. Pure integer arithmetic on the budgets.
SelectionCounts selection_counts(const SubsetBudget& budget, const NetworkConfig& config);

/// Closed-form maximum sum S.D.o.F. pair implied by the selection counts.
SDoFPair sum_sdof_closed_form(const SubsetBudget& budget, const NetworkConfig& config);

/// Builds the full precoding matrix pair: budgets, selection, family column
/// generation in ranked order, power normalization. The result lies in the
/// aligned set (equal eavesdropper images) and its achieved S.D.o.F. equals
/// the closed form (verified internally; InternalInconsistency otherwise).
/// With `constrained`, selection stops before the first pair that would push
/// either receiver's total stream count (arriving + self-interference) above
/// its antenna count. With `h_blind`, the construction never touches the
/// self-interference channels.
PrecoderPair construct_precoders(const ChannelSet& channels, const NetworkConfig& config,
                                 bool constrained, std::uint64_t seed, bool h_blind = false);

/// Achieved S.D.o.F. of an aligned pair: per side, the dimension the desired
/// signal contributes at the receiver outside the self-interference span.
/// Cross-checked against the receive-space rank arithmetic; disagreement
/// raises InternalInconsistency.
SDoFPair achieved_sdof(const ChannelSet& channels, const PrecoderPair& pair);

/// Signed subspace-dimension S.D.o.F. of an arbitrary (possibly unaligned)
/// pair: per side, signal contribution at the legitimate receiver minus
/// signal contribution at the eavesdropper outside the other node's cover.
SDoFPair lemma1_sdof(const ChannelSet& channels, const PrecoderPair& pair);

/// Projects an arbitrary pair onto the aligned set without decreasing either
/// signed component of lemma1_sdof: drops the column combinations whose
/// eavesdropper images are not shared, then equalizes the shared images so
/// they match exactly. Output is power-normalized.
PrecoderPair align_project(const ChannelSet& channels, const PrecoderPair& pair);

/// Relative alignment residual ||G_a V_a - G_b V_b|| / max(1, ||G_a V_a||).
double alignment_residual(const ChannelSet& channels, const PrecoderPair& pair);

/// Scales columns (common factor per column pair, preserving alignment) so
/// each side's total power approaches the budget: shared columns get the
/// binding side's equal share, one-sided columns absorb the remaining slack.
/// Traces never exceed the budget and reach it whenever attainable.
void normalize_pair_power(PrecoderPair& pair, double power_watts);

}  // namespace fdsec
