#pragma once

#include "fdsec/channel.hpp"
#include "fdsec/precoder.hpp"

namespace fdsec {

/// Matched-filter reference: each node sends one stream at full power along
/// the strongest right singular direction of its forward channel, ignoring
/// both the eavesdropper and the self-interference links.
PrecoderPair mf_precoders(const ChannelSet& channels, double power_watts);

/// Zero-forcing reference with a matched-filter fallback per side.
struct ZfResult {
  PrecoderPair pair;
  bool fallback_a = false;  ///< A had no self-interference null space.
  bool fallback_b = false;  ///< B had no self-interference null space.
};

/// Zero-forcing reference: each node sends one stream at full power inside
/// the null space of its own self-interference channel, along the direction
/// with the largest forward gain. A side whose null space is empty falls back
/// to its matched-filter beam and reports the fallback flag.
ZfResult zf_precoders(const ChannelSet& channels, double power_watts);

/// Half-duplex rewiring of a node configuration: A keeps all its antennas for
/// transmission only, B keeps one transmit antenna and converts the rest to
/// receive antennas. Already one-way configurations are returned unchanged.
NetworkConfig oneway_config(const NetworkConfig& config);

}  // namespace fdsec
