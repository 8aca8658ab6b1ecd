#pragma once

// Propp-Wilson coupling from the past for the ferromagnetic Ising model.
// The all-plus and all-minus chains are driven by the same heat-bath uniforms
// from time -T; T doubles (1, 2, 4, ...) and the randomness attached to each
// past time step is reused across restarts.

#include <cstdint>

#include "wlpost/models/ising.hpp"
#include "wlpost/random.hpp"

namespace wlpost {

struct CftpOptions {
    std::uint64_t max_sweeps = std::uint64_t{1} << 20;
};

struct CftpResult {
    IsingLattice sample;
    std::uint64_t horizon = 0;             // T at coalescence
    std::uint64_t total_sweeps = 0;        // coupled sweeps over all restarts
    std::uint64_t monotonicity_checks = 0; // sweeps after which top >= bottom was verified
};

/// Exact draw from exp(theta E(x)) / Z(theta). Requires theta >= 0. Throws
/// std::runtime_error if the chains have not coalesced by `max_sweeps`, and
/// std::logic_error if the monotone ordering is ever violated.
CftpResult cftp_sample_detailed(int rows, int cols, double theta, Rng& rng, const CftpOptions& options = {});
IsingLattice cftp_sample(int rows, int cols, double theta, Rng& rng, const CftpOptions& options = {});

}  // namespace wlpost
