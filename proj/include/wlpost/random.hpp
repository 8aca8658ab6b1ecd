#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <string_view>

namespace wlpost {

using Rng = std::mt19937_64;

/// Deterministically derives an independent named substream from a root seed,
/// so that adding draws to one component never perturbs another.
Rng make_stream(std::uint64_t root_seed, std::string_view name);

std::uint64_t splitmix64(std::uint64_t& state);

/// Uniform on [0,1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform on (0,1); safe to take the log of.
inline double uniform_open01(Rng& rng) { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; }

double standard_normal(Rng& rng);

/// Index i such that sum_{j<i} p_j <= u < sum_{j<=i} p_j; falls back to the last
/// positive-probability index when rounding leaves u past the total.
std::size_t sample_categorical(std::span<const double> probs, double u);

std::string serialize_rng(const Rng& rng);
void deserialize_rng(Rng& rng, const std::string& text);

}  // namespace wlpost
