#pragma once

// checkpoint.bin layout (all integers little-endian, as written by io::write_pod):
//
//   magic      8 bytes  "WLPOSTCK"
//   version    u32      kCheckpointVersion
//   length     u64      payload size in bytes
//   checksum   u64      FNV-1a of the payload
//   payload    bytes    run state, in this order:
//     config text (string), phase (u8), theta steps done (u64),
//     particles (vec<f64>), observed statistics (vec<f64>),
//     image observations y (vec<f64>; empty unless imageseg),
//     Wang-Landau chain (label, c, occupancy, schedule, iteration, kernel state),
//     sample store, theta chain, adaptation state, sigma trace (vec<f64>),
//     image latent state (sigma2, theta; imageseg only), random streams (strings).
//
// Strings and vectors are u64-length-prefixed.

#include <cstdint>
#include <string>

namespace wlpost {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Writes the envelope and payload to `path` atomically (temp file + rename).
void write_checkpoint_file(const std::string& path, const std::string& payload);

/// Reads and verifies the envelope; throws std::runtime_error on a bad magic,
/// unsupported version, truncated payload or checksum mismatch.
std::string read_checkpoint_file(const std::string& path);

}  // namespace wlpost
