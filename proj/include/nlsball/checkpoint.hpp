#pragma once

// Binary trajectory checkpoints.
//
// Layout (all little-endian):
//   bytes 0..7   magic "NLSBCKPT"
//   u32          format version (1)
//   u64          config hash
//   u64          master seed
//   u64          dimension N
//   records until end of file:
//     f64        time
//     2N x f64   coefficients, interleaved real/imag

#include "nlsball/radial_spectral.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace nlsball {

inline constexpr char checkpoint_magic[8] = {'N', 'L', 'S', 'B', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t checkpoint_version = 1;

struct CheckpointHeader {
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    std::uint64_t dim = 0;
};

struct Snapshot {
    double time = 0.0;
    SpectralField state;
};

struct Checkpoint {
    CheckpointHeader header;
    std::vector<Snapshot> snapshots;
};

void write_checkpoint(std::ostream& os, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& is);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

} // namespace nlsball
