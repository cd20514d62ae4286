#pragma once

// Run configuration: a JSON document validated against every module's
// invariants before anything runs.

#include "nlsball/deterministic_flow.hpp"
#include "nlsball/functionals.hpp"
#include "nlsball/measure_lab.hpp"
#include "nlsball/stochastic_flow.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nlsball {

enum class Command {
    SimulateDet,
    SimulateSde,
    StationaryStats,
    InviscidSweep,
    GrowthCheck,
    VerifyCounting,
    VerifyEigenNorms,
    VerifyProductNorms,
    VerifyMultilinear,
    VerifyRadialSobolev,
};

std::string_view to_string(Command c);
Command parse_command(std::string_view s);
const std::vector<std::string_view>& command_names();

/// One (mode, re, im) triple per nonzero initial coefficient.
struct InitialData {
    std::vector<std::pair<std::size_t, complex>> modes;
    SpectralField build(std::size_t dim) const;
};

struct DetSection {
    FlowConfig flow;
    InitialData initial;
    std::size_t observe_every = 100;
    std::vector<double> sobolev_indices{1.0};
    bool check_conservation = false;
    double conservation_tolerance = 1e-6;
    double picard_sobolev = 1.6;
};

struct SdeSection {
    SdeConfig sde;
    InitialData initial;
    std::size_t trajectories = 16;
    std::size_t observe_every = 10;
    double admissibility_threshold = 1e3;
};

struct StationarySection {
    StationaryOptions options;
    std::size_t tail_points = 6;
    double tail_decades = 1.0;
};

struct SweepSection {
    std::vector<double> alphas{0.2, 0.1, 0.05};
    bool scale_horizon = true;
};

struct GrowthSection {
    FlowConfig flow;          // T, dt of the deterministic runs
    std::size_t samples = 4;  // stationary states used as data
    double sigma = 1.19;      // Sobolev index of the envelope
    Gauge xi = Gauge::Sqrt;
    std::size_t observe_every = 100;
    std::optional<int> offset;
    /// Stationary checkpoint to draw data from; empty runs a fresh stationary ensemble.
    std::string checkpoint;
};

struct CountingSection {
    std::vector<std::uint64_t> ladder{16, 32, 64, 128, 256, 512, 1024};
    std::uint64_t oracle_max_M = 10'000;
    std::uint64_t oracle_N = 8;
    std::vector<std::uint64_t> lambda_ladder{4, 8, 16, 32};
};

struct EigenNormSection {
    std::vector<double> p{4.0, 6.0};
    std::vector<std::size_t> ladder{16, 32, 64, 128, 256, 512};
    std::size_t resolution = 4096;
};

struct ProductNormSection {
    int m = 3;
    std::vector<std::size_t> ladder{8, 16, 32, 64, 128};
    std::size_t resolution = 2048;
};

struct MultilinearSection {
    int m = 3;
    std::vector<std::size_t> ladder{8, 16, 32, 64};
    std::size_t draws = 20;
    std::size_t time_factor = 4;
    bool derivative = false;
};

struct RadialSobolevSection {
    std::size_t samples = 1000;
    std::size_t dim = 256;
};

struct RunConfig {
    Command command = Command::SimulateDet;
    std::uint64_t master_seed = 0;
    std::size_t workers = 1;
    std::filesystem::path output_dir = "out";
    std::size_t dim = 8;

    DetSection det;
    SdeSection sde;
    StationarySection stationary;
    SweepSection sweep;
    GrowthSection growth;
    CountingSection counting;
    EigenNormSection eigen_norms;
    ProductNormSection product_norms;
    MultilinearSection multilinear;
    RadialSobolevSection radial_sobolev;

    /// Normalized tree with every default filled in (excludes output_dir and workers).
    nlohmann::ordered_json canonical;
    std::uint64_t hash = 0;
};

/// Command-line values that replace the file's.
struct ConfigOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::optional<std::filesystem::path> output_dir;
};

/// Parses, fills defaults, validates. Throws ValidationError with the line and
/// column of a syntax error, the path of an unknown key, or the violated invariant.
RunConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});
RunConfig parse_config(std::string_view text, const ConfigOverrides& overrides = {});

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

} // namespace nlsball
