#pragma once

// Run configuration: a flat key=value file ('#' comments) plus overrides.
// Keys left unset take the defaults of the selected model.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace wlpost {

enum class ModelKind { Ising, ImageSeg, Ergm };

ModelKind parse_model_kind(const std::string& s);
std::string to_string(ModelKind m);

struct RunConfig {
    ModelKind model = ModelKind::Ising;

    // data
    int rows = 64;
    int cols = 64;
    double theta_true = 0.40;
    double sigma_true = 0.5;  // image noise standard deviation
    std::string ergm_edges;   // edge-list path; defaults to the bundled Florentine file
    std::string ergm_stats = "literal";

    // prior box (cube); model default when unset
    std::optional<double> prior_lower;
    std::optional<double> prior_upper;

    // particles
    std::size_t particles = 100;
    std::string particle_source = "uniform";  // uniform | gaussian
    double particle_mean = 0.0;
    double particle_variance = 5.0;
    double bandwidth = 0.0;  // 0 = median nearest-neighbour distance

    // Wang-Landau
    double gamma0 = 1.0;
    double eps1 = 1e-3;
    double eps2 = 0.2;
    double tail_exponent = 0.7;
    std::uint64_t recenter_interval = 10000;
    int sweeps_per_step = 1;
    std::uint64_t store_stride = 1;
    bool record_from_start = true;  // include the flat-histogram phase in the surface
    std::uint64_t max_wl_iterations = 200000000;
    std::uint64_t cftp_max_sweeps = std::uint64_t{1} << 20;

    // theta chain
    std::uint64_t theta_steps = 10000;
    std::uint64_t burn_in = 1999;
    std::string proposal = "reflected";  // reflected | gaussian
    double proposal_scale = 0.0;         // 0 = default (0.1 box width, or 2.38/sqrt(q))
    double target_accept = 0.30;
    double adapt_scale_exponent = 0.6;
    double adapt_moment_exponent = 1.0;
    std::uint64_t adapt_blend_after = 1000;

    // run control and outputs
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> data_seed;  // data generation only; defaults to seed
    std::string out = "out";
    std::uint64_t checkpoint_interval = 0;  // theta steps between checkpoints; 0 = only at the end
    std::size_t acf_max_lag = 50;
    std::size_t histogram_bins = 50;
    std::string surface_grid;  // lo:hi:steps; empty = 101 points across the box

    double box_lower() const;
    double box_upper() const;
    std::size_t theta_dim() const { return model == ModelKind::Ergm ? 4 : 1; }

    /// Throws std::invalid_argument naming the offending key.
    void validate() const;
};

/// Model defaults (size, particles, proposal, chain length) for a given model.
RunConfig default_config(ModelKind model);

/// Applies one key=value setting. Unknown keys and unparsable values throw.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Parses a config document. The `model` key, when present, is applied first so
/// that its defaults do not clobber later keys.
RunConfig parse_config(std::istream& is, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

/// Canonical key=value text (every key, fixed order, 17 significant digits).
std::string config_to_text(const RunConfig& cfg);

struct GridSpec {
    double lo = 0.0;
    double hi = 1.0;
    std::size_t steps = 101;  // number of points, inclusive of both ends
};

GridSpec parse_grid(const std::string& text);

}  // namespace wlpost
