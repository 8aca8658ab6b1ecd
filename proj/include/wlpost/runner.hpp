#pragma once

// Experiment orchestration. A run has three phases:
//   data         simulate the data set (CFTP, noisy image) or load the edge list
//   wl-flat      Wang-Landau chain alone until gamma <= eps1
//   joint        Wang-Landau + theta chain for `theta_steps` steps
// and writes trace.csv, logz.csv, summary.json, histogram CSVs and
// checkpoint.bin into the output directory. Identical (config, seed) give
// byte-identical files, also across checkpoint/resume.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wlpost/config.hpp"
#include "wlpost/core.hpp"
#include "wlpost/diagnostics.hpp"
#include "wlpost/theta_sampler.hpp"

namespace wlpost {

/// Raised for any failure inside a run; the message names the phase and iteration.
class RunError : public std::runtime_error {
public:
    RunError(const std::string& phase, std::uint64_t iteration, const std::string& what);
    const std::string& phase() const { return phase_; }
    std::uint64_t iteration() const { return iteration_; }

private:
    std::string phase_;
    std::uint64_t iteration_;
};

struct RunControls {
    bool resume = false;                        // continue from <out>/checkpoint.bin
    std::optional<std::uint64_t> stop_after;    // stop (with a checkpoint) after this many theta steps
    double weight_shift = 0.0;                  // added to every log-weight when the theta chain starts
    bool write_outputs = true;
    std::ostream* log = nullptr;                // progress messages
};

struct RunResult {
    RunConfig config;
    SufficientStats observed;
    ThetaChain chain{ParameterPoint{0.0}};
    std::vector<double> sigma_trace;  // image segmentation only
    ChainSummary summary;
    std::optional<ChainSummary> sigma_summary;
    std::uint64_t wl_iterations_flat = 0;   // WL iterations before the theta chain started
    std::uint64_t wl_iterations_total = 0;
    std::size_t halvings = 0;
    double final_gamma = 0.0;
    double bandwidth = 0.0;
    double final_half_acceptance = 0.0;
    bool completed = false;
    double seconds = 0.0;
};

RunResult run_experiment(const RunConfig& config, const RunControls& controls = {});

struct SurfaceRow {
    std::vector<double> theta;
    double log_z = 0.0;
};

/// log Z_n on a grid. Uses <out>/checkpoint.bin when it exists (the state of a
/// finished or interrupted run), otherwise runs the data and wl-flat phases.
/// For q > 1 the grid runs along each coordinate axis through the box centre.
std::vector<SurfaceRow> surface_on_grid(const RunConfig& config, const GridSpec& grid, std::ostream* log = nullptr);
void write_surface_csv(const std::vector<SurfaceRow>& rows, const std::string& path);

}  // namespace wlpost
