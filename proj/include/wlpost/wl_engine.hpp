#pragma once

// Wang-Landau chain on (X, label, c): a state X moved by a model kernel at the
// current particle, a label redrawn from p_i ∝ exp(<S(X), theta_i> - c_i), and a
// Rao-Blackwellized stochastic-approximation update of the log-weights c. The
// step size follows a flat-histogram halving schedule, then a deterministic
// eps1 / n^0.7 tail.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "wlpost/core.hpp"
#include "wlpost/random.hpp"

namespace wlpost {

/// d fixed parameter points, stored row-major. Immutable after construction.
class ParticleSet {
public:
    ParticleSet(std::vector<ParameterPoint> points, const Box& bounds);

    static ParticleSet uniform(const Box& bounds, std::size_t d, Rng& rng);
    /// iid N(mean, variance) per coordinate, redrawing any coordinate that falls outside the box.
    static ParticleSet gaussian(const Box& bounds, std::size_t d, double mean, double variance, Rng& rng);

    std::size_t size() const { return d_; }
    std::size_t dim() const { return q_; }
    std::span<const double> point(std::size_t i) const { return {coords_.data() + i * q_, q_}; }
    ParameterPoint at(std::size_t i) const;
    std::span<const double> flat() const { return coords_; }

private:
    std::size_t d_ = 0;
    std::size_t q_ = 0;
    std::vector<double> coords_;
};

/// Log-scale partition-function estimates, one per particle. Only differences
/// carry meaning.
struct LogWeightVector {
    std::vector<double> c;

    LogWeightVector() = default;
    explicit LogWeightVector(std::vector<double> v) : c(std::move(v)) {}
    static LogWeightVector zeros(std::size_t d) { return LogWeightVector(std::vector<double>(d, 0.0)); }

    std::size_t size() const { return c.size(); }
    double sum() const;
    /// Subtracts the mean so that mean(c) = 0.
    void recenter();
};

enum class SchedulePhase : std::uint8_t { FlatHistogram = 0, Deterministic = 1 };

struct StepSchedule {
    double gamma = 1.0;
    double eps1 = 1e-3;
    double eps2 = 0.2;
    double tail_exponent = 0.7;
    SchedulePhase phase = SchedulePhase::FlatHistogram;
    std::uint64_t n_det = 0;

    void validate() const;
};

struct ScheduleUpdate {
    StepSchedule schedule;
    bool reset_occupancy = false;
};

/// p_i ∝ exp(<x_stats, theta_i> - c_i), max-shifted.
std::vector<double> label_distribution(const SufficientStats& x_stats, const ParticleSet& particles,
                                       const LogWeightVector& weights);
void label_distribution(std::span<const double> x_stats, const ParticleSet& particles,
                        std::span<const double> c, std::vector<double>& scratch, std::vector<double>& probs);

/// c'_i = c_i + gamma * probs_i.
LogWeightVector rao_blackwell_update(const LogWeightVector& weights, std::span<const double> probs, double gamma);

/// max_i |v_i / sum(v) - 1/d| <= eps2 / d. All-zero occupancy is never flat.
bool flat_histogram_test(std::span<const std::uint64_t> occupancy, double eps2);

/// Flat-histogram phase: halve gamma on a flat histogram (signalling an occupancy
/// reset) and switch to the deterministic tail once gamma <= eps1, with n_det = 1.
/// Deterministic phase: n_det += 1 and gamma = eps1 / n_det^tail_exponent.
ScheduleUpdate next_gamma(const StepSchedule& schedule, bool flat);

/// A model-specific MCMC kernel on the sample space. One `sweep` must leave
/// exp(<S(x), theta>) / Z(theta) invariant; the kernel tracks S of its current state.
class SweepKernel {
public:
    virtual ~SweepKernel() = default;
    virtual void sweep(std::span<const double> theta, Rng& rng) = 0;
    virtual const SufficientStats& stats() const = 0;
    virtual void save(std::ostream& os) const = 0;
    virtual void load(std::istream& is) = 0;
};

struct WlOptions {
    double gamma0 = 1.0;
    double eps1 = 1e-3;
    double eps2 = 0.2;
    double tail_exponent = 0.7;
    std::uint64_t recenter_interval = 10000;  // 0 disables
    int sweeps_per_step = 1;
    bool log_halvings = false;
};

struct WlState {
    SufficientStats x_stats;
    std::size_t label = 0;  // 0-based
    LogWeightVector weights;
    std::vector<std::uint64_t> occupancy;
    StepSchedule schedule;
    std::uint64_t iteration = 0;
};

/// Snapshot of a halving: the occupancy that passed the flatness test.
struct HalvingEvent {
    std::uint64_t iteration = 0;
    double gamma_before = 0.0;
    double eps2 = 0.0;
    std::vector<std::uint64_t> occupancy;
};

/// What one step produced, for the sample store and for mechanism checks.
struct WlStepOutcome {
    std::size_t label = 0;
    double gamma_used = 0.0;
    double weight_sum_increment = 0.0;  // sum_i (c_{n+1}(i) - c_n(i)), before any recentering
    bool halved = false;
    bool entered_deterministic = false;
    bool recentered = false;
};

struct WlCheckpointRecord {
    std::uint64_t iteration;
    double gamma;
    SchedulePhase phase;
    std::vector<double> c;
    std::vector<std::uint64_t> occupancy;
};

class WangLandauChain {
public:
    WangLandauChain(ParticleSet particles, std::unique_ptr<SweepKernel> kernel, WlOptions options,
                    std::size_t initial_label = 0);

    WlStepOutcome step(Rng& kernel_rng, Rng& label_rng);

    const WlState& state() const { return state_; }
    const ParticleSet& particles() const { return particles_; }
    const SweepKernel& kernel() const { return *kernel_; }
    const WlOptions& options() const { return options_; }
    const std::vector<double>& last_probs() const { return probs_; }
    bool deterministic() const { return state_.schedule.phase == SchedulePhase::Deterministic; }

    /// Adds a to every c entry. Only differences of c are meaningful, so this
    /// must not change any downstream decision.
    void shift_weights(double a);

    const std::vector<HalvingEvent>& halving_log() const { return halvings_; }
    WlCheckpointRecord checkpoint_record() const;

    void save(std::ostream& os) const;
    void load(std::istream& is);

private:
    ParticleSet particles_;
    std::unique_ptr<SweepKernel> kernel_;
    WlOptions options_;
    WlState state_;
    std::vector<HalvingEvent> halvings_;
    std::vector<double> scratch_;
    std::vector<double> probs_;
};

}  // namespace wlpost
