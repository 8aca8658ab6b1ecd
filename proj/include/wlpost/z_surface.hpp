#pragma once

// Smoothed partition-function surface built from the Wang-Landau history:
//
//   Z(theta) = sum_i kappa(theta, theta_i) exp(c_i) v_i(theta),
//   v_i(theta) = mean over samples recorded under label i of exp(<S(X_k), theta - theta_i>),
//
// with v_i = 0 for labels that were never visited. Everything is evaluated in log space.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

#include "wlpost/core.hpp"
#include "wlpost/wl_engine.hpp"

namespace wlpost {

struct SmoothingKernel {
    double bandwidth = 1.0;

    explicit SmoothingKernel(double h);
};

/// Median over particles of the distance to the nearest other particle; falls
/// back to 1 for a single particle or coincident particles.
double default_bandwidth(const ParticleSet& particles);

/// Normalized Gaussian weights exp(-|theta - theta_i|^2 / 2h^2) / sum_j (...).
std::vector<double> kappa_weights(std::span<const double> theta, const ParticleSet& particles,
                                  const SmoothingKernel& kernel);
std::vector<double> log_kappa_weights(std::span<const double> theta, const ParticleSet& particles,
                                      const SmoothingKernel& kernel);

/// Per-label history of sufficient statistics. Samples are held as a multiset
/// (distinct statistic vectors with multiplicities): the estimator only sums
/// over samples, so order is irrelevant and repeated integer statistics
/// collapse. With stride s, every s-th visit to a label is kept.
class SampleStore {
public:
    SampleStore(std::size_t labels, std::size_t stat_dim, std::uint64_t stride = 1);

    void record(std::size_t label, std::span<const double> stats);
    void record(std::size_t label, const SufficientStats& stats) { record(label, stats.view()); }

    std::size_t labels() const { return per_label_.size(); }
    std::size_t stat_dim() const { return stat_dim_; }
    std::uint64_t stride() const { return stride_; }

    /// N_i: visits to label i, including thinned-out ones.
    std::uint64_t visits(std::size_t label) const { return per_label_.at(label).visits; }
    /// Samples retained for label i (length of its history list).
    std::uint64_t kept(std::size_t label) const { return per_label_.at(label).kept; }
    std::uint64_t total_visits() const;
    std::size_t distinct(std::size_t label) const { return per_label_.at(label).counts.size(); }

    /// Distinct statistics of label i, row-major (distinct(label) x stat_dim), and their multiplicities.
    std::span<const double> stats_of(std::size_t label) const { return per_label_.at(label).stats; }
    std::span<const std::uint64_t> counts_of(std::size_t label) const { return per_label_.at(label).counts; }

    void save(std::ostream& os) const;
    void load(std::istream& is);

private:
    struct KeyHash {
        std::size_t operator()(const std::vector<double>& v) const noexcept;
    };
    struct LabelHistory {
        std::uint64_t visits = 0;
        std::uint64_t kept = 0;
        std::vector<double> stats;
        std::vector<std::uint64_t> counts;
        std::unordered_map<std::vector<double>, std::size_t, KeyHash> index;
    };

    void append(LabelHistory& h, std::span<const double> stats, std::uint64_t count);

    std::size_t stat_dim_;
    std::uint64_t stride_;
    std::vector<LabelHistory> per_label_;
};

/// log v_i(theta); -inf for an unvisited label (the 0/0 = 0 convention).
double log_importance_ratio(const SampleStore& store, std::size_t label, std::span<const double> theta,
                            std::span<const double> particle);
/// v_i(theta); 0 for an unvisited label.
double importance_ratio(const SampleStore& store, std::size_t label, std::span<const double> theta,
                        std::span<const double> particle);

/// Read-only view over (store, particles, c snapshot, kernel). Evaluation is a
/// pure function of the view; c is copied at construction.
class ZSurface {
public:
    ZSurface(const SampleStore& store, const ParticleSet& particles, std::span<const double> c,
             SmoothingKernel kernel);

    /// log Z(theta), up to a theta-independent constant. Throws std::logic_error
    /// when no label has been visited.
    double log_z(std::span<const double> theta) const;
    double operator()(std::span<const double> theta) const { return log_z(theta); }

    /// omega_i = exp(c_i) / sum_j exp(c_j).
    std::vector<double> normalized_weights() const;

    const SmoothingKernel& kernel() const { return kernel_; }

private:
    const SampleStore* store_;
    const ParticleSet* particles_;
    std::vector<double> c_;
    SmoothingKernel kernel_;
};

double log_z_surface(const ZSurface& surface, const ParameterPoint& theta);

}  // namespace wlpost
