#pragma once

// Brute-force ground truth on small instances: exact partition functions by
// enumerating every state, exact posterior moments by quadrature.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wlpost/core.hpp"
#include "wlpost/models/ergm.hpp"
#include "wlpost/models/ising.hpp"

namespace wlpost {

/// All states of a small model, summarized by their sufficient statistics.
/// Keeps both the per-state statistics (in enumeration order, for exact state
/// probabilities) and the collapsed multiset (for fast Z evaluation).
class EnumerableInstance {
public:
    static constexpr std::uint64_t max_states = std::uint64_t{1} << 20;

    /// State index: bit i set <=> spin i (row-major) is +1.
    static EnumerableInstance ising(int rows, int cols);
    /// State index: bit k set <=> the k-th dyad (i<j, lexicographic) is a tie.
    static EnumerableInstance ergm(int n_actors, ErgmStatistics def = ErgmStatistics::Literal);
    /// Generic constructor from per-state statistics, row-major (states x stat_dim).
    EnumerableInstance(std::string kind, std::size_t stat_dim, std::vector<double> per_state_stats);

    const std::string& kind() const { return kind_; }
    std::size_t stat_dim() const { return k_; }
    std::uint64_t state_count() const { return n_states_; }

    std::span<const double> state_stats(std::uint64_t s) const { return {per_state_.data() + s * k_, k_}; }
    std::size_t distinct_count() const { return multiplicity_.size(); }
    std::span<const double> distinct_stats(std::size_t j) const { return {distinct_.data() + j * k_, k_}; }
    double multiplicity(std::size_t j) const { return multiplicity_[j]; }

    /// The instance seen through a subset of statistic coordinates (the others
    /// are held at parameter value 0).
    EnumerableInstance restrict(const std::vector<std::size_t>& coords) const;

private:
    std::string kind_;
    std::size_t k_;
    std::uint64_t n_states_;
    std::vector<double> per_state_;
    std::vector<double> distinct_;
    std::vector<double> multiplicity_;
};

/// log sum_x exp(<S(x), theta>).
double exact_log_z(const EnumerableInstance& inst, std::span<const double> theta);
double exact_log_z(const EnumerableInstance& inst, const ParameterPoint& theta);

/// E_theta[S(X)].
std::vector<double> exact_mean_stats(const EnumerableInstance& inst, std::span<const double> theta);

/// P_theta(state s) for every state in enumeration order.
std::vector<double> exact_state_probabilities(const EnumerableInstance& inst, std::span<const double> theta);

std::uint64_t ising_state_index(const IsingLattice& lat);
IsingLattice ising_state_from_index(int rows, int cols, std::uint64_t index);
std::uint64_t ergm_graph_index(const ErgmGraph& g);
ErgmGraph ergm_graph_from_index(int n_actors, std::uint64_t index);

/// Conditional law of the latent image given (y, theta, sigma2), over all
/// 2^(rows*cols) images in ising_state_index order.
std::vector<double> image_conditional_probabilities(int rows, int cols, double theta, std::span<const double> y,
                                                    double sigma2);

struct QuadratureSpec {
    std::size_t initial_intervals = 64;  // per coordinate
    std::size_t max_intervals = std::size_t{1} << 16;
    double tolerance = 1e-6;
    bool prior_only = false;  // ignore the likelihood: posterior = uniform prior
};

struct ExactPosterior {
    ParameterPoint mean;
    std::vector<double> q025;
    std::vector<double> q975;
    std::size_t intervals = 0;  // per coordinate, at convergence
};

/// Trapezoid-rule moments of pi(theta) ∝ exp(<observed, theta> - log Z(theta))
/// over the closed box. The grid doubles until successive means and quantiles
/// change by less than the tolerance. Requires q <= 2.
ExactPosterior exact_posterior_mean(const EnumerableInstance& inst, const SufficientStats& observed, const Box& box,
                                    const QuadratureSpec& spec = {});

}  // namespace wlpost
