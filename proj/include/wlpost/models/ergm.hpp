#pragma once

// Undirected exponential random graph model with four statistics: ties,
// two-stars, three-stars and triangles.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "wlpost/core.hpp"
#include "wlpost/random.hpp"
#include "wlpost/wl_engine.hpp"

namespace wlpost {

/// Symmetric 0/1 adjacency with zero diagonal; nodes are 0-based internally.
class ErgmGraph {
public:
    explicit ErgmGraph(int n_actors);

    static ErgmGraph complete(int n_actors);

    int size() const { return n_; }
    bool edge(int i, int j) const { return adj_[static_cast<std::size_t>(i * n_ + j)] != 0; }
    void set_edge(int i, int j, bool on);
    int edge_count() const;
    int degree(int i) const;

    const std::vector<std::uint8_t>& adjacency() const { return adj_; }

    bool operator==(const ErgmGraph&) const = default;

private:
    int n_;
    std::vector<std::uint8_t> adj_;
};

/// How the star counts are indexed.
///  Literal:  S2 = sum_{i<j<k} y_ik y_jk, S3 = sum_{i<j<k<l} y_il y_jl y_kl
///            (the centre is the largest index of the tuple).
///  Standard: S2 = sum_k C(deg_k, 2), S3 = sum_k C(deg_k, 3).
/// S1 (ties) and S4 (triangles, sum_{i<j<k} y_ik y_jk y_ij) agree in both.
enum class ErgmStatistics : std::uint8_t { Literal = 0, Standard = 1 };

ErgmStatistics parse_ergm_statistics(const std::string& name);
std::string to_string(ErgmStatistics s);

SufficientStats ergm_stats(const ErgmGraph& g, ErgmStatistics def = ErgmStatistics::Literal);

/// S(g with edge ij) - S(g without edge ij), in O(n).
std::array<double, 4> ergm_change_stats(const ErgmGraph& g, int i, int j, ErgmStatistics def);

/// Systematic Gibbs sweep over dyads i<j: y_ij = 1 with probability
/// 1 / (1 + exp(-<theta, dS_ij>)). Returns the change in the statistics.
std::array<double, 4> ergm_flip_sweep(ErgmGraph& g, std::span<const double> theta, ErgmStatistics def, Rng& rng);

class ErgmSweepKernel final : public SweepKernel {
public:
    ErgmSweepKernel(ErgmGraph start, ErgmStatistics def);

    void sweep(std::span<const double> theta, Rng& rng) override;
    const SufficientStats& stats() const override { return stats_; }
    void save(std::ostream& os) const override;
    void load(std::istream& is) override;

    const ErgmGraph& graph() const { return g_; }

private:
    ErgmGraph g_;
    ErgmStatistics def_;
    SufficientStats stats_;
};

/// Edge-list text format: '#' starts a comment line; the first data line holds
/// the node count; every further line is "i j" with 1-based ids. Malformed
/// lines, out-of-range ids, self-loops and duplicates are errors reporting the
/// line number.
ErgmGraph parse_edge_list(std::istream& is, const std::string& source = "<stream>");
ErgmGraph load_edge_list(const std::string& path);

}  // namespace wlpost
