#include "wlpost/models/ergm.hpp"

#include <cmath>
#include <stdexcept>

#include "wlpost/serialize.hpp"

namespace wlpost {

namespace {
double choose2(double m) { return 0.5 * m * (m - 1.0); }
double choose3(double m) { return m * (m - 1.0) * (m - 2.0) / 6.0; }
}  // namespace

ErgmGraph::ErgmGraph(int n_actors) : n_(n_actors)
{
    if (n_actors < 1)
        throw std::invalid_argument("ErgmGraph: need at least one actor");
    adj_.assign(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), 0);
}

ErgmGraph ErgmGraph::complete(int n_actors)
{
    ErgmGraph g(n_actors);
    for (int i = 0; i < n_actors; ++i)
        for (int j = i + 1; j < n_actors; ++j)
            g.set_edge(i, j, true);
    return g;
}

void ErgmGraph::set_edge(int i, int j, bool on)
{
    if (i < 0 || j < 0 || i >= n_ || j >= n_)
        throw std::out_of_range("ErgmGraph::set_edge: node out of range");
    if (i == j)
        throw std::invalid_argument("ErgmGraph::set_edge: self-loops are not allowed");
    const std::uint8_t v = on ? 1 : 0;
    adj_[static_cast<std::size_t>(i * n_ + j)] = v;
    adj_[static_cast<std::size_t>(j * n_ + i)] = v;
}

int ErgmGraph::edge_count() const
{
    int e = 0;
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j)
            e += edge(i, j);
    return e;
}

int ErgmGraph::degree(int i) const
{
    int d = 0;
    for (int j = 0; j < n_; ++j)
        d += edge(i, j);
    return d;
}

ErgmStatistics parse_ergm_statistics(const std::string& name)
{
    if (name == "literal")
        return ErgmStatistics::Literal;
    if (name == "standard")
        return ErgmStatistics::Standard;
    throw std::invalid_argument("unknown ERGM statistic definition '" + name + "' (expected literal|standard)");
}

std::string to_string(ErgmStatistics s)
{
    return s == ErgmStatistics::Literal ? "literal" : "standard";
}

SufficientStats ergm_stats(const ErgmGraph& g, ErgmStatistics def)
{
    const int n = g.size();
    double ties = 0, two = 0, three = 0, tri = 0;
    for (int k = 0; k < n; ++k) {
        int centre_count = 0;  // lower-indexed neighbours (literal) or all neighbours (standard)
        for (int j = 0; j < n; ++j) {
            if (!g.edge(j, k))
                continue;
            if (def == ErgmStatistics::Standard || j < k)
                ++centre_count;
        }
        two += choose2(centre_count);
        three += choose3(centre_count);
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (!g.edge(i, j))
                continue;
            ties += 1;
            for (int k = j + 1; k < n; ++k)
                if (g.edge(i, k) && g.edge(j, k))
                    tri += 1;
        }
    return SufficientStats{ties, two, three, tri};
}

std::array<double, 4> ergm_change_stats(const ErgmGraph& g, int i, int j, ErgmStatistics def)
{
    if (i == j)
        throw std::invalid_argument("ergm_change_stats: self-loop");
    const int a = std::min(i, j);
    const int b = std::max(i, j);
    const int n = g.size();
    int common = 0;
    int deg_a = 0, deg_b = 0, lower_b = 0;
    for (int k = 0; k < n; ++k) {
        if (k == a || k == b)
            continue;
        const bool ea = g.edge(a, k);
        const bool eb = g.edge(b, k);
        common += ea && eb;
        deg_a += ea;
        deg_b += eb;
        lower_b += eb && k < b;
    }
    std::array<double, 4> d{1.0, 0.0, 0.0, static_cast<double>(common)};
    if (def == ErgmStatistics::Literal) {
        // only b's lower-neighbour count changes (a < b joins it)
        d[1] = lower_b;
        d[2] = choose2(lower_b);
    } else {
        d[1] = deg_a + deg_b;
        d[2] = choose2(deg_a) + choose2(deg_b);
    }
    return d;
}

std::array<double, 4> ergm_flip_sweep(ErgmGraph& g, std::span<const double> theta, ErgmStatistics def, Rng& rng)
{
    if (theta.size() != 4)
        throw std::invalid_argument("ergm_flip_sweep: theta must have 4 coordinates");
    std::array<double, 4> total{0, 0, 0, 0};
    const int n = g.size();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const auto ds = ergm_change_stats(g, i, j, def);
            const double eta = theta[0] * ds[0] + theta[1] * ds[1] + theta[2] * ds[2] + theta[3] * ds[3];
            const bool on = uniform01(rng) < 1.0 / (1.0 + std::exp(-eta));
            const bool was = g.edge(i, j);
            if (on != was) {
                g.set_edge(i, j, on);
                const double sign = on ? 1.0 : -1.0;
                for (int l = 0; l < 4; ++l)
                    total[static_cast<std::size_t>(l)] += sign * ds[static_cast<std::size_t>(l)];
            }
        }
    }
    return total;
}

ErgmSweepKernel::ErgmSweepKernel(ErgmGraph start, ErgmStatistics def)
    : g_(std::move(start)), def_(def), stats_(ergm_stats(g_, def))
{
}

void ErgmSweepKernel::sweep(std::span<const double> theta, Rng& rng)
{
    const auto d = ergm_flip_sweep(g_, theta, def_, rng);
    for (std::size_t l = 0; l < 4; ++l)
        stats_[l] += d[l];
}

void ErgmSweepKernel::save(std::ostream& os) const
{
    io::write_pod<std::int32_t>(os, g_.size());
    io::write_pod<std::uint8_t>(os, static_cast<std::uint8_t>(def_));
    io::write_vec(os, g_.adjacency());
}

void ErgmSweepKernel::load(std::istream& is)
{
    const int n = io::read_pod<std::int32_t>(is);
    const auto def = static_cast<ErgmStatistics>(io::read_pod<std::uint8_t>(is));
    const auto adj = io::read_vec<std::uint8_t>(is);
    if (n < 1 || adj.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n) || def != def_)
        throw std::runtime_error("checkpoint: corrupt ERGM state");
    ErgmGraph g(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            g.set_edge(i, j, adj[static_cast<std::size_t>(i * n + j)] != 0);
    g_ = std::move(g);
    stats_ = ergm_stats(g_, def_);
}

}  // namespace wlpost
