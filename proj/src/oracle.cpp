#include "wlpost/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "wlpost/numeric.hpp"

namespace wlpost {

EnumerableInstance::EnumerableInstance(std::string kind, std::size_t stat_dim, std::vector<double> per_state_stats)
    : kind_(std::move(kind)), k_(stat_dim), per_state_(std::move(per_state_stats))
{
    if (k_ == 0)
        throw std::invalid_argument("EnumerableInstance: statistic dimension must be positive");
    if (per_state_.empty() || per_state_.size() % k_ != 0)
        throw std::invalid_argument("EnumerableInstance: per-state statistics do not form whole rows");
    n_states_ = per_state_.size() / k_;
    if (n_states_ > max_states)
        throw std::length_error("EnumerableInstance: state space larger than 2^20");

    std::map<std::vector<double>, double> ms;
    for (std::uint64_t s = 0; s < n_states_; ++s) {
        auto row = state_stats(s);
        ms[std::vector<double>(row.begin(), row.end())] += 1.0;
    }
    distinct_.reserve(ms.size() * k_);
    multiplicity_.reserve(ms.size());
    for (const auto& [stats, count] : ms) {
        distinct_.insert(distinct_.end(), stats.begin(), stats.end());
        multiplicity_.push_back(count);
    }
}

EnumerableInstance EnumerableInstance::ising(int rows, int cols)
{
    if (rows < 1 || cols < 1)
        throw std::invalid_argument("EnumerableInstance::ising: lattice dimensions must be positive");
    const int sites = rows * cols;
    if (sites > 20)
        throw std::length_error("EnumerableInstance::ising: state space larger than 2^20");
    const std::uint64_t n = std::uint64_t{1} << sites;
    std::vector<double> stats(n);
    for (std::uint64_t s = 0; s < n; ++s) {
        int e = 0;
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) {
                const int i = r * cols + c;
                const int xi = (s >> i) & 1U ? 1 : -1;
                if (c + 1 < cols)
                    e += xi * (((s >> (i + 1)) & 1U) ? 1 : -1);
                if (r + 1 < rows)
                    e += xi * (((s >> (i + cols)) & 1U) ? 1 : -1);
            }
        stats[s] = e;
    }
    return EnumerableInstance("ising " + std::to_string(rows) + "x" + std::to_string(cols), 1, std::move(stats));
}

EnumerableInstance EnumerableInstance::ergm(int n_actors, ErgmStatistics def)
{
    if (n_actors < 2)
        throw std::invalid_argument("EnumerableInstance::ergm: need at least two actors");
    const int dyads = n_actors * (n_actors - 1) / 2;
    if (dyads > 20)
        throw std::length_error("EnumerableInstance::ergm: state space larger than 2^20");
    const std::uint64_t n = std::uint64_t{1} << dyads;
    std::vector<double> stats;
    stats.reserve(n * 4);
    for (std::uint64_t s = 0; s < n; ++s) {
        const auto st = ergm_stats(ergm_graph_from_index(n_actors, s), def);
        stats.insert(stats.end(), st.values.begin(), st.values.end());
    }
    return EnumerableInstance("ergm " + std::to_string(n_actors) + " " + to_string(def), 4, std::move(stats));
}

EnumerableInstance EnumerableInstance::restrict(const std::vector<std::size_t>& coords) const
{
    if (coords.empty())
        throw std::invalid_argument("EnumerableInstance::restrict: no coordinates");
    for (auto c : coords)
        if (c >= k_)
            throw std::out_of_range("EnumerableInstance::restrict: coordinate out of range");
    std::vector<double> stats;
    stats.reserve(n_states_ * coords.size());
    for (std::uint64_t s = 0; s < n_states_; ++s) {
        auto row = state_stats(s);
        for (auto c : coords)
            stats.push_back(row[c]);
    }
    return EnumerableInstance(kind_ + " (restricted)", coords.size(), std::move(stats));
}

double exact_log_z(const EnumerableInstance& inst, std::span<const double> theta)
{
    if (theta.size() != inst.stat_dim())
        throw std::invalid_argument("exact_log_z: theta dimension does not match the instance");
    std::vector<double> terms(inst.distinct_count());
    for (std::size_t j = 0; j < terms.size(); ++j)
        terms[j] = std::log(inst.multiplicity(j)) + dot(inst.distinct_stats(j), theta);
    return log_sum_exp(terms);
}

double exact_log_z(const EnumerableInstance& inst, const ParameterPoint& theta)
{
    return exact_log_z(inst, theta.view());
}

std::vector<double> exact_mean_stats(const EnumerableInstance& inst, std::span<const double> theta)
{
    if (theta.size() != inst.stat_dim())
        throw std::invalid_argument("exact_mean_stats: theta dimension does not match the instance");
    std::vector<double> logits(inst.distinct_count());
    for (std::size_t j = 0; j < logits.size(); ++j)
        logits[j] = std::log(inst.multiplicity(j)) + dot(inst.distinct_stats(j), theta);
    const auto p = softmax(logits);
    std::vector<double> mean(inst.stat_dim(), 0.0);
    for (std::size_t j = 0; j < p.size(); ++j) {
        auto s = inst.distinct_stats(j);
        for (std::size_t l = 0; l < mean.size(); ++l)
            mean[l] += p[j] * s[l];
    }
    return mean;
}

std::vector<double> exact_state_probabilities(const EnumerableInstance& inst, std::span<const double> theta)
{
    if (theta.size() != inst.stat_dim())
        throw std::invalid_argument("exact_state_probabilities: theta dimension does not match the instance");
    std::vector<double> logits(inst.state_count());
    for (std::uint64_t s = 0; s < inst.state_count(); ++s)
        logits[s] = dot(inst.state_stats(s), theta);
    return softmax(logits);
}

std::uint64_t ising_state_index(const IsingLattice& lat)
{
    if (lat.size() > 63)
        throw std::length_error("ising_state_index: lattice too large to index");
    std::uint64_t idx = 0;
    for (int i = 0; i < lat.size(); ++i)
        if (lat[i] > 0)
            idx |= std::uint64_t{1} << i;
    return idx;
}

IsingLattice ising_state_from_index(int rows, int cols, std::uint64_t index)
{
    IsingLattice lat(rows, cols, -1);
    for (int i = 0; i < lat.size(); ++i)
        if ((index >> i) & 1U)
            lat[i] = 1;
    return lat;
}

std::uint64_t ergm_graph_index(const ErgmGraph& g)
{
    const int n = g.size();
    if (n * (n - 1) / 2 > 63)
        throw std::length_error("ergm_graph_index: graph too large to index");
    std::uint64_t idx = 0;
    int k = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j, ++k)
            if (g.edge(i, j))
                idx |= std::uint64_t{1} << k;
    return idx;
}

ErgmGraph ergm_graph_from_index(int n_actors, std::uint64_t index)
{
    ErgmGraph g(n_actors);
    int k = 0;
    for (int i = 0; i < n_actors; ++i)
        for (int j = i + 1; j < n_actors; ++j, ++k)
            if ((index >> k) & 1U)
                g.set_edge(i, j, true);
    return g;
}

std::vector<double> image_conditional_probabilities(int rows, int cols, double theta, std::span<const double> y,
                                                    double sigma2)
{
    if (y.size() != static_cast<std::size_t>(rows * cols))
        throw std::invalid_argument("image_conditional_probabilities: observation size mismatch");
    if (!(sigma2 > 0.0))
        throw std::invalid_argument("image_conditional_probabilities: sigma2 must be positive");
    const auto inst = EnumerableInstance::ising(rows, cols);
    std::vector<double> logits(inst.state_count());
    for (std::uint64_t s = 0; s < inst.state_count(); ++s) {
        double ssr = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double x = ((s >> i) & 1U) ? 1.0 : -1.0;
            ssr += (y[i] - x) * (y[i] - x);
        }
        logits[s] = theta * inst.state_stats(s)[0] - ssr / (2.0 * sigma2);
    }
    return softmax(logits);
}

namespace {

// Quantile of a piecewise-linear density given on a uniform grid, integrating
// each trapezoid exactly.
double grid_quantile(const std::vector<double>& x, const std::vector<double>& f, double prob)
{
    const std::size_t n = x.size() - 1;
    const double h = x[1] - x[0];
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        total += 0.5 * h * (f[k] + f[k + 1]);
    const double target = prob * total;
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double piece = 0.5 * h * (f[k] + f[k + 1]);
        if (acc + piece >= target) {
            // solve fa t + (fb - fa) t^2 / (2h) = r for t in [0, h]
            const double r = target - acc;
            const double fa = f[k];
            const double slope = (f[k + 1] - fa) / h;
            double t;
            if (std::abs(slope) < 1e-300) {
                t = fa > 0.0 ? r / fa : 0.0;
            } else {
                const double disc = std::max(0.0, fa * fa + 2.0 * slope * r);
                t = (std::sqrt(disc) - fa) / slope;
            }
            return x[k] + std::clamp(t, 0.0, h);
        }
        acc += piece;
    }
    return x.back();
}

struct Grid1 {
    std::vector<double> x;
    std::vector<double> w;  // trapezoid weights
};

Grid1 make_grid(double lo, double hi, std::size_t intervals)
{
    Grid1 g;
    const double h = (hi - lo) / static_cast<double>(intervals);
    g.x.resize(intervals + 1);
    g.w.assign(intervals + 1, h);
    for (std::size_t k = 0; k <= intervals; ++k)
        g.x[k] = lo + h * static_cast<double>(k);
    g.x.back() = hi;
    g.w.front() = g.w.back() = 0.5 * h;
    return g;
}

ExactPosterior posterior_on_grid(const EnumerableInstance& inst, const SufficientStats& observed, const Box& box,
                                 const QuadratureSpec& spec, std::size_t intervals)
{
    const std::size_t q = box.dim();
    auto log_density = [&](std::span<const double> t) {
        return spec.prior_only ? 0.0 : dot(observed.view(), t) - exact_log_z(inst, t);
    };
    ExactPosterior out;
    out.intervals = intervals;
    if (q == 1) {
        const auto g = make_grid(box.lower[0], box.upper[0], intervals);
        std::vector<double> lf(g.x.size());
        for (std::size_t k = 0; k < g.x.size(); ++k)
            lf[k] = log_density(std::span<const double>(&g.x[k], 1));
        const double mx = *std::max_element(lf.begin(), lf.end());
        std::vector<double> f(lf.size());
        double z = 0.0, m = 0.0;
        for (std::size_t k = 0; k < f.size(); ++k) {
            f[k] = std::exp(lf[k] - mx);
            z += g.w[k] * f[k];
            m += g.w[k] * f[k] * g.x[k];
        }
        out.mean = ParameterPoint{m / z};
        out.q025 = {grid_quantile(g.x, f, 0.025)};
        out.q975 = {grid_quantile(g.x, f, 0.975)};
        return out;
    }
    // q == 2: tensor-product trapezoid
    const auto g0 = make_grid(box.lower[0], box.upper[0], intervals);
    const auto g1 = make_grid(box.lower[1], box.upper[1], intervals);
    const std::size_t n0 = g0.x.size(), n1 = g1.x.size();
    std::vector<double> lf(n0 * n1);
    double t[2];
    for (std::size_t a = 0; a < n0; ++a)
        for (std::size_t b = 0; b < n1; ++b) {
            t[0] = g0.x[a];
            t[1] = g1.x[b];
            lf[a * n1 + b] = log_density(std::span<const double>(t, 2));
        }
    const double mx = *std::max_element(lf.begin(), lf.end());
    std::vector<double> marg0(n0, 0.0), marg1(n1, 0.0);
    for (std::size_t a = 0; a < n0; ++a)
        for (std::size_t b = 0; b < n1; ++b) {
            const double f = std::exp(lf[a * n1 + b] - mx);
            marg0[a] += g1.w[b] * f;
            marg1[b] += g0.w[a] * f;
        }
    double z = 0.0, m0 = 0.0, m1 = 0.0;
    for (std::size_t a = 0; a < n0; ++a) {
        z += g0.w[a] * marg0[a];
        m0 += g0.w[a] * marg0[a] * g0.x[a];
    }
    for (std::size_t b = 0; b < n1; ++b)
        m1 += g1.w[b] * marg1[b] * g1.x[b];
    out.mean = ParameterPoint{m0 / z, m1 / z};
    out.q025 = {grid_quantile(g0.x, marg0, 0.025), grid_quantile(g1.x, marg1, 0.025)};
    out.q975 = {grid_quantile(g0.x, marg0, 0.975), grid_quantile(g1.x, marg1, 0.975)};
    return out;
}

double max_change(const ExactPosterior& a, const ExactPosterior& b)
{
    double d = 0.0;
    for (std::size_t j = 0; j < a.mean.dim(); ++j) {
        d = std::max(d, std::abs(a.mean[j] - b.mean[j]));
        d = std::max(d, std::abs(a.q025[j] - b.q025[j]));
        d = std::max(d, std::abs(a.q975[j] - b.q975[j]));
    }
    return d;
}

}  // namespace

ExactPosterior exact_posterior_mean(const EnumerableInstance& inst, const SufficientStats& observed, const Box& box,
                                    const QuadratureSpec& spec)
{
    const std::size_t q = box.dim();
    if (q == 0 || q > 2)
        throw std::invalid_argument("exact_posterior_mean: quadrature supports q <= 2 only (got q = " +
                                    std::to_string(q) + ")");
    if (q != inst.stat_dim())
        throw std::invalid_argument("exact_posterior_mean: box dimension does not match the instance");
    if (!spec.prior_only && observed.dim() != q)
        throw std::invalid_argument("exact_posterior_mean: observed statistics have the wrong dimension");
    if (spec.initial_intervals < 2)
        throw std::invalid_argument("exact_posterior_mean: need at least two intervals");
    const std::size_t cap = q == 1 ? spec.max_intervals : std::min<std::size_t>(spec.max_intervals, 4096);

    std::size_t n = spec.initial_intervals;
    ExactPosterior prev = posterior_on_grid(inst, observed, box, spec, n);
    while (2 * n <= cap) {
        n *= 2;
        ExactPosterior next = posterior_on_grid(inst, observed, box, spec, n);
        if (max_change(prev, next) < spec.tolerance)
            return next;
        prev = std::move(next);
    }
    throw std::runtime_error("exact_posterior_mean: quadrature did not converge to " +
                             std::to_string(spec.tolerance) + " within " + std::to_string(cap) + " intervals");
}

}  // namespace wlpost
