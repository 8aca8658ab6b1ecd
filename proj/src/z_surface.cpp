#include "wlpost/z_surface.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <string>

#include "wlpost/numeric.hpp"
#include "wlpost/serialize.hpp"

namespace wlpost {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double squared_distance(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double t = a[i] - b[i];
        s += t * t;
    }
    return s;
}
}  // namespace

SmoothingKernel::SmoothingKernel(double h) : bandwidth(h)
{
    if (!(h > 0.0) || !std::isfinite(h))
        throw std::invalid_argument("SmoothingKernel: bandwidth must be positive and finite");
}

double default_bandwidth(const ParticleSet& particles)
{
    const std::size_t d = particles.size();
    if (d < 2)
        return 1.0;
    std::vector<double> nn(d, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            if (i != j)
                nn[i] = std::min(nn[i], squared_distance(particles.point(i), particles.point(j)));
    const auto mid = nn.begin() + static_cast<std::ptrdiff_t>(d / 2);
    std::nth_element(nn.begin(), mid, nn.end());
    double med = std::sqrt(*mid);
    if (d % 2 == 0) {
        const double lower = std::sqrt(*std::max_element(nn.begin(), mid));
        med = 0.5 * (med + lower);
    }
    return med > 0.0 ? med : 1.0;
}

std::vector<double> log_kappa_weights(std::span<const double> theta, const ParticleSet& particles,
                                      const SmoothingKernel& kernel)
{
    if (theta.size() != particles.dim())
        throw std::invalid_argument("kappa_weights: dimension mismatch");
    const double scale = -0.5 / (kernel.bandwidth * kernel.bandwidth);
    std::vector<double> out(particles.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = scale * squared_distance(theta, particles.point(i));
    const double norm = log_sum_exp(out);
    for (double& v : out)
        v -= norm;
    return out;
}

std::vector<double> kappa_weights(std::span<const double> theta, const ParticleSet& particles,
                                  const SmoothingKernel& kernel)
{
    if (theta.size() != particles.dim())
        throw std::invalid_argument("kappa_weights: dimension mismatch");
    const double scale = -0.5 / (kernel.bandwidth * kernel.bandwidth);
    std::vector<double> logits(particles.size());
    for (std::size_t i = 0; i < logits.size(); ++i)
        logits[i] = scale * squared_distance(theta, particles.point(i));
    return softmax(logits);
}

std::size_t SampleStore::KeyHash::operator()(const std::vector<double>& v) const noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (double x : v) {
        std::uint64_t bits;
        std::memcpy(&bits, &x, sizeof bits);
        h ^= bits + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
}

SampleStore::SampleStore(std::size_t labels, std::size_t stat_dim, std::uint64_t stride)
    : stat_dim_(stat_dim), stride_(stride), per_label_(labels)
{
    if (labels == 0 || stat_dim == 0)
        throw std::invalid_argument("SampleStore: need at least one label and one statistic");
    if (stride == 0)
        throw std::invalid_argument("SampleStore: stride must be >= 1");
}

void SampleStore::append(LabelHistory& h, std::span<const double> stats, std::uint64_t count)
{
    std::vector<double> key(stats.begin(), stats.end());
    auto [it, inserted] = h.index.try_emplace(std::move(key), h.counts.size());
    if (inserted) {
        h.stats.insert(h.stats.end(), stats.begin(), stats.end());
        h.counts.push_back(count);
    } else {
        h.counts[it->second] += count;
    }
}

void SampleStore::record(std::size_t label, std::span<const double> stats)
{
    if (label >= per_label_.size())
        throw std::out_of_range("SampleStore::record: label " + std::to_string(label) + " out of range");
    if (stats.size() != stat_dim_)
        throw std::invalid_argument("SampleStore::record: statistic dimension mismatch");
    LabelHistory& h = per_label_[label];
    if (h.visits % stride_ == 0) {
        append(h, stats, 1);
        h.kept += 1;
    }
    h.visits += 1;
}

std::uint64_t SampleStore::total_visits() const
{
    std::uint64_t n = 0;
    for (const auto& h : per_label_)
        n += h.visits;
    return n;
}

void SampleStore::save(std::ostream& os) const
{
    io::write_pod<std::uint64_t>(os, per_label_.size());
    io::write_pod<std::uint64_t>(os, stat_dim_);
    io::write_pod<std::uint64_t>(os, stride_);
    for (const auto& h : per_label_) {
        io::write_pod(os, h.visits);
        io::write_pod(os, h.kept);
        io::write_vec(os, h.stats);
        io::write_vec(os, h.counts);
    }
}

void SampleStore::load(std::istream& is)
{
    const auto labels = io::read_pod<std::uint64_t>(is);
    const auto dim = io::read_pod<std::uint64_t>(is);
    const auto stride = io::read_pod<std::uint64_t>(is);
    if (labels != per_label_.size() || dim != stat_dim_ || stride != stride_)
        throw std::runtime_error("checkpoint: sample store layout does not match the configuration");
    for (auto& h : per_label_) {
        h = LabelHistory{};
        h.visits = io::read_pod<std::uint64_t>(is);
        h.kept = io::read_pod<std::uint64_t>(is);
        auto stats = io::read_vec<double>(is);
        auto counts = io::read_vec<std::uint64_t>(is);
        if (stats.size() != counts.size() * stat_dim_)
            throw std::runtime_error("checkpoint: corrupt sample store");
        for (std::size_t k = 0; k < counts.size(); ++k)
            append(h, std::span<const double>(stats.data() + k * stat_dim_, stat_dim_), counts[k]);
    }
}

double log_importance_ratio(const SampleStore& store, std::size_t label, std::span<const double> theta,
                            std::span<const double> particle)
{
    const std::size_t K = store.stat_dim();
    if (theta.size() != K || particle.size() != K)
        throw std::invalid_argument("importance_ratio: dimension mismatch");
    const std::uint64_t kept = store.kept(label);
    if (kept == 0)
        return kNegInf;

    double diff[16];
    std::vector<double> diff_heap;
    double* dp = diff;
    if (K > 16) {
        diff_heap.resize(K);
        dp = diff_heap.data();
    }
    bool zero = true;
    for (std::size_t l = 0; l < K; ++l) {
        dp[l] = theta[l] - particle[l];
        zero = zero && dp[l] == 0.0;
    }
    if (zero)
        return 0.0;

    const auto stats = store.stats_of(label);
    const auto counts = store.counts_of(label);
    const std::size_t n = counts.size();
    thread_local std::vector<double> e;
    e.resize(n);
    double m = kNegInf;
    for (std::size_t k = 0; k < n; ++k) {
        double s = 0.0;
        const double* row = stats.data() + k * K;
        for (std::size_t l = 0; l < K; ++l)
            s += row[l] * dp[l];
        e[k] = s;
        m = std::max(m, s);
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        acc += static_cast<double>(counts[k]) * std::exp(e[k] - m);
    return m + std::log(acc) - std::log(static_cast<double>(kept));
}

double importance_ratio(const SampleStore& store, std::size_t label, std::span<const double> theta,
                        std::span<const double> particle)
{
    const double lv = log_importance_ratio(store, label, theta, particle);
    return lv == kNegInf ? 0.0 : std::exp(lv);
}

ZSurface::ZSurface(const SampleStore& store, const ParticleSet& particles, std::span<const double> c,
                   SmoothingKernel kernel)
    : store_(&store), particles_(&particles), c_(c.begin(), c.end()), kernel_(kernel)
{
    if (store.labels() != particles.size() || c_.size() != particles.size())
        throw std::invalid_argument("ZSurface: store, particles and weights disagree on d");
    if (store.stat_dim() != particles.dim())
        throw std::invalid_argument("ZSurface: statistic and parameter dimensions disagree");
}

double ZSurface::log_z(std::span<const double> theta) const
{
    const std::size_t d = particles_->size();
    const auto log_kappa = log_kappa_weights(theta, *particles_, kernel_);
    std::vector<double> terms;
    terms.reserve(d);
    for (std::size_t i = 0; i < d; ++i) {
        if (store_->kept(i) == 0 || log_kappa[i] == kNegInf)
            continue;
        terms.push_back(log_kappa[i] + c_[i] + log_importance_ratio(*store_, i, theta, particles_->point(i)));
    }
    if (terms.empty())
        throw std::logic_error("log_z_surface: no label has been visited; the surface is undefined");
    return log_sum_exp(terms);
}

std::vector<double> ZSurface::normalized_weights() const
{
    return softmax(c_);
}

double log_z_surface(const ZSurface& surface, const ParameterPoint& theta)
{
    return surface.log_z(theta.view());
}

}  // namespace wlpost
