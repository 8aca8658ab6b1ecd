#include "wlpost/wl_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "wlpost/numeric.hpp"
#include "wlpost/serialize.hpp"

namespace wlpost {

ParticleSet::ParticleSet(std::vector<ParameterPoint> points, const Box& bounds)
{
    if (points.empty())
        throw std::invalid_argument("ParticleSet: need at least one particle");
    d_ = points.size();
    q_ = bounds.dim();
    coords_.reserve(d_ * q_);
    for (std::size_t i = 0; i < d_; ++i) {
        if (points[i].dim() != q_)
            throw std::invalid_argument("ParticleSet: particle " + std::to_string(i) + " has wrong dimension");
        if (!bounds.contains(points[i].view()))
            throw std::invalid_argument("ParticleSet: particle " + std::to_string(i) + " lies outside the parameter box");
        coords_.insert(coords_.end(), points[i].coords.begin(), points[i].coords.end());
    }
}

ParticleSet ParticleSet::uniform(const Box& bounds, std::size_t d, Rng& rng)
{
    std::vector<ParameterPoint> pts;
    pts.reserve(d);
    for (std::size_t i = 0; i < d; ++i) {
        std::vector<double> c(bounds.dim());
        for (std::size_t j = 0; j < c.size(); ++j) {
            do {
                c[j] = bounds.lower[j] + bounds.width(j) * uniform01(rng);
            } while (!(c[j] > bounds.lower[j]));
        }
        pts.emplace_back(std::move(c));
    }
    return ParticleSet(std::move(pts), bounds);
}

ParticleSet ParticleSet::gaussian(const Box& bounds, std::size_t d, double mean, double variance, Rng& rng)
{
    if (!(variance > 0.0))
        throw std::invalid_argument("ParticleSet::gaussian: variance must be positive");
    const double sd = std::sqrt(variance);
    std::vector<ParameterPoint> pts;
    pts.reserve(d);
    for (std::size_t i = 0; i < d; ++i) {
        std::vector<double> c(bounds.dim());
        for (std::size_t j = 0; j < c.size(); ++j) {
            int tries = 0;
            do {
                c[j] = mean + sd * standard_normal(rng);
                if (++tries > 10000)
                    throw std::invalid_argument("ParticleSet::gaussian: distribution has no mass inside the box");
            } while (!(c[j] > bounds.lower[j] && c[j] < bounds.upper[j]));
        }
        pts.emplace_back(std::move(c));
    }
    return ParticleSet(std::move(pts), bounds);
}

ParameterPoint ParticleSet::at(std::size_t i) const
{
    auto p = point(i);
    return ParameterPoint(std::vector<double>(p.begin(), p.end()));
}

double LogWeightVector::sum() const
{
    return std::accumulate(c.begin(), c.end(), 0.0);
}

void LogWeightVector::recenter()
{
    if (c.empty())
        return;
    const double mean = sum() / static_cast<double>(c.size());
    for (double& v : c)
        v -= mean;
}

void StepSchedule::validate() const
{
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw std::invalid_argument("StepSchedule: gamma must be positive and finite");
    if (!(eps1 > 0.0))
        throw std::invalid_argument("StepSchedule: eps1 must be positive");
    if (phase == SchedulePhase::FlatHistogram && !(eps1 < gamma))
        throw std::invalid_argument("StepSchedule: eps1 must be below the initial gamma");
    if (!(eps2 > 0.0 && eps2 < 1.0))
        throw std::invalid_argument("StepSchedule: eps2 must lie in (0,1)");
    if (!(tail_exponent > 0.5 && tail_exponent <= 1.0))
        throw std::invalid_argument("StepSchedule: tail exponent must lie in (0.5, 1]");
}

void label_distribution(std::span<const double> x_stats, const ParticleSet& particles, std::span<const double> c,
                        std::vector<double>& scratch, std::vector<double>& probs)
{
    const std::size_t d = particles.size();
    const std::size_t q = particles.dim();
    if (x_stats.size() != q || c.size() != d)
        throw std::invalid_argument("label_distribution: dimension mismatch");
    scratch.resize(d);
    const double* th = particles.flat().data();
    for (std::size_t i = 0; i < d; ++i) {
        double e = 0.0;
        for (std::size_t l = 0; l < q; ++l)
            e += x_stats[l] * th[i * q + l];
        scratch[i] = e - c[i];
    }
    softmax(scratch, probs);
}

std::vector<double> label_distribution(const SufficientStats& x_stats, const ParticleSet& particles,
                                       const LogWeightVector& weights)
{
    std::vector<double> scratch, probs;
    label_distribution(x_stats.view(), particles, weights.c, scratch, probs);
    return probs;
}

LogWeightVector rao_blackwell_update(const LogWeightVector& weights, std::span<const double> probs, double gamma)
{
    if (probs.size() != weights.size())
        throw std::invalid_argument("rao_blackwell_update: dimension mismatch");
    if (!(gamma > 0.0))
        throw std::invalid_argument("rao_blackwell_update: gamma must be positive");
    LogWeightVector out = weights;
    for (std::size_t i = 0; i < probs.size(); ++i)
        out.c[i] += gamma * probs[i];
    return out;
}

bool flat_histogram_test(std::span<const std::uint64_t> occupancy, double eps2)
{
    if (occupancy.empty())
        return false;
    std::uint64_t total = 0;
    for (auto v : occupancy)
        total += v;
    if (total == 0)
        return false;
    const double d = static_cast<double>(occupancy.size());
    const double inv_total = 1.0 / static_cast<double>(total);
    double worst = 0.0;
    for (auto v : occupancy)
        worst = std::max(worst, std::abs(static_cast<double>(v) * inv_total - 1.0 / d));
    // boundary included; the slack absorbs rounding in v/total so that exact ties
    // such as (60,40) at eps2 = 0.2 are classified as flat
    return worst <= eps2 / d + 1e-12;
}

ScheduleUpdate next_gamma(const StepSchedule& schedule, bool flat)
{
    ScheduleUpdate up{schedule, false};
    StepSchedule& s = up.schedule;
    if (s.phase == SchedulePhase::FlatHistogram) {
        if (flat) {
            s.gamma *= 0.5;
            up.reset_occupancy = true;
            if (s.gamma <= s.eps1) {
                s.phase = SchedulePhase::Deterministic;
                s.n_det = 1;
                s.gamma = s.eps1;
            }
        }
    } else {
        s.n_det += 1;
        s.gamma = s.eps1 / std::pow(static_cast<double>(s.n_det), s.tail_exponent);
    }
    return up;
}

WangLandauChain::WangLandauChain(ParticleSet particles, std::unique_ptr<SweepKernel> kernel, WlOptions options,
                                 std::size_t initial_label)
    : particles_(std::move(particles)), kernel_(std::move(kernel)), options_(options)
{
    if (!kernel_)
        throw std::invalid_argument("WangLandauChain: null kernel");
    if (initial_label >= particles_.size())
        throw std::invalid_argument("WangLandauChain: initial label out of range");
    if (kernel_->stats().dim() != particles_.dim())
        throw std::invalid_argument("WangLandauChain: kernel statistic dimension does not match particles");
    if (options_.sweeps_per_step < 1)
        throw std::invalid_argument("WangLandauChain: sweeps_per_step must be >= 1");
    state_.x_stats = kernel_->stats();
    state_.label = initial_label;
    state_.weights = LogWeightVector::zeros(particles_.size());
    state_.occupancy.assign(particles_.size(), 0);
    state_.schedule.gamma = options_.gamma0;
    state_.schedule.eps1 = options_.eps1;
    state_.schedule.eps2 = options_.eps2;
    state_.schedule.tail_exponent = options_.tail_exponent;
    state_.schedule.validate();
}

WlStepOutcome WangLandauChain::step(Rng& kernel_rng, Rng& label_rng)
{
    WlStepOutcome out;
    const auto theta = particles_.point(state_.label);
    for (int s = 0; s < options_.sweeps_per_step; ++s)
        kernel_->sweep(theta, kernel_rng);
    state_.x_stats = kernel_->stats();

    auto& c = state_.weights.c;
    label_distribution(state_.x_stats.view(), particles_, c, scratch_, probs_);
    state_.label = sample_categorical(probs_, uniform01(label_rng));

    const double gamma = state_.schedule.gamma;
    // increments actually applied, summed entrywise so the measurement does not
    // inherit the rounding of sum(c) itself
    double increment = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double prev = c[i];
        c[i] += gamma * probs_[i];
        increment += c[i] - prev;
    }
    out.weight_sum_increment = increment;
    out.gamma_used = gamma;
    out.label = state_.label;

    state_.occupancy[state_.label] += 1;
    state_.iteration += 1;

    const bool in_flat_phase = state_.schedule.phase == SchedulePhase::FlatHistogram;
    const bool flat = in_flat_phase && flat_histogram_test(state_.occupancy, state_.schedule.eps2);
    ScheduleUpdate up = next_gamma(state_.schedule, flat);
    if (up.reset_occupancy) {
        if (options_.log_halvings)
            halvings_.push_back({state_.iteration, gamma, state_.schedule.eps2, state_.occupancy});
        std::fill(state_.occupancy.begin(), state_.occupancy.end(), 0);
        out.halved = true;
    }
    out.entered_deterministic = in_flat_phase && up.schedule.phase == SchedulePhase::Deterministic;
    state_.schedule = up.schedule;

    if (options_.recenter_interval > 0 && state_.iteration % options_.recenter_interval == 0) {
        state_.weights.recenter();
        out.recentered = true;
    }
    return out;
}

void WangLandauChain::shift_weights(double a)
{
    for (double& v : state_.weights.c)
        v += a;
}

WlCheckpointRecord WangLandauChain::checkpoint_record() const
{
    return {state_.iteration, state_.schedule.gamma, state_.schedule.phase, state_.weights.c, state_.occupancy};
}

void WangLandauChain::save(std::ostream& os) const
{
    io::write_pod<std::uint64_t>(os, state_.label);
    io::write_vec(os, state_.weights.c);
    io::write_vec(os, state_.occupancy);
    io::write_pod(os, state_.schedule.gamma);
    io::write_pod(os, state_.schedule.eps1);
    io::write_pod(os, state_.schedule.eps2);
    io::write_pod(os, state_.schedule.tail_exponent);
    io::write_pod<std::uint8_t>(os, static_cast<std::uint8_t>(state_.schedule.phase));
    io::write_pod(os, state_.schedule.n_det);
    io::write_pod(os, state_.iteration);
    kernel_->save(os);
}

void WangLandauChain::load(std::istream& is)
{
    state_.label = io::read_pod<std::uint64_t>(is);
    state_.weights.c = io::read_vec<double>(is);
    state_.occupancy = io::read_vec<std::uint64_t>(is);
    state_.schedule.gamma = io::read_pod<double>(is);
    state_.schedule.eps1 = io::read_pod<double>(is);
    state_.schedule.eps2 = io::read_pod<double>(is);
    state_.schedule.tail_exponent = io::read_pod<double>(is);
    state_.schedule.phase = static_cast<SchedulePhase>(io::read_pod<std::uint8_t>(is));
    state_.schedule.n_det = io::read_pod<std::uint64_t>(is);
    state_.iteration = io::read_pod<std::uint64_t>(is);
    kernel_->load(is);
    state_.x_stats = kernel_->stats();
    if (state_.label >= particles_.size() || state_.weights.size() != particles_.size() ||
        state_.occupancy.size() != particles_.size())
        throw std::runtime_error("checkpoint: Wang-Landau state does not match the particle set");
}

}  // namespace wlpost
