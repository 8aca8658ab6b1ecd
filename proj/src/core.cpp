#include "wlpost/core.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace wlpost {

bool ParameterPoint::all_finite() const
{
    for (double v : coords)
        if (!std::isfinite(v))
            return false;
    return true;
}

Box::Box(std::vector<double> lo, std::vector<double> hi) : lower(std::move(lo)), upper(std::move(hi))
{
    if (lower.size() != upper.size() || lower.empty())
        throw std::invalid_argument("Box: lower/upper must be non-empty and of equal length");
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || !(lower[i] < upper[i]))
            throw std::invalid_argument("Box: need finite lower < upper in coordinate " + std::to_string(i));
    }
}

Box Box::cube(std::size_t dim, double lo, double hi)
{
    return Box(std::vector<double>(dim, lo), std::vector<double>(dim, hi));
}

bool Box::contains(std::span<const double> theta) const
{
    if (theta.size() != lower.size())
        return false;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        // open box; NaN fails both comparisons
        if (!(theta[i] > lower[i] && theta[i] < upper[i]))
            return false;
    }
    return true;
}

ParameterPoint Box::center() const
{
    std::vector<double> c(lower.size());
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] = 0.5 * (lower[i] + upper[i]);
    return ParameterPoint(std::move(c));
}

EnergyModel::EnergyModel(Box bounds, SufficientStats observed, PriorKind prior)
    : bounds_(std::move(bounds)), observed_(std::move(observed)), prior_(prior)
{
    if (bounds_.dim() == 0)
        throw std::invalid_argument("EnergyModel: empty parameter box");
    if (observed_.dim() != bounds_.dim())
        throw std::invalid_argument("EnergyModel: observed statistics dimension " +
                                    std::to_string(observed_.dim()) + " != parameter dimension " +
                                    std::to_string(bounds_.dim()));
}

EnergyModel EnergyModel::with_observed(SufficientStats observed) const
{
    return EnergyModel(bounds_, std::move(observed), prior_);
}

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

double energy_dot(std::span<const double> stats, std::span<const double> theta)
{
    if (stats.size() != theta.size())
        throw std::invalid_argument("energy_dot: statistic dimension " + std::to_string(stats.size()) +
                                    " != parameter dimension " + std::to_string(theta.size()));
    return dot(stats, theta);
}

double energy_dot(const SufficientStats& stats, const ParameterPoint& theta)
{
    return energy_dot(stats.view(), theta.view());
}

double log_prior(const EnergyModel& model, std::span<const double> theta)
{
    if (theta.size() != model.stat_dim())
        throw std::invalid_argument("log_prior: dimension mismatch");
    return model.bounds().contains(theta) ? 0.0 : -std::numeric_limits<double>::infinity();
}

double log_prior(const EnergyModel& model, const ParameterPoint& theta)
{
    return log_prior(model, theta.view());
}

}  // namespace wlpost
