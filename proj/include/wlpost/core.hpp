#pragma once

// Linear exponential-family models: E(x, theta) = <S(x), theta> over a finite
// sample space with counting base measure.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace wlpost {

/// A point in parameter space. Dimension equals the owning model's statistic count.
struct ParameterPoint {
    std::vector<double> coords;

    ParameterPoint() = default;
    explicit ParameterPoint(std::vector<double> c) : coords(std::move(c)) {}
    ParameterPoint(std::initializer_list<double> c) : coords(c) {}

    std::size_t dim() const { return coords.size(); }
    double operator[](std::size_t i) const { return coords[i]; }
    double& operator[](std::size_t i) { return coords[i]; }
    std::span<const double> view() const { return coords; }
    bool all_finite() const;

    bool operator==(const ParameterPoint&) const = default;
};

/// Sufficient statistics S(x) of a sample. For the bundled models every entry
/// is an integer held exactly in a double.
struct SufficientStats {
    std::vector<double> values;

    SufficientStats() = default;
    explicit SufficientStats(std::vector<double> v) : values(std::move(v)) {}
    SufficientStats(std::initializer_list<double> v) : values(v) {}

    std::size_t dim() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }
    std::span<const double> view() const { return values; }

    bool operator==(const SufficientStats&) const = default;
};

/// Axis-aligned open box (lower_i, upper_i).
struct Box {
    std::vector<double> lower;
    std::vector<double> upper;

    Box() = default;
    Box(std::vector<double> lo, std::vector<double> hi);
    static Box cube(std::size_t dim, double lo, double hi);

    std::size_t dim() const { return lower.size(); }
    double width(std::size_t i) const { return upper[i] - lower[i]; }
    bool contains(std::span<const double> theta) const;
    ParameterPoint center() const;
};

enum class PriorKind { UniformOnBox };

/// E(x, theta) = sum_l S_l(x) theta_l, uniform prior on `bounds`, data summarized
/// by `observed`.
class EnergyModel {
public:
    EnergyModel(Box bounds, SufficientStats observed, PriorKind prior = PriorKind::UniformOnBox);

    std::size_t stat_dim() const { return bounds_.dim(); }
    const Box& bounds() const { return bounds_; }
    const SufficientStats& observed() const { return observed_; }
    PriorKind prior() const { return prior_; }

    /// Same model with a different data summary (used when the "data" is itself
    /// a latent state, as in image segmentation).
    EnergyModel with_observed(SufficientStats observed) const;

private:
    Box bounds_;
    SufficientStats observed_;
    PriorKind prior_;
};

double dot(std::span<const double> a, std::span<const double> b);

/// <stats, theta>. Throws std::invalid_argument on dimension mismatch.
double energy_dot(const SufficientStats& stats, const ParameterPoint& theta);
double energy_dot(std::span<const double> stats, std::span<const double> theta);

/// 0 strictly inside the prior box, -inf otherwise. Unnormalized.
double log_prior(const EnergyModel& model, const ParameterPoint& theta);
double log_prior(const EnergyModel& model, std::span<const double> theta);

}  // namespace wlpost
