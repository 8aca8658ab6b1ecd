#pragma once

// Adaptive random-walk Metropolis on theta targeting
//   pi(theta) ∝ exp(<S(x0), theta>) mu(theta) / Z(theta)
// with Z supplied by a log-partition callback (the Wang-Landau surface, or an
// exact oracle for testing).

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "wlpost/core.hpp"
#include "wlpost/random.hpp"

namespace wlpost {

using LogZFunction = std::function<double(std::span<const double>)>;

/// Uniform window [theta_j - b_j, theta_j + b_j] per coordinate, folded back into
/// the box by reflection at its faces.
struct ReflectedUniform {
    std::vector<double> half_width;
};

/// theta' = theta + sigma * L z with L L^T = cov; proposals leaving the box are
/// rejected in place.
struct GaussianBlock {
    double sigma = 1.0;
    Eigen::MatrixXd cov;
};

struct RwProposal {
    std::variant<ReflectedUniform, GaussianBlock> variant;
    Box bounds;

    void validate() const;
    std::size_t dim() const { return bounds.dim(); }
};

/// Default proposals: b = 0.1 * box width, or sigma = 2.38 / sqrt(q) with identity covariance.
RwProposal default_reflected_uniform(const Box& bounds);
RwProposal default_gaussian_block(const Box& bounds);

/// Reflects x across the faces of [lo, hi] until it lands inside. Computed by
/// folding with period 2(hi - lo), so arbitrarily wide windows cost O(1).
double reflect_into(double x, double lo, double hi);

/// nullopt means "rejected in place" (the draw left the support).
std::optional<ParameterPoint> propose(const ParameterPoint& theta, const RwProposal& prop, Rng& rng);

/// <S(x0), theta' - theta> + log mu(theta') - log mu(theta) + logz_cur - logz_new.
/// Both proposal variants are symmetric, so no proposal-ratio term appears.
double mh_log_acceptance(const EnergyModel& model, const ParameterPoint& theta, const ParameterPoint& theta_new,
                         double logz_cur, double logz_new);

struct AdaptOptions {
    double target_rate = 0.30;
    double scale_exponent = 0.6;   // log-scale step t^-scale_exponent
    double moment_exponent = 1.0;  // moment step t^-moment_exponent; 1 gives running empirical moments
    std::uint64_t blend_after = 1000;
    double log_scale_limit = 20.0;
    double jitter = 1e-10;
};

struct AdaptState {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    double log_scale = 0.0;
    std::uint64_t steps = 0;
    AdaptOptions options;

    static AdaptState initial(std::size_t q, AdaptOptions options = {});
};

/// One Robbins-Monro update of the log-scale toward the target acceptance rate,
/// plus recursive mean/covariance updates (covariance kept symmetric PSD).
AdaptState adapt_proposal(const AdaptState& adapt, bool accepted, const ParameterPoint& theta_new);
void adapt_in_place(AdaptState& adapt, bool accepted, std::span<const double> theta_new);

/// The proposal actually used at the current adaptation state: scaled window /
/// scale, and the adapted covariance once `blend_after` steps have passed.
RwProposal effective_proposal(const RwProposal& base, const AdaptState& adapt);

struct ThetaStepResult {
    bool accepted = false;
    bool rejected_in_place = false;
    double log_acceptance = 0.0;
};

class ThetaChain {
public:
    ThetaChain(ParameterPoint start, std::uint64_t burn_in = 0);

    const ParameterPoint& current() const { return current_; }
    std::size_t dim() const { return current_.dim(); }
    std::size_t length() const { return accepted_.size(); }
    std::uint64_t burn_in() const { return burn_in_; }

    /// Row-major trace, one row of dim() coordinates per step.
    const std::vector<double>& trace() const { return trace_; }
    std::span<const double> row(std::size_t t) const { return {trace_.data() + t * dim(), dim()}; }
    const std::vector<std::uint8_t>& accepted() const { return accepted_; }
    const std::vector<double>& log_acceptances() const { return log_acc_; }

    /// Column j of the trace as a series.
    std::vector<double> coordinate(std::size_t j) const;
    double acceptance_rate(std::size_t from, std::size_t to) const;

    void append(const ParameterPoint& theta, bool accepted, double log_acc);

    void save(std::ostream& os) const;
    void load(std::istream& is);

private:
    ParameterPoint current_;
    std::uint64_t burn_in_;
    std::vector<double> trace_;
    std::vector<std::uint8_t> accepted_;
    std::vector<double> log_acc_;
};

/// One MH transition of the chain against `log_z`; records the outcome and feeds
/// the adaptation. Always consumes the acceptance uniform so that the random
/// stream stays aligned regardless of the outcome.
ThetaStepResult theta_step(ThetaChain& chain, const EnergyModel& model, const RwProposal& base, AdaptState& adapt,
                           const LogZFunction& log_z, Rng& rng);

void save_adapt(std::ostream& os, const AdaptState& a);
void load_adapt(std::istream& is, AdaptState& a);

}  // namespace wlpost
