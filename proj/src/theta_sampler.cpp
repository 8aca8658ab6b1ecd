#include "wlpost/theta_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wlpost/serialize.hpp"

namespace wlpost {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void RwProposal::validate() const
{
    if (const auto* ru = std::get_if<ReflectedUniform>(&variant)) {
        if (ru->half_width.size() != bounds.dim())
            throw std::invalid_argument("RwProposal: half-width dimension mismatch");
        for (double b : ru->half_width)
            if (!(b > 0.0) || !std::isfinite(b))
                throw std::invalid_argument("RwProposal: half-widths must be positive and finite");
    } else {
        const auto& gb = std::get<GaussianBlock>(variant);
        if (!(gb.sigma > 0.0) || !std::isfinite(gb.sigma))
            throw std::invalid_argument("RwProposal: sigma must be positive and finite");
        const auto q = static_cast<Eigen::Index>(bounds.dim());
        if (gb.cov.rows() != q || gb.cov.cols() != q)
            throw std::invalid_argument("RwProposal: covariance dimension mismatch");
        if ((gb.cov - gb.cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + gb.cov.cwiseAbs().maxCoeff()))
            throw std::invalid_argument("RwProposal: covariance must be symmetric");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gb.cov, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < 1e-10)
            throw std::invalid_argument("RwProposal: covariance eigenvalues must be >= 1e-10");
    }
}

RwProposal default_reflected_uniform(const Box& bounds)
{
    ReflectedUniform ru;
    for (std::size_t j = 0; j < bounds.dim(); ++j)
        ru.half_width.push_back(0.1 * bounds.width(j));
    return RwProposal{ru, bounds};
}

RwProposal default_gaussian_block(const Box& bounds)
{
    const auto q = static_cast<Eigen::Index>(bounds.dim());
    GaussianBlock gb{2.38 / std::sqrt(static_cast<double>(q)), Eigen::MatrixXd::Identity(q, q)};
    return RwProposal{gb, bounds};
}

double reflect_into(double x, double lo, double hi)
{
    const double w = hi - lo;
    double y = std::fmod(x - lo, 2.0 * w);
    if (y < 0.0)
        y += 2.0 * w;
    if (y > w)
        y = 2.0 * w - y;
    return lo + y;
}

std::optional<ParameterPoint> propose(const ParameterPoint& theta, const RwProposal& prop, Rng& rng)
{
    const std::size_t q = prop.dim();
    if (theta.dim() != q)
        throw std::invalid_argument("propose: dimension mismatch");
    ParameterPoint out = theta;
    if (const auto* ru = std::get_if<ReflectedUniform>(&prop.variant)) {
        for (std::size_t j = 0; j < q; ++j) {
            const double raw = theta[j] + ru->half_width[j] * (2.0 * uniform01(rng) - 1.0);
            out[j] = reflect_into(raw, prop.bounds.lower[j], prop.bounds.upper[j]);
        }
        return out;
    }
    const auto& gb = std::get<GaussianBlock>(prop.variant);
    Eigen::VectorXd z(static_cast<Eigen::Index>(q));
    for (std::size_t j = 0; j < q; ++j)
        z(static_cast<Eigen::Index>(j)) = standard_normal(rng);
    Eigen::LLT<Eigen::MatrixXd> llt(gb.cov);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("propose: proposal covariance is not positive definite");
    const Eigen::VectorXd lz = llt.matrixL() * z;
    const Eigen::VectorXd step = gb.sigma * lz;
    for (std::size_t j = 0; j < q; ++j)
        out[j] = theta[j] + step(static_cast<Eigen::Index>(j));
    if (!prop.bounds.contains(out.view()))
        return std::nullopt;
    return out;
}

double mh_log_acceptance(const EnergyModel& model, const ParameterPoint& theta, const ParameterPoint& theta_new,
                         double logz_cur, double logz_new)
{
    const double lp_new = log_prior(model, theta_new);
    const double lp_cur = log_prior(model, theta);
    if (lp_new == kNegInf)
        return kNegInf;
    double data_term = 0.0;
    const auto& s = model.observed();
    for (std::size_t l = 0; l < s.dim(); ++l)
        data_term += s[l] * (theta_new[l] - theta[l]);
    return data_term + (lp_new - lp_cur) + (logz_cur - logz_new);
}

AdaptState AdaptState::initial(std::size_t q, AdaptOptions options)
{
    AdaptState a;
    const auto n = static_cast<Eigen::Index>(q);
    a.mean = Eigen::VectorXd::Zero(n);
    a.cov = Eigen::MatrixXd::Zero(n, n);
    a.options = options;
    return a;
}

void adapt_in_place(AdaptState& a, bool accepted, std::span<const double> theta_new)
{
    const auto q = static_cast<Eigen::Index>(theta_new.size());
    if (a.mean.size() != q)
        throw std::invalid_argument("adapt_proposal: dimension mismatch");
    a.steps += 1;
    const double t = static_cast<double>(a.steps);
    const double eta = std::pow(t, -a.options.scale_exponent);
    const double w = std::pow(t, -a.options.moment_exponent);

    a.log_scale += eta * ((accepted ? 1.0 : 0.0) - a.options.target_rate);
    a.log_scale = std::clamp(a.log_scale, -a.options.log_scale_limit, a.options.log_scale_limit);

    Eigen::Map<const Eigen::VectorXd> x(theta_new.data(), q);
    const Eigen::VectorXd delta = x - a.mean;
    a.mean += w * delta;
    a.cov = (1.0 - w) * (a.cov + w * delta * delta.transpose());
    a.cov = 0.5 * (a.cov + a.cov.transpose());
}

AdaptState adapt_proposal(const AdaptState& adapt, bool accepted, const ParameterPoint& theta_new)
{
    AdaptState out = adapt;
    adapt_in_place(out, accepted, theta_new.view());
    return out;
}

RwProposal effective_proposal(const RwProposal& base, const AdaptState& adapt)
{
    RwProposal out = base;
    const double scale = std::exp(adapt.log_scale);
    if (auto* ru = std::get_if<ReflectedUniform>(&out.variant)) {
        for (double& b : ru->half_width)
            b *= scale;
        return out;
    }
    auto& gb = std::get<GaussianBlock>(out.variant);
    gb.sigma *= scale;
    if (adapt.steps >= adapt.options.blend_after) {
        const auto q = adapt.cov.rows();
        const double jitter = std::max(adapt.options.jitter, 1e-6 * adapt.cov.trace() / static_cast<double>(q));
        gb.cov = adapt.cov + jitter * Eigen::MatrixXd::Identity(q, q);
    }
    return out;
}

ThetaChain::ThetaChain(ParameterPoint start, std::uint64_t burn_in) : current_(std::move(start)), burn_in_(burn_in)
{
    if (current_.dim() == 0 || !current_.all_finite())
        throw std::invalid_argument("ThetaChain: start point must be finite and non-empty");
}

std::vector<double> ThetaChain::coordinate(std::size_t j) const
{
    std::vector<double> out(length());
    for (std::size_t t = 0; t < out.size(); ++t)
        out[t] = trace_[t * dim() + j];
    return out;
}

double ThetaChain::acceptance_rate(std::size_t from, std::size_t to) const
{
    to = std::min(to, length());
    if (from >= to)
        return 0.0;
    std::size_t n = 0;
    for (std::size_t t = from; t < to; ++t)
        n += accepted_[t];
    return static_cast<double>(n) / static_cast<double>(to - from);
}

void ThetaChain::append(const ParameterPoint& theta, bool accepted, double log_acc)
{
    if (theta.dim() != dim())
        throw std::invalid_argument("ThetaChain::append: dimension mismatch");
    current_ = theta;
    trace_.insert(trace_.end(), theta.coords.begin(), theta.coords.end());
    accepted_.push_back(accepted ? 1 : 0);
    log_acc_.push_back(log_acc);
}

void ThetaChain::save(std::ostream& os) const
{
    io::write_vec(os, current_.coords);
    io::write_pod(os, burn_in_);
    io::write_vec(os, trace_);
    io::write_vec(os, accepted_);
    io::write_vec(os, log_acc_);
}

void ThetaChain::load(std::istream& is)
{
    current_.coords = io::read_vec<double>(is);
    burn_in_ = io::read_pod<std::uint64_t>(is);
    trace_ = io::read_vec<double>(is);
    accepted_ = io::read_vec<std::uint8_t>(is);
    log_acc_ = io::read_vec<double>(is);
    if (current_.dim() == 0 || trace_.size() != accepted_.size() * current_.dim())
        throw std::runtime_error("checkpoint: corrupt theta chain");
}

ThetaStepResult theta_step(ThetaChain& chain, const EnergyModel& model, const RwProposal& base, AdaptState& adapt,
                           const LogZFunction& log_z, Rng& rng)
{
    ThetaStepResult res;
    const RwProposal prop = effective_proposal(base, adapt);
    const ParameterPoint theta = chain.current();
    const auto candidate = propose(theta, prop, rng);
    const double log_u = std::log(uniform_open01(rng));

    ParameterPoint next = theta;
    if (!candidate) {
        res.rejected_in_place = true;
        res.log_acceptance = kNegInf;
    } else if (log_prior(model, *candidate) == kNegInf) {
        res.log_acceptance = kNegInf;
    } else {
        // both ends evaluated against the same surface snapshot
        const double lz_cur = log_z(theta.view());
        const double lz_new = log_z(candidate->view());
        res.log_acceptance = mh_log_acceptance(model, theta, *candidate, lz_cur, lz_new);
        if (log_u < res.log_acceptance) {
            res.accepted = true;
            next = *candidate;
        }
    }
    chain.append(next, res.accepted, res.log_acceptance);
    adapt_in_place(adapt, res.accepted, next.view());
    return res;
}

void save_adapt(std::ostream& os, const AdaptState& a)
{
    std::vector<double> mean(a.mean.data(), a.mean.data() + a.mean.size());
    std::vector<double> cov(a.cov.data(), a.cov.data() + a.cov.size());
    io::write_vec(os, mean);
    io::write_vec(os, cov);
    io::write_pod(os, a.log_scale);
    io::write_pod(os, a.steps);
}

void load_adapt(std::istream& is, AdaptState& a)
{
    const auto mean = io::read_vec<double>(is);
    const auto cov = io::read_vec<double>(is);
    const auto q = static_cast<Eigen::Index>(mean.size());
    if (static_cast<Eigen::Index>(cov.size()) != q * q)
        throw std::runtime_error("checkpoint: corrupt adaptation state");
    a.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), q);
    a.cov = Eigen::Map<const Eigen::MatrixXd>(cov.data(), q, q);
    a.log_scale = io::read_pod<double>(is);
    a.steps = io::read_pod<std::uint64_t>(is);
}

}  // namespace wlpost
