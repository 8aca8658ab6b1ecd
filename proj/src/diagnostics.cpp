#include "wlpost/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "wlpost/wl_engine.hpp"

namespace wlpost {

std::vector<double> acf(std::span<const double> series, std::size_t max_lag)
{
    const std::size_t n = series.size();
    if (n <= max_lag)
        throw std::invalid_argument("acf: series length must exceed max_lag");
    double mean = 0.0;
    for (double v : series)
        mean += v;
    mean /= static_cast<double>(n);
    double c0 = 0.0;
    for (double v : series)
        c0 += (v - mean) * (v - mean);
    if (!(c0 > 0.0))
        throw std::domain_error("acf: constant series has zero variance");
    std::vector<double> rho(max_lag + 1);
    rho[0] = 1.0;
    for (std::size_t k = 1; k <= max_lag; ++k) {
        double ck = 0.0;
        for (std::size_t t = 0; t + k < n; ++t)
            ck += (series[t] - mean) * (series[t + k] - mean);
        rho[k] = ck / c0;
    }
    return rho;
}

double quantile_sorted(std::span<const double> sorted, double p)
{
    if (sorted.empty())
        throw std::invalid_argument("quantile_sorted: empty sample");
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("quantile_sorted: probability outside [0,1]");
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

ChainSummary summarize(std::span<const double> trace, std::size_t dim, std::span<const std::uint8_t> accepted,
                       std::size_t burn_in, std::size_t max_lag)
{
    if (dim == 0 || trace.size() % dim != 0)
        throw std::invalid_argument("summarize: trace is not a whole number of rows");
    const std::size_t rows = trace.size() / dim;
    if (burn_in >= rows)
        throw std::invalid_argument("summarize: no samples after burn-in (" + std::to_string(rows) + " rows, burn-in " +
                                    std::to_string(burn_in) + ")");
    const std::size_t n = rows - burn_in;

    ChainSummary s;
    s.samples = n;
    s.burn_in = burn_in;
    s.mean.assign(dim, 0.0);
    s.q025.resize(dim);
    s.q975.resize(dim);
    s.acf.resize(dim);

    std::vector<double> col(n);
    for (std::size_t j = 0; j < dim; ++j) {
        for (std::size_t t = 0; t < n; ++t)
            col[t] = trace[(burn_in + t) * dim + j];
        double m = 0.0;
        for (double v : col)
            m += v;
        s.mean[j] = m / static_cast<double>(n);
        const std::size_t lag = std::min(max_lag, n - 1);
        const bool constant = std::all_of(col.begin(), col.end(), [&](double v) { return v == col[0]; });
        if (!constant)
            s.acf[j] = acf(col, lag);
        std::sort(col.begin(), col.end());
        s.q025[j] = quantile_sorted(col, 0.025);
        s.q975[j] = quantile_sorted(col, 0.975);
    }

    s.covariance = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    if (n > 1) {
        for (std::size_t t = 0; t < n; ++t) {
            const double* row = trace.data() + (burn_in + t) * dim;
            for (std::size_t a = 0; a < dim; ++a)
                for (std::size_t b = a; b < dim; ++b)
                    s.covariance(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +=
                        (row[a] - s.mean[a]) * (row[b] - s.mean[b]);
        }
        s.covariance /= static_cast<double>(n - 1);
        for (std::size_t a = 0; a < dim; ++a)
            for (std::size_t b = 0; b < a; ++b)
                s.covariance(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                    s.covariance(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a));
    }

    if (accepted.size() == rows) {
        std::uint64_t acc = 0;
        for (std::size_t t = burn_in; t < rows; ++t)
            acc += accepted[t];
        s.acceptance_rate = static_cast<double>(acc) / static_cast<double>(n);
    }
    return s;
}

ChainSummary summarize(const ThetaChain& chain, std::size_t burn_in, std::size_t max_lag)
{
    return summarize(chain.trace(), chain.dim(), chain.accepted(), burn_in, max_lag);
}

nlohmann::json to_json(const ChainSummary& s)
{
    nlohmann::json j;
    j["samples"] = s.samples;
    j["burn_in"] = s.burn_in;
    j["mean"] = s.mean;
    j["q025"] = s.q025;
    j["q975"] = s.q975;
    nlohmann::json cov = nlohmann::json::array();
    for (Eigen::Index a = 0; a < s.covariance.rows(); ++a) {
        std::vector<double> row(static_cast<std::size_t>(s.covariance.cols()));
        for (Eigen::Index b = 0; b < s.covariance.cols(); ++b)
            row[static_cast<std::size_t>(b)] = s.covariance(a, b);
        cov.push_back(row);
    }
    j["covariance"] = cov;
    j["acf"] = s.acf;
    j["acceptance_rate"] = s.acceptance_rate;
    return j;
}

std::vector<HistogramBin> histogram(std::span<const double> series, std::size_t bins)
{
    if (bins == 0)
        throw std::invalid_argument("histogram: need at least one bin");
    if (series.empty())
        throw std::invalid_argument("histogram: empty series");
    const auto [mn_it, mx_it] = std::minmax_element(series.begin(), series.end());
    double lo = *mn_it, hi = *mx_it;
    if (hi == lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double w = (hi - lo) / static_cast<double>(bins);
    std::vector<HistogramBin> out(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        out[b].left = lo + w * static_cast<double>(b);
        out[b].right = b + 1 == bins ? hi : lo + w * static_cast<double>(b + 1);
    }
    for (double v : series) {
        auto b = static_cast<std::size_t>((v - lo) / w);
        out[std::min(b, bins - 1)].count += 1;
    }
    return out;
}

void write_histogram_csv(const std::vector<HistogramBin>& bins, const std::string& path)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("write_histogram_csv: cannot open " + path);
    os << "count,left,right\n" << std::setprecision(17);
    for (const auto& b : bins)
        os << b.count << ',' << b.left << ',' << b.right << '\n';
}

double chi_square_sf(double statistic, double dof)
{
    if (!(dof > 0.0))
        throw std::invalid_argument("chi_square_sf: degrees of freedom must be positive");
    if (statistic <= 0.0)
        return 1.0;
    return boost::math::gamma_q(0.5 * dof, 0.5 * statistic);
}

ChiSquareResult chi_square_test(std::span<const std::uint64_t> counts, std::span<const double> probs,
                                double min_expected)
{
    if (counts.size() != probs.size() || counts.empty())
        throw std::invalid_argument("chi_square_test: counts and probabilities must match and be non-empty");
    std::uint64_t total = 0;
    for (auto c : counts)
        total += c;
    if (total == 0)
        throw std::invalid_argument("chi_square_test: no observations");
    const double n = static_cast<double>(total);

    ChiSquareResult r;
    double pooled_obs = 0.0, pooled_exp = 0.0;
    std::size_t cells = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double e = n * probs[i];
        const double o = static_cast<double>(counts[i]);
        if (e < min_expected) {
            pooled_obs += o;
            pooled_exp += e;
            continue;
        }
        r.statistic += (o - e) * (o - e) / e;
        ++cells;
    }
    if (pooled_exp > 0.0) {
        r.statistic += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
        ++cells;
    } else if (pooled_obs > 0.0) {
        // observations in cells of probability zero: impossible under the null
        r.statistic = std::numeric_limits<double>::infinity();
        r.dof = static_cast<double>(std::max<std::size_t>(cells, 2) - 1);
        r.p_value = 0.0;
        return r;
    }
    if (cells < 2)
        throw std::invalid_argument("chi_square_test: fewer than two cells after pooling");
    r.dof = static_cast<double>(cells - 1);
    r.p_value = chi_square_sf(r.statistic, r.dof);
    return r;
}

OccupancyReport occupancy_report(std::span<const std::uint64_t> occupancy, double eps2)
{
    OccupancyReport r;
    const double d = static_cast<double>(occupancy.size());
    r.threshold = eps2 / d;
    std::uint64_t total = 0;
    for (auto v : occupancy)
        total += v;
    if (total == 0) {
        r.max_deviation = 1.0 / d;
        return r;
    }
    for (auto v : occupancy)
        r.max_deviation = std::max(r.max_deviation, std::abs(static_cast<double>(v) / static_cast<double>(total) - 1.0 / d));
    r.flat = flat_histogram_test(occupancy, eps2);
    return r;
}

}  // namespace wlpost
