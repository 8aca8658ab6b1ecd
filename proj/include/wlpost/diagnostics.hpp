#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "wlpost/theta_sampler.hpp"

namespace wlpost {

/// Biased autocorrelation estimator: rho(k) = sum_t (x_t - m)(x_{t+k} - m) / sum_t (x_t - m)^2.
/// Requires size > max_lag; throws std::domain_error for a constant series.
std::vector<double> acf(std::span<const double> series, std::size_t max_lag);

/// Linear interpolation between order statistics: position p (n - 1) in the sorted sample.
double quantile_sorted(std::span<const double> sorted, double p);

struct ChainSummary {
    std::size_t samples = 0;
    std::size_t burn_in = 0;
    std::vector<double> mean;
    std::vector<double> q025;
    std::vector<double> q975;
    Eigen::MatrixXd covariance;
    /// One ACF per coordinate; empty for a coordinate that is constant after burn-in.
    std::vector<std::vector<double>> acf;
    double acceptance_rate = 0.0;
};

/// Summary over rows [burn_in, rows) of a row-major trace with `dim` columns.
ChainSummary summarize(std::span<const double> trace, std::size_t dim, std::span<const std::uint8_t> accepted,
                       std::size_t burn_in, std::size_t max_lag = 50);
ChainSummary summarize(const ThetaChain& chain, std::size_t burn_in, std::size_t max_lag = 50);

nlohmann::json to_json(const ChainSummary& s);

struct HistogramBin {
    std::uint64_t count = 0;
    double left = 0.0;
    double right = 0.0;
};

/// Equal-width bins over [min, max] of the series (last bin closed).
std::vector<HistogramBin> histogram(std::span<const double> series, std::size_t bins);
void write_histogram_csv(const std::vector<HistogramBin>& bins, const std::string& path);

struct ChiSquareResult {
    double statistic = 0.0;
    double dof = 0.0;
    double p_value = 1.0;
};

/// Pearson goodness of fit of observed counts against cell probabilities. Cells
/// with expected count below `min_expected` are pooled into one cell.
ChiSquareResult chi_square_test(std::span<const std::uint64_t> counts, std::span<const double> probs,
                                double min_expected = 5.0);

/// Upper tail of the chi-square distribution.
double chi_square_sf(double statistic, double dof);

/// How far the occupancy is from flat, in units comparable to eps2 / d.
struct OccupancyReport {
    double max_deviation = 0.0;  // max_i |v_i / sum v - 1/d|
    double threshold = 0.0;      // eps2 / d
    bool flat = false;
};
OccupancyReport occupancy_report(std::span<const std::uint64_t> occupancy, double eps2);

}  // namespace wlpost
