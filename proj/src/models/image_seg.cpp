#include "wlpost/models/image_seg.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace wlpost {

void ImageSegState::validate() const
{
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
        throw std::invalid_argument("ImageSegState: sigma2 must be positive");
    if (!(theta > 0.0 && theta < 1.0))
        throw std::invalid_argument("ImageSegState: theta must lie in (0,1)");
    if (y.size() != static_cast<std::size_t>(x.size()))
        throw std::invalid_argument("ImageSegState: observation size does not match the lattice");
}

std::vector<double> simulate_noisy_image(const IsingLattice& x, double sigma, Rng& rng)
{
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw std::invalid_argument("simulate_noisy_image: sigma must be non-negative");
    std::vector<double> y(static_cast<std::size_t>(x.size()));
    for (int i = 0; i < x.size(); ++i)
        y[static_cast<std::size_t>(i)] = x[i] + sigma * standard_normal(rng);
    return y;
}

double sum_squared_residuals(const IsingLattice& x, const std::vector<double>& y)
{
    if (y.size() != static_cast<std::size_t>(x.size()))
        throw std::invalid_argument("sum_squared_residuals: size mismatch");
    double ssr = 0.0;
    for (int i = 0; i < x.size(); ++i) {
        const double r = y[static_cast<std::size_t>(i)] - x[i];
        ssr += r * r;
    }
    return ssr;
}

double inverse_gamma_draw(double shape, double scale, Rng& rng)
{
    if (!(shape > 0.0) || !(scale > 0.0))
        throw std::domain_error("inverse_gamma_draw: shape and scale must be positive");
    std::gamma_distribution<double> g(shape, 1.0);
    double v;
    do {
        v = g(rng);
    } while (!(v > 0.0));
    return scale / v;
}

double sigma2_draw(const IsingLattice& x, const std::vector<double>& y, Rng& rng)
{
    const double ssr = sum_squared_residuals(x, y);
    if (!(ssr > 0.0))
        throw std::domain_error("sigma2_draw: zero residual sum of squares; the conditional is degenerate");
    return inverse_gamma_draw(0.5 * static_cast<double>(x.size()), 0.5 * ssr, rng);
}

double pixel_prob_plus(double theta, int neighbour_sum, double y, double sigma2)
{
    // log p(+1) - log p(-1) = 2 theta s + 2 y / sigma^2
    const double logit = 2.0 * theta * neighbour_sum + 2.0 * y / sigma2;
    return 1.0 / (1.0 + std::exp(-logit));
}

int pixel_sweep(ImageSegState& state, Rng& rng)
{
    IsingLattice& x = state.x;
    int delta = 0;
    for (int i = 0; i < x.size(); ++i) {
        const int s = x.neighbour_sum(i);
        const double p = pixel_prob_plus(state.theta, s, state.y[static_cast<std::size_t>(i)], state.sigma2);
        const std::int8_t next = uniform01(rng) < p ? 1 : -1;
        if (next != x[i]) {
            delta += (next - x[i]) * s;
            x[i] = next;
        }
    }
    return delta;
}

ImageSegState initial_image_state(int rows, int cols, std::vector<double> y)
{
    IsingLattice x(rows, cols);
    if (y.size() != static_cast<std::size_t>(x.size()))
        throw std::invalid_argument("initial_image_state: observation size does not match the lattice");
    double mean = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        x[static_cast<int>(i)] = y[i] >= 0.0 ? 1 : -1;
        mean += y[i];
    }
    mean /= static_cast<double>(y.size());
    double var = 0.0;
    for (double v : y)
        var += (v - mean) * (v - mean);
    var /= static_cast<double>(y.size());
    ImageSegState st{std::move(x), var > 0.0 ? var : 1.0, 0.5, std::move(y)};
    st.validate();
    return st;
}

}  // namespace wlpost
