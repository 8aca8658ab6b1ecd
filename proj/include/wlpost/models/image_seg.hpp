#pragma once

// Two-colour image segmentation: latent Ising image x, observations
// y_s | x ~ N(x_s, sigma^2) independently, prior 1/sigma^2 on the noise variance.

#include <vector>

#include "wlpost/models/ising.hpp"
#include "wlpost/random.hpp"

namespace wlpost {

struct ImageSegState {
    IsingLattice x;
    double sigma2;
    double theta;
    std::vector<double> y;

    void validate() const;
};

/// y_s = x_s + sigma z_s with z iid standard normal.
std::vector<double> simulate_noisy_image(const IsingLattice& x, double sigma, Rng& rng);

double sum_squared_residuals(const IsingLattice& x, const std::vector<double>& y);

/// Draw from the conditional InvGamma(|S|/2, SSR/2). Throws std::domain_error when SSR = 0.
double sigma2_draw(const IsingLattice& x, const std::vector<double>& y, Rng& rng);
double inverse_gamma_draw(double shape, double scale, Rng& rng);

/// p(x_s = +1 | rest) ∝ exp(theta a s - (y_s - a)^2 / 2 sigma^2), a = +-1.
double pixel_prob_plus(double theta, int neighbour_sum, double y, double sigma2);

/// Systematic sweep redrawing every pixel from its two-point conditional.
/// Returns the change in the Ising statistic of x.
int pixel_sweep(ImageSegState& state, Rng& rng);

/// x_0(s) = sign(y(s)), sigma2_0 = empirical variance of y, theta_0 = 0.5.
ImageSegState initial_image_state(int rows, int cols, std::vector<double> y);

}  // namespace wlpost
