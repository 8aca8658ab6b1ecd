#include <cmath>

#include <doctest.h>

#include "wlpost/oracle.hpp"

using namespace wlpost;

namespace {

// Composite Simpson rule on [a, b] with n (even) panels.
template <class F>
double simpson(F f, double a, double b, int n = 20000)
{
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int k = 1; k < n; ++k)
        s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
    return s * h / 3.0;
}

double log_z_pair(double t) { return std::log(2.0 * std::exp(t) + 2.0 * std::exp(-t)); }

}  // namespace

TEST_CASE("exact_log_z examples")
{
    const auto pair = EnumerableInstance::ising(1, 2);
    const auto square = EnumerableInstance::ising(2, 2);
    const double zero = 0.0, t = 0.4;
    CHECK(exact_log_z(pair, std::span<const double>(&zero, 1)) == doctest::Approx(std::log(4.0)).epsilon(1e-14));
    CHECK(exact_log_z(square, std::span<const double>(&zero, 1)) == doctest::Approx(std::log(16.0)).epsilon(1e-14));
    CHECK(exact_log_z(pair, std::span<const double>(&t, 1)) == doctest::Approx(log_z_pair(0.4)).epsilon(1e-14));
    CHECK(pair.state_count() == 4);
    CHECK(EnumerableInstance::ising(3, 3).state_count() == 512);
    CHECK(EnumerableInstance::ergm(4).state_count() == 64);
}

TEST_CASE("state space size limit")
{
    CHECK_THROWS_AS(EnumerableInstance::ising(5, 5), std::length_error);
    CHECK_THROWS_AS(EnumerableInstance::ergm(8), std::length_error);
}

TEST_CASE("state indexing round-trips")
{
    for (std::uint64_t s = 0; s < 512; ++s)
        CHECK(ising_state_index(ising_state_from_index(3, 3, s)) == s);
    for (std::uint64_t s = 0; s < 64; ++s)
        CHECK(ergm_graph_index(ergm_graph_from_index(4, s)) == s);
    const auto inst = EnumerableInstance::ising(2, 2);
    for (std::uint64_t s = 0; s < 16; ++s)
        CHECK(inst.state_stats(s)[0] == ising_stat(ising_state_from_index(2, 2, s))[0]);
}

TEST_CASE("state probabilities sum to one and mean statistics match finite differences")
{
    const auto inst = EnumerableInstance::ergm(4, ErgmStatistics::Standard);
    const std::vector<double> theta = {-0.4, 0.2, -0.1, 0.3};
    const auto p = exact_state_probabilities(inst, theta);
    double sum = 0.0;
    for (double v : p)
        sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
    const auto m = exact_mean_stats(inst, theta);
    for (std::size_t l = 0; l < 4; ++l) {
        auto up = theta, dn = theta;
        up[l] += 1e-5;
        dn[l] -= 1e-5;
        CHECK(m[l] == doctest::Approx((exact_log_z(inst, up) - exact_log_z(inst, dn)) / 2e-5).epsilon(1e-6));
    }
}

TEST_CASE("posterior in prior-only mode is the box centre")
{
    QuadratureSpec spec;
    spec.prior_only = true;
    const auto r = exact_posterior_mean(EnumerableInstance::ising(2, 2), SufficientStats{0}, Box::cube(1, 0.0, 1.0), spec);
    CHECK(r.mean[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(r.q025[0] == doctest::Approx(0.025).epsilon(1e-6));
    CHECK(r.q975[0] == doctest::Approx(0.975).epsilon(1e-6));

    const auto r2 = exact_posterior_mean(EnumerableInstance::ergm(3).restrict({0, 3}), SufficientStats{1, 0},
                                         Box::cube(2, -2.0, 4.0), spec);
    CHECK(r2.mean[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r2.mean[1] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("posterior mean on a 1x2 lattice matches direct quadrature")
{
    const auto post = [](double t) { return std::exp(t - log_z_pair(t)); };
    const double norm = simpson(post, 0.0, 1.0);
    const double mean = simpson([&](double t) { return t * post(t); }, 0.0, 1.0) / norm;
    const auto r = exact_posterior_mean(EnumerableInstance::ising(1, 2), SufficientStats{1}, Box::cube(1, 0.0, 1.0));
    CHECK(r.mean[0] == doctest::Approx(mean).epsilon(1e-5));
    // the lower quantile solves F(q) = 0.025
    CHECK(simpson(post, 0.0, r.q025[0]) / norm == doctest::Approx(0.025).epsilon(1e-4));
    CHECK(simpson(post, 0.0, r.q975[0]) / norm == doctest::Approx(0.975).epsilon(1e-4));
}

TEST_CASE("restricted 3-node ERGM posterior matches direct quadrature")
{
    // Restricted to the tie parameter: Z(t) = (1 + e^t)^3 over the 8 graphs; observe 2 ties.
    const auto inst = EnumerableInstance::ergm(3).restrict({0});
    CHECK(inst.stat_dim() == 1);
    const auto post = [](double t) { return std::exp(2.0 * t - 3.0 * std::log1p(std::exp(t))); };
    const double norm = simpson(post, -50.0, 50.0, 200000);
    const double mean = simpson([&](double t) { return t * post(t); }, -50.0, 50.0, 200000) / norm;
    const auto r = exact_posterior_mean(inst, SufficientStats{2}, Box::cube(1, -50.0, 50.0));
    CHECK(r.mean[0] == doctest::Approx(mean).epsilon(1e-5));
}

TEST_CASE("posterior quadrature rejects more than two parameters")
{
    CHECK_THROWS_AS(exact_posterior_mean(EnumerableInstance::ergm(3), SufficientStats{1, 0, 0, 0}, Box::cube(4, -1, 1)),
                    std::invalid_argument);
}

TEST_CASE("image conditional probabilities normalize and favour the data")
{
    const std::vector<double> y = {2.0, 2.0, -2.0, -2.0};
    const auto p = image_conditional_probabilities(2, 2, 0.0, y, 0.25);
    double sum = 0.0;
    std::size_t best = 0;
    for (std::size_t s = 0; s < p.size(); ++s) {
        sum += p[s];
        if (p[s] > p[best])
            best = s;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
    const auto x = ising_state_from_index(2, 2, best);
    CHECK(x[0] == 1);
    CHECK(x[2] == -1);
}
