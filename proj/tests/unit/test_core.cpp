#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include <doctest.h>

#include "wlpost/core.hpp"
#include "wlpost/numeric.hpp"
#include "wlpost/random.hpp"

using namespace wlpost;

TEST_CASE("energy_dot evaluates the linear energy")
{
    CHECK(energy_dot(SufficientStats{5}, ParameterPoint{0.0}) == 0.0);
    CHECK(energy_dot(SufficientStats{4}, ParameterPoint{0.4}) == doctest::Approx(1.6).epsilon(1e-15));
    CHECK(energy_dot(SufficientStats{1, 2, 0, 1}, ParameterPoint{-2, 1, -1, 0}) == 0.0);
    CHECK_THROWS_AS(energy_dot(SufficientStats{1, 2}, ParameterPoint{1.0}), std::invalid_argument);
}

TEST_CASE("log_prior is zero inside the box and -inf outside")
{
    const EnergyModel ising(Box::cube(1, 0.0, 1.0), SufficientStats{0});
    CHECK(log_prior(ising, ParameterPoint{0.5}) == 0.0);
    CHECK(log_prior(ising, ParameterPoint{1.2}) == -std::numeric_limits<double>::infinity());
    CHECK(log_prior(ising, ParameterPoint{0.0}) == -std::numeric_limits<double>::infinity());
    const EnergyModel ergm(Box::cube(4, -50.0, 50.0), SufficientStats{0, 0, 0, 0});
    CHECK(log_prior(ergm, ParameterPoint{0, 0, 0, 0}) == 0.0);
}

TEST_CASE("box construction validates bounds")
{
    CHECK_THROWS(Box({1.0}, {0.0}));
    CHECK_THROWS(Box({0.0, 0.0}, {1.0}));
    const Box b({-1.0, 0.0}, {1.0, 4.0});
    CHECK(b.center() == ParameterPoint{0.0, 2.0});
    CHECK(b.width(1) == 4.0);
}

TEST_CASE("with_observed replaces only the data summary")
{
    const EnergyModel m(Box::cube(1, 0.0, 1.0), SufficientStats{3});
    const auto m2 = m.with_observed(SufficientStats{7});
    CHECK(m2.observed() == SufficientStats{7});
    CHECK(m2.bounds().upper == m.bounds().upper);
}

TEST_CASE("log_sum_exp is stable and handles -inf")
{
    const double inf = std::numeric_limits<double>::infinity();
    const std::vector<double> big = {1000.0, 1000.0};
    CHECK(log_sum_exp(big) == doctest::Approx(1000.0 + std::log(2.0)));
    const std::vector<double> some_inf = {-inf, 0.0};
    CHECK(log_sum_exp(some_inf) == doctest::Approx(0.0));
    const std::vector<double> all_inf = {-inf, -inf};
    CHECK(log_sum_exp(all_inf) == -inf);
    CHECK(log_sum_exp(std::vector<double>{}) == -inf);
}

TEST_CASE("softmax sums to one and zeroes -inf entries")
{
    const double inf = std::numeric_limits<double>::infinity();
    const std::vector<double> logits = {0.0, std::log(3.0), -inf};
    const auto p = softmax(logits);
    CHECK(p[0] == doctest::Approx(0.25));
    CHECK(p[1] == doctest::Approx(0.75));
    CHECK(p[2] == 0.0);
}

TEST_CASE("named substreams are reproducible and distinct")
{
    Rng a = make_stream(42, "wl-kernel");
    Rng b = make_stream(42, "wl-kernel");
    Rng c = make_stream(42, "wl-labels");
    Rng d = make_stream(43, "wl-kernel");
    const auto va = a();
    CHECK(va == b());
    CHECK(va != c());
    CHECK(va != d());
}

TEST_CASE("rng state round-trips through text")
{
    Rng a = make_stream(7, "x");
    for (int i = 0; i < 10; ++i)
        a();
    Rng b;
    deserialize_rng(b, serialize_rng(a));
    for (int i = 0; i < 5; ++i)
        CHECK(a() == b());
}

TEST_CASE("uniform_open01 never returns the endpoints and standard_normal has unit moments")
{
    Rng rng = make_stream(1, "moments");
    double s = 0.0, s2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = uniform_open01(rng);
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        const double z = standard_normal(rng);
        s += z;
        s2 += z * z;
    }
    CHECK(std::abs(s / n) < 4.0 / std::sqrt(n));
    CHECK(std::abs(s2 / n - 1.0) < 0.02);
}

TEST_CASE("sample_categorical inverts the cumulative distribution")
{
    const std::vector<double> p = {0.2, 0.0, 0.5, 0.3};
    CHECK(sample_categorical(p, 0.0) == 0);
    CHECK(sample_categorical(p, 0.19) == 0);
    CHECK(sample_categorical(p, 0.2) == 2);
    CHECK(sample_categorical(p, 0.71) == 3);
    CHECK(sample_categorical(p, 0.9999999999999999) == 3);
    const std::vector<double> tail_zero = {0.5, 0.5, 0.0};
    CHECK(sample_categorical(tail_zero, 1.0) == 1);
}
