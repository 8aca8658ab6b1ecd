#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <doctest.h>

#include "wlpost/diagnostics.hpp"
#include "wlpost/random.hpp"

using namespace wlpost;

TEST_CASE("acf examples")
{
    const std::vector<double> s = {1.0, 3.0, 2.0, 5.0, 4.0};
    CHECK(acf(s, 2)[0] == doctest::Approx(1.0));
    std::vector<double> alt(10000);
    for (std::size_t i = 0; i < alt.size(); ++i)
        alt[i] = i % 2 ? -1.0 : 1.0;
    CHECK(acf(alt, 1)[1] == doctest::Approx(-1.0).epsilon(1e-3));
    Rng rng = make_stream(1, "acf");
    std::vector<double> u(100000);
    for (auto& v : u)
        v = uniform01(rng);
    const auto r = acf(u, 20);
    for (std::size_t k = 1; k <= 20; ++k)
        CHECK(std::abs(r[k]) < 0.02);
    CHECK_THROWS_AS(acf(std::vector<double>(10, 2.0), 3), std::domain_error);
    CHECK_THROWS_AS(acf(s, 5), std::invalid_argument);
}

TEST_CASE("summaries of constant and uniform traces")
{
    std::vector<double> trace(200, 7.0);
    trace[0] = -100.0;  // inside the burn-in
    std::vector<std::uint8_t> acc(200, 0);
    const auto c = summarize(trace, 1, acc, 1);
    CHECK(c.samples == 199);
    CHECK(c.mean[0] == 7.0);
    CHECK(c.q025[0] == 7.0);
    CHECK(c.q975[0] == 7.0);
    CHECK(c.covariance(0, 0) == 0.0);
    CHECK(c.acf[0].empty());

    Rng rng = make_stream(2, "unif");
    std::vector<double> u(100000);
    for (auto& v : u)
        v = uniform01(rng);
    std::vector<std::uint8_t> acc2(u.size(), 1);
    const auto s = summarize(u, 1, acc2, 0);
    CHECK(std::abs(s.mean[0] - 0.5) <= 0.005);
    CHECK(std::abs(s.q025[0] - 0.025) <= 0.005);
    CHECK(std::abs(s.q975[0] - 0.975) <= 0.005);
    CHECK(s.acceptance_rate == 1.0);

    CHECK_THROWS(summarize(u, 1, acc2, u.size()));
}

TEST_CASE("summary covariance of a two-column trace")
{
    // rows (0,0), (1,2), (2,4): covariance with N - 1 denominator
    const std::vector<double> t = {0, 0, 1, 2, 2, 4};
    const std::vector<std::uint8_t> acc = {1, 0, 1};
    const auto s = summarize(t, 2, acc, 0, 1);
    CHECK(s.covariance(0, 0) == doctest::Approx(1.0));
    CHECK(s.covariance(1, 1) == doctest::Approx(4.0));
    CHECK(s.covariance(0, 1) == doctest::Approx(2.0));
    CHECK(s.covariance(1, 0) == s.covariance(0, 1));
    const auto j = to_json(s);
    CHECK(j["mean"][1].get<double>() == doctest::Approx(2.0));
}

TEST_CASE("quantiles interpolate between order statistics")
{
    const std::vector<double> v = {1.0, 2.0, 3.0, 4.0, 5.0};
    CHECK(quantile_sorted(v, 0.0) == 1.0);
    CHECK(quantile_sorted(v, 1.0) == 5.0);
    CHECK(quantile_sorted(v, 0.5) == 3.0);
    CHECK(quantile_sorted(v, 0.1) == doctest::Approx(1.4));
}

TEST_CASE("histogram bins cover the range and count every value")
{
    const std::vector<double> v = {0.0, 0.1, 0.5, 0.9, 1.0};
    const auto h = histogram(v, 4);
    REQUIRE(h.size() == 4);
    std::uint64_t total = 0;
    for (const auto& b : h)
        total += b.count;
    CHECK(total == 5);
    CHECK(h.front().left == 0.0);
    CHECK(h.back().right == 1.0);
    CHECK(h.back().count == 2);
    const auto path = (std::filesystem::temp_directory_path() / "wlpost_hist_test.csv").string();
    write_histogram_csv(h, path);
    std::ifstream is(path);
    std::string header;
    std::getline(is, header);
    CHECK(header == "count,left,right");
    std::remove(path.c_str());
}

TEST_CASE("chi-square survival function and goodness of fit")
{
    CHECK(chi_square_sf(3.841458820694124, 1.0) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(chi_square_sf(0.0, 3.0) == 1.0);
    const std::vector<std::uint64_t> perfect = {250, 250, 500};
    const std::vector<double> p = {0.25, 0.25, 0.5};
    const auto r = chi_square_test(perfect, p);
    CHECK(r.statistic == 0.0);
    CHECK(r.dof == 2.0);
    CHECK(r.p_value == 1.0);
    const std::vector<std::uint64_t> off = {400, 100, 500};
    CHECK(chi_square_test(off, p).p_value < 1e-10);
}

TEST_CASE("occupancy report matches the flatness test")
{
    const std::vector<std::uint64_t> o = {60, 40};
    const auto r = occupancy_report(o, 0.2);
    CHECK(r.max_deviation == doctest::Approx(0.1));
    CHECK(r.threshold == doctest::Approx(0.1));
    CHECK(r.flat);
}
