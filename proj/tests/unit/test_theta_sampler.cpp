#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include <doctest.h>

#include "wlpost/diagnostics.hpp"
#include "wlpost/oracle.hpp"
#include "wlpost/theta_sampler.hpp"

using namespace wlpost;

namespace {

double log_z_pair(double t) { return std::log(2.0 * std::exp(t) + 2.0 * std::exp(-t)); }

LogZFunction pair_log_z()
{
    return [](std::span<const double> t) { return log_z_pair(t[0]); };
}

// Bowker test of symmetry for a square count matrix.
double symmetry_p_value(const std::vector<std::vector<double>>& n)
{
    double stat = 0.0, dof = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i)
        for (std::size_t j = i + 1; j < n.size(); ++j) {
            const double s = n[i][j] + n[j][i];
            if (s > 0) {
                stat += (n[i][j] - n[j][i]) * (n[i][j] - n[j][i]) / s;
                dof += 1.0;
            }
        }
    return chi_square_sf(stat, dof);
}

}  // namespace

TEST_CASE("reflection examples")
{
    CHECK(reflect_into(-0.03, 0.0, 1.0) == doctest::Approx(0.03).epsilon(1e-12));
    CHECK(reflect_into(1.25, 0.0, 1.0) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(reflect_into(0.4, 0.0, 1.0) == 0.4);
    CHECK(reflect_into(-2.3, 0.0, 1.0) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(reflect_into(7.5, -1.0, 1.0) == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("reflection is an involution away from the box and fixes interior points")
{
    Rng rng = make_stream(1, "refl");
    for (int k = 0; k < 1000; ++k) {
        const double x = uniform01(rng);
        CHECK(reflect_into(x, 0.0, 1.0) == x);
        const double once = reflect_into(-x, 0.0, 1.0);
        CHECK(once == doctest::Approx(x).epsilon(1e-14));
        const double y = 10.0 * (uniform01(rng) - 0.5);
        const double r = reflect_into(y, 0.0, 1.0);
        CHECK(r >= 0.0);
        CHECK(r <= 1.0);
    }
}

TEST_CASE("reflected-uniform proposal is symmetric on a grid")
{
    const auto prop = RwProposal{ReflectedUniform{{0.35}}, Box::cube(1, 0.0, 1.0)};
    Rng rng = make_stream(2, "sym");
    const std::size_t cells = 10;
    std::vector<std::vector<double>> n(cells, std::vector<double>(cells, 0.0));
    for (int k = 0; k < 1000000; ++k) {
        const ParameterPoint from{uniform_open01(rng)};
        const auto to = propose(from, prop, rng);
        REQUIRE(to.has_value());
        const auto i = std::min<std::size_t>(cells - 1, static_cast<std::size_t>(from[0] * cells));
        const auto j = std::min<std::size_t>(cells - 1, static_cast<std::size_t>((*to)[0] * cells));
        n[i][j] += 1.0;
    }
    CHECK(symmetry_p_value(n) > 0.001);
}

TEST_CASE("propose examples")
{
    Rng rng = make_stream(3, "prop");
    const auto inside = RwProposal{ReflectedUniform{{1e-9}}, Box::cube(1, 0.0, 1.0)};
    const auto p = propose(ParameterPoint{0.5}, inside, rng);
    REQUIRE(p.has_value());
    CHECK(std::abs((*p)[0] - 0.5) <= 1e-9);

    RwProposal wide{GaussianBlock{1e6, Eigen::MatrixXd::Identity(1, 1)}, Box::cube(1, 0.0, 1.0)};
    int rejected = 0;
    for (int k = 0; k < 100; ++k)
        rejected += !propose(ParameterPoint{0.5}, wide, rng).has_value();
    CHECK(rejected >= 99);
}

TEST_CASE("a rejected-in-place proposal appends the unchanged theta")
{
    const EnergyModel model(Box::cube(1, 0.0, 1.0), SufficientStats{1});
    RwProposal wide{GaussianBlock{1e9, Eigen::MatrixXd::Identity(1, 1)}, Box::cube(1, 0.0, 1.0)};
    ThetaChain chain(ParameterPoint{0.5});
    AdaptState adapt = AdaptState::initial(1);
    Rng rng = make_stream(4, "rej");
    const auto r = theta_step(chain, model, wide, adapt, pair_log_z(), rng);
    CHECK(r.rejected_in_place);
    CHECK_FALSE(r.accepted);
    CHECK(chain.length() == 1);
    CHECK(chain.row(0)[0] == 0.5);
}

TEST_CASE("mh_log_acceptance examples")
{
    const EnergyModel model(Box::cube(1, 0.0, 1.0), SufficientStats{1});
    const ParameterPoint a{0.4}, b{0.5};
    CHECK(mh_log_acceptance(model, a, a, 3.0, 3.0) == 0.0);
    const double base = mh_log_acceptance(model, a, b, 1.0, 2.0);
    CHECK(mh_log_acceptance(model, a, b, 1.0, 2.0 + 0.75) == doctest::Approx(base - 0.75).epsilon(1e-15));
    const double expected = 0.1 + (log_z_pair(0.4) - log_z_pair(0.5));
    CHECK(mh_log_acceptance(model, a, b, log_z_pair(0.4), log_z_pair(0.5)) ==
          doctest::Approx(expected).epsilon(1e-14));
    CHECK(mh_log_acceptance(model, a, ParameterPoint{1.5}, 0.0, 0.0) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("adaptation at exactly the target rate has no log-scale drift")
{
    // Bernoulli(0.3) acceptances: log_scale is a sum of zero-mean innovations
    const ParameterPoint x{0.5};
    Rng rng = make_stream(11, "drift");
    const int reps = 400;
    double sum = 0.0, sum2 = 0.0;
    for (int r = 0; r < reps; ++r) {
        AdaptState a = AdaptState::initial(1);
        for (int k = 0; k < 2000; ++k)
            adapt_in_place(a, uniform01(rng) < 0.3, x.view());
        sum += a.log_scale;
        sum2 += a.log_scale * a.log_scale;
    }
    const double mean = sum / reps;
    const double sd = std::sqrt(sum2 / reps - mean * mean);
    CHECK(std::abs(mean) <= 4.0 * sd / std::sqrt(static_cast<double>(reps)));
    // a rate above target pushes the scale up
    AdaptState up = AdaptState::initial(1);
    for (int k = 0; k < 1000; ++k)
        adapt_in_place(up, true, x.view());
    CHECK(up.log_scale > 1.0);
}

TEST_CASE("log-scale is clamped")
{
    AdaptState a = AdaptState::initial(1);
    const ParameterPoint x{0.5};
    for (int k = 0; k < 1000000; ++k)
        adapt_in_place(a, true, x.view());
    CHECK(a.log_scale == 20.0);
}

TEST_CASE("moment recursion: constant stream gives zero covariance, iid normals give identity")
{
    AdaptState c = AdaptState::initial(2);
    const std::vector<double> pt = {0.3, -0.7};
    for (int k = 0; k < 1000; ++k)
        adapt_in_place(c, true, pt);
    CHECK(c.cov.cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(c.mean(0) == doctest::Approx(0.3));

    AdaptState n = AdaptState::initial(2);
    Rng rng = make_stream(5, "iid");
    for (int k = 0; k < 10000; ++k) {
        const std::vector<double> z = {standard_normal(rng), standard_normal(rng)};
        adapt_in_place(n, false, z);
    }
    CHECK(std::abs(n.cov(0, 0) - 1.0) <= 0.1);
    CHECK(std::abs(n.cov(1, 1) - 1.0) <= 0.1);
    CHECK(std::abs(n.cov(0, 1)) <= 0.1);
    CHECK(n.cov(0, 1) == n.cov(1, 0));
}

TEST_CASE("effective proposal scales the window and blends the covariance after the threshold")
{
    const Box box = Box::cube(2, -1.0, 1.0);
    AdaptState a = AdaptState::initial(2);
    a.log_scale = std::log(2.0);
    const auto ru = effective_proposal(default_reflected_uniform(box), a);
    CHECK(std::get<ReflectedUniform>(ru.variant).half_width[0] == doctest::Approx(0.4));
    const auto gb0 = effective_proposal(default_gaussian_block(box), a);
    CHECK(std::get<GaussianBlock>(gb0.variant).cov.isIdentity());
    a.steps = 1000;
    a.cov << 4.0, 1.0, 1.0, 2.0;
    const auto gb1 = effective_proposal(default_gaussian_block(box), a);
    CHECK(std::get<GaussianBlock>(gb1.variant).cov(0, 1) == 1.0);
    CHECK(std::get<GaussianBlock>(gb1.variant).sigma == doctest::Approx(2.0 * 2.38 / std::sqrt(2.0)));
    gb1.validate();
}

TEST_CASE("with the exact partition function the chain targets the exact posterior")
{
    const auto inst = EnumerableInstance::ising(1, 2);
    const SufficientStats observed{1};
    const Box box = Box::cube(1, 0.0, 1.0);
    const auto exact = exact_posterior_mean(inst, observed, box);
    const EnergyModel model(box, observed);
    ThetaChain chain(box.center(), 1999);
    AdaptState adapt = AdaptState::initial(1);
    Rng rng = make_stream(6, "post");
    const auto prop = default_reflected_uniform(box);
    for (int k = 0; k < 200000; ++k)
        theta_step(chain, model, prop, adapt, pair_log_z(), rng);
    const auto s = summarize(chain, chain.burn_in());
    CHECK(s.samples == 200000 - 1999);
    CHECK(std::abs(s.mean[0] - exact.mean[0]) <= 0.01);
    CHECK(std::abs(s.q025[0] - exact.q025[0]) <= 0.02);
    CHECK(std::abs(s.q975[0] - exact.q975[0]) <= 0.02);
}

TEST_CASE("detailed balance: transition flows between cells are symmetric under the exact target")
{
    const SufficientStats observed{1};
    const Box box = Box::cube(1, 0.0, 1.0);
    const EnergyModel model(box, observed);
    const auto prop = RwProposal{ReflectedUniform{{0.3}}, box};
    Rng rng = make_stream(7, "db");
    ParameterPoint theta{0.5};
    double lz = log_z_pair(theta[0]);
    const std::size_t cells = 5;
    std::vector<std::vector<double>> flow(cells, std::vector<double>(cells, 0.0));
    std::vector<double> occupancy(cells, 0.0);
    const auto cell = [&](double t) { return std::min<std::size_t>(cells - 1, static_cast<std::size_t>(t * cells)); };
    const int n = 400000;
    for (int k = 0; k < n; ++k) {
        const auto cand = propose(theta, prop, rng);
        const double lz_new = log_z_pair((*cand)[0]);
        const double la = mh_log_acceptance(model, theta, *cand, lz, lz_new);
        const auto from = cell(theta[0]);
        if (std::log(uniform_open01(rng)) < la) {
            theta = *cand;
            lz = lz_new;
        }
        flow[from][cell(theta[0])] += 1.0;
        occupancy[cell(theta[0])] += 1.0;
    }
    CHECK(symmetry_p_value(flow) > 0.001);
    // stationary cell masses agree with the exact posterior
    double norm = 0.0;
    std::vector<double> mass(cells, 0.0);
    const int grid = 100000;
    for (int g = 0; g < grid; ++g) {
        const double t = (g + 0.5) / grid;
        const double w = std::exp(t - log_z_pair(t));
        mass[cell(t)] += w;
        norm += w;
    }
    for (std::size_t c = 0; c < cells; ++c)
        CHECK(std::abs(occupancy[c] / n - mass[c] / norm) <= 0.01);
}

TEST_CASE("theta chain and adaptation state round-trip through save/load")
{
    ThetaChain a(ParameterPoint{0.1, 0.2}, 5);
    a.append(ParameterPoint{0.3, 0.4}, true, -0.5);
    a.append(ParameterPoint{0.3, 0.4}, false, -2.0);
    std::stringstream ss;
    a.save(ss);
    ThetaChain b(ParameterPoint{0.0});
    b.load(ss);
    CHECK(b.trace() == a.trace());
    CHECK(b.accepted() == a.accepted());
    CHECK(b.burn_in() == 5);
    CHECK(b.current() == a.current());
    CHECK(a.acceptance_rate(0, 2) == 0.5);

    AdaptState s = AdaptState::initial(2);
    const std::vector<double> x = {1.0, 2.0};
    adapt_in_place(s, true, x);
    std::stringstream ss2;
    save_adapt(ss2, s);
    AdaptState t = AdaptState::initial(1);
    load_adapt(ss2, t);
    CHECK(t.steps == s.steps);
    CHECK(t.log_scale == s.log_scale);
    CHECK(t.mean == s.mean);
}
