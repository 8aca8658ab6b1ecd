#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "wlpost/diagnostics.hpp"
#include "wlpost/models/cftp.hpp"
#include "wlpost/models/ergm.hpp"
#include "wlpost/models/image_seg.hpp"
#include "wlpost/models/ising.hpp"
#include "wlpost/oracle.hpp"

using namespace wlpost;

namespace {

// Independent statistics for ERGM graphs, straight from the index-tuple sums.
std::array<double, 4> brute_ergm(const ErgmGraph& g, bool literal)
{
    const int n = g.size();
    std::array<double, 4> s{0, 0, 0, 0};
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            s[0] += g.edge(i, j);
            for (int k = j + 1; k < n; ++k) {
                s[3] += g.edge(i, j) && g.edge(j, k) && g.edge(i, k);
                if (literal)
                    s[1] += g.edge(i, k) && g.edge(j, k);
                for (int l = k + 1; literal && l < n; ++l)
                    s[2] += g.edge(i, l) && g.edge(j, l) && g.edge(k, l);
            }
        }
    if (!literal) {
        for (int v = 0; v < n; ++v) {
            const double d = g.degree(v);
            s[1] += d * (d - 1) / 2;
            s[2] += d * (d - 1) * (d - 2) / 6;
        }
    }
    return s;
}

ErgmGraph random_graph(int n, double p, Rng& rng)
{
    ErgmGraph g(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            g.set_edge(i, j, uniform01(rng) < p);
    return g;
}

}  // namespace

TEST_CASE("ising_stat examples")
{
    IsingLattice all(2, 2, 1);
    CHECK(ising_stat(all)[0] == 4.0);
    CHECK(ising_stat(IsingLattice::checkerboard(2, 2))[0] == -4.0);
    all.set(0, 0, -1);
    CHECK(ising_stat(all)[0] == 0.0);
    CHECK(ising_bond_count(64, 64) == 8064);
    CHECK(ising_stat(IsingLattice(3, 5, 1))[0] == ising_bond_count(3, 5));
}

TEST_CASE("heat-bath conditional probabilities")
{
    CHECK(heatbath_prob_plus(0.7, 0) == 0.5);
    CHECK(heatbath_prob_plus(0.4, 2) == doctest::Approx(1.0 / (1.0 + std::exp(-1.6))));
    CHECK(heatbath_prob_plus(0.0, 4) == 0.5);
}

TEST_CASE("at theta = 0 the heat-bath sweep draws independent fair spins")
{
    Rng rng = make_stream(1, "hb0");
    IsingLattice lat(8, 8, 1);
    double plus = 0.0, pairs = 0.0;
    const int sweeps = 2000;
    for (int k = 0; k < sweeps; ++k) {
        ising_heatbath_sweep(lat, 0.0, rng);
        for (int i = 0; i < lat.size(); ++i)
            plus += lat[i] > 0;
        pairs += ising_stat(lat)[0];
    }
    const double n = static_cast<double>(sweeps) * lat.size();
    CHECK(std::abs(plus / n - 0.5) <= 4.0 * 0.5 / std::sqrt(n));
    CHECK(std::abs(pairs / sweeps) <= 4.0 * std::sqrt(ising_bond_count(8, 8) / static_cast<double>(sweeps)));
}

TEST_CASE("heat-bath sweep tracks the statistic incrementally")
{
    Rng rng = make_stream(2, "hbinc");
    IsingLattice lat = IsingLattice::random(5, 7, rng);
    IsingSweepKernel kernel(lat);
    const double theta = 0.3;
    for (int k = 0; k < 100; ++k) {
        kernel.sweep(std::span<const double>(&theta, 1), rng);
        CHECK(kernel.stats()[0] == ising_stat(kernel.lattice())[0]);
    }
}

TEST_CASE("heat-bath sweeps leave the 2x2 Ising law invariant")
{
    const double theta = 0.4;
    Rng rng = make_stream(3, "hb");
    IsingLattice lat(2, 2, 1);
    std::vector<std::uint64_t> counts(16, 0);
    for (int k = 0; k < 100000; ++k) {
        ising_heatbath_sweep(lat, theta, rng);
        counts[ising_state_index(lat)] += 1;
    }
    const auto probs = exact_state_probabilities(EnumerableInstance::ising(2, 2), std::span<const double>(&theta, 1));
    CHECK(chi_square_test(counts, probs).p_value > 0.001);
}

TEST_CASE("CFTP coalesces immediately at theta = 0 and is exact at theta = 0.4")
{
    Rng rng = make_stream(4, "cftp");
    const auto r0 = cftp_sample_detailed(4, 4, 0.0, rng);
    CHECK(r0.horizon == 1);
    CHECK_THROWS(cftp_sample(2, 2, -0.1, rng));

    std::vector<std::uint64_t> counts(16, 0);
    std::uint64_t checks = 0;
    for (int k = 0; k < 100000; ++k) {
        const auto r = cftp_sample_detailed(2, 2, 0.4, rng);
        checks += r.monotonicity_checks;
        counts[ising_state_index(r.sample)] += 1;
    }
    CHECK(checks > 0);
    const double theta = 0.4;
    const auto probs = exact_state_probabilities(EnumerableInstance::ising(2, 2), std::span<const double>(&theta, 1));
    CHECK(chi_square_test(counts, probs).p_value > 0.001);
}

TEST_CASE("CFTP reports non-coalescence")
{
    Rng rng = make_stream(5, "cftp-fail");
    CftpOptions opts;
    opts.max_sweeps = 2;
    CHECK_THROWS_AS(cftp_sample(16, 16, 0.9, rng, opts), std::runtime_error);
}

TEST_CASE("noisy image simulation")
{
    Rng rng = make_stream(6, "noise");
    const IsingLattice x = IsingLattice::random(64, 64, rng);
    const auto exact = simulate_noisy_image(x, 0.0, rng);
    for (int i = 0; i < x.size(); ++i)
        CHECK(exact[static_cast<std::size_t>(i)] == x[i]);

    const double sigma = 0.5;
    const auto y = simulate_noisy_image(x, sigma, rng);
    double m = 0.0, v = 0.0;
    for (int i = 0; i < x.size(); ++i)
        m += y[static_cast<std::size_t>(i)] - x[i];
    m /= x.size();
    for (int i = 0; i < x.size(); ++i)
        v += std::pow(y[static_cast<std::size_t>(i)] - x[i] - m, 2);
    v /= x.size() - 1;
    CHECK(std::abs(m) <= 4.0 * sigma / 64.0);
    CHECK(std::abs(v / (sigma * sigma) - 1.0) <= 0.1);
}

TEST_CASE("noise-variance draws follow the inverse-gamma conditional")
{
    // |S| = 4 and SSR = 2 give InvGamma(2, 1), whose mean is 1
    IsingLattice x(2, 2, 1);
    const std::vector<double> y = {1.0 + std::sqrt(0.5), 1.0 - std::sqrt(0.5), 1.0 + std::sqrt(0.5), 1.0 - std::sqrt(0.5)};
    CHECK(sum_squared_residuals(x, y) == doctest::Approx(2.0));
    Rng rng = make_stream(7, "ig");
    double s = 0.0;
    const int n = 100000;
    for (int k = 0; k < n; ++k) {
        const double d = sigma2_draw(x, y, rng);
        REQUIRE(d > 0.0);
        s += d;
    }
    CHECK(std::abs(s / n - 1.0) <= 0.02);
    const std::vector<double> exact = {1.0, 1.0, 1.0, 1.0};
    CHECK_THROWS_AS(sigma2_draw(x, exact, rng), std::domain_error);
}

TEST_CASE("scaling SSR by t scales the variance draws by t")
{
    Rng rng = make_stream(8, "scale");
    const double t = 3.5;
    std::vector<double> a, b;
    for (int k = 0; k < 10000; ++k) {
        a.push_back(t * inverse_gamma_draw(5.0, 2.0, rng));
        b.push_back(inverse_gamma_draw(5.0, 2.0 * t, rng));
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    // two-sample Kolmogorov-Smirnov statistic
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
    }
    const double n_eff = a.size() * b.size() / static_cast<double>(a.size() + b.size());
    CHECK(d * std::sqrt(n_eff) < 1.95);  // 0.001 critical value of the KS distribution
}

TEST_CASE("pixel conditional probabilities")
{
    CHECK(pixel_prob_plus(0.7, 0, 0.0, 0.3) == doctest::Approx(0.5));
    CHECK(pixel_prob_plus(0.0, 3, 1.0, 0.5) == doctest::Approx(1.0 / (1.0 + std::exp(-4.0))).epsilon(1e-12));
    CHECK(pixel_prob_plus(0.0, 3, 1.0, 0.5) == doctest::Approx(0.9820).epsilon(1e-4));
}

TEST_CASE("pixel sweeps leave the conditional image law invariant")
{
    const std::vector<double> y = {0.7, -0.3, 1.2, -0.9};
    ImageSegState st{IsingLattice(2, 2), 0.8, 0.4, y};
    Rng rng = make_stream(9, "pix");
    std::vector<std::uint64_t> counts(16, 0);
    for (int k = 0; k < 100000; ++k) {
        pixel_sweep(st, rng);
        counts[ising_state_index(st.x)] += 1;
    }
    CHECK(chi_square_test(counts, image_conditional_probabilities(2, 2, 0.4, y, 0.8)).p_value > 0.001);
}

TEST_CASE("initial image state")
{
    const std::vector<double> y = {0.3, -1.2, 2.0, -0.1};
    const auto st = initial_image_state(2, 2, y);
    CHECK(st.x[0] == 1);
    CHECK(st.x[1] == -1);
    CHECK(st.x[2] == 1);
    CHECK(st.x[3] == -1);
    CHECK(st.theta == 0.5);
    CHECK(st.sigma2 > 0.0);
}

TEST_CASE("ergm_stats examples")
{
    CHECK(ergm_stats(ErgmGraph(5)) == SufficientStats{0, 0, 0, 0});
    CHECK(ergm_stats(ErgmGraph::complete(4)) == SufficientStats{6, 4, 1, 4});
    CHECK(ergm_stats(ErgmGraph::complete(4), ErgmStatistics::Standard) == SufficientStats{6, 12, 4, 4});
    ErgmGraph tri(4);
    tri.set_edge(0, 1, true);
    tri.set_edge(1, 2, true);
    tri.set_edge(0, 2, true);
    CHECK(ergm_stats(tri) == SufficientStats{3, 1, 0, 1});
    CHECK(ergm_stats(tri, ErgmStatistics::Standard) == SufficientStats{3, 3, 0, 1});
}

TEST_CASE("ergm statistics and change statistics agree with brute force")
{
    Rng rng = make_stream(10, "ergm");
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 8);
        ErgmGraph g = random_graph(n, 0.4, rng);
        for (auto def : {ErgmStatistics::Literal, ErgmStatistics::Standard}) {
            const bool literal = def == ErgmStatistics::Literal;
            const auto s = ergm_stats(g, def);
            const auto b = brute_ergm(g, literal);
            for (std::size_t l = 0; l < 4; ++l)
                CHECK(s[l] == b[l]);
            const int i = static_cast<int>(rng() % n);
            const int j = (i + 1 + static_cast<int>(rng() % (n - 1))) % n;
            ErgmGraph on = g, off = g;
            on.set_edge(i, j, true);
            off.set_edge(i, j, false);
            const auto d = ergm_change_stats(g, i, j, def);
            const auto son = brute_ergm(on, literal), soff = brute_ergm(off, literal);
            for (std::size_t l = 0; l < 4; ++l)
                CHECK(d[l] == son[l] - soff[l]);
        }
    }
}

TEST_CASE("ergm graph validation")
{
    ErgmGraph g(3);
    CHECK_THROWS(g.set_edge(1, 1, true));
    CHECK_THROWS(g.set_edge(0, 3, true));
    CHECK_THROWS(parse_ergm_statistics("triangles"));
    CHECK(parse_ergm_statistics("standard") == ErgmStatistics::Standard);
}

TEST_CASE("dyad sweep: independent edges when only the tie parameter is active")
{
    Rng rng = make_stream(11, "dyad");
    ErgmGraph g(6);
    for (double t1 : {0.0, -1.3}) {
        const std::vector<double> theta = {t1, 0.0, 0.0, 0.0};
        double edges = 0.0;
        const int sweeps = 20000;
        for (int k = 0; k < sweeps; ++k) {
            ergm_flip_sweep(g, theta, ErgmStatistics::Literal, rng);
            edges += g.edge_count();
        }
        const double p = 1.0 / (1.0 + std::exp(-t1));
        const double n = sweeps * 15.0;
        CHECK(std::abs(edges / n - p) <= 4.0 * std::sqrt(p * (1 - p) / n));
    }
}

TEST_CASE("dyad sweeps leave the 4-node ERGM law invariant")
{
    const std::vector<double> theta = {-1.0, 0.5, 0.0, 0.0};
    for (auto def : {ErgmStatistics::Literal, ErgmStatistics::Standard}) {
        Rng rng = make_stream(12, to_string(def));
        ErgmGraph g(4);
        std::vector<std::uint64_t> counts(64, 0);
        for (int k = 0; k < 100000; ++k) {
            ergm_flip_sweep(g, theta, def, rng);
            counts[ergm_graph_index(g)] += 1;
        }
        CHECK(chi_square_test(counts, exact_state_probabilities(EnumerableInstance::ergm(4, def), theta)).p_value > 0.001);
    }
}

TEST_CASE("ergm kernel tracks its statistics and round-trips")
{
    Rng rng = make_stream(13, "kern");
    ErgmSweepKernel k(random_graph(7, 0.3, rng), ErgmStatistics::Standard);
    const std::vector<double> theta = {-0.5, 0.1, -0.05, 0.3};
    for (int s = 0; s < 50; ++s) {
        k.sweep(theta, rng);
        CHECK(k.stats() == ergm_stats(k.graph(), ErgmStatistics::Standard));
    }
    std::stringstream ss;
    k.save(ss);
    ErgmSweepKernel k2(ErgmGraph(7), ErgmStatistics::Standard);
    k2.load(ss);
    CHECK(k2.graph() == k.graph());
    CHECK(k2.stats() == k.stats());
}

TEST_CASE("edge list parsing")
{
    std::istringstream empty("# header only\n16\n");
    const auto g = parse_edge_list(empty);
    CHECK(g.size() == 16);
    CHECK(g.edge_count() == 0);

    std::istringstream loop("3\n1 2\n1 1\n");
    try {
        parse_edge_list(loop, "loop.txt");
        FAIL("expected an error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("loop.txt:3") != std::string::npos);
        CHECK(std::string(e.what()).find("self-loop") != std::string::npos);
    }
    std::istringstream range("3\n1 4\n");
    CHECK_THROWS_WITH_AS(parse_edge_list(range, "r"), doctest::Contains("r:2"), std::runtime_error);
    std::istringstream bad("3\n1 x\n");
    CHECK_THROWS_AS(parse_edge_list(bad), std::runtime_error);
    std::istringstream dup("3\n1 2\n2 1\n");
    CHECK_THROWS_AS(parse_edge_list(dup), std::runtime_error);
    CHECK_THROWS(load_edge_list("/nonexistent/edges.txt"));
}

TEST_CASE("bundled Florentine business network")
{
    const std::string path = std::string(WLPOST_DATA_DIR) + "/florentine_business.txt";
    const auto g = load_edge_list(path);
    CHECK(g.size() == 16);
    std::ifstream is(path);
    std::string line;
    int edge_lines = -1;  // the node-count line
    while (std::getline(is, line))
        if (!line.empty() && line[0] != '#')
            ++edge_lines;
    CHECK(g.edge_count() == edge_lines);
    CHECK(g.edge_count() == 15);
}
