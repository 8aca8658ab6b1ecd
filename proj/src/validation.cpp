#include "wlpost/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <sstream>

#include "wlpost/diagnostics.hpp"
#include "wlpost/models/cftp.hpp"
#include "wlpost/models/ergm.hpp"
#include "wlpost/models/image_seg.hpp"
#include "wlpost/models/ising.hpp"
#include "wlpost/oracle.hpp"
#include "wlpost/random.hpp"
#include "wlpost/wl_engine.hpp"
#include "wlpost/z_surface.hpp"

namespace wlpost {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Pinned tolerances.
constexpr double kSurfaceTol = 0.05;        // criteria 1 and 10 (hard companion)
constexpr double kWeightTol = 0.1;          // criterion 2
constexpr double kMeanTol = 0.02;           // criterion 3
constexpr double kQuantileTol = 0.03;       // criterion 3
constexpr double kChiSquareAlpha = 0.001;   // criteria 4 and 5
constexpr double kMassTol = 1e-12;          // criterion 6
constexpr double kAcceptLo = 0.25;          // criterion 7
constexpr double kAcceptHi = 0.35;
constexpr double kLlnTol = 0.01;            // criterion 8
constexpr double kIsingMeanLo = 0.36;       // criterion 9
constexpr double kIsingMeanHi = 0.44;
constexpr double kAcf50Max = 0.3;
constexpr double kIsingMinutes = 30.0;
constexpr double kErgmMeanTol = 0.5;        // criterion 10
constexpr double kSigmaTol = 0.1;           // criterion 11
constexpr double kSurfaceMinutes = 5.0;     // criterion 1 runtime

// Reference values for the Florentine business network posterior.
constexpr double kErgmRefMean[4] = {-2.14, 0.94, -1.06, 0.09};
constexpr double kErgmRefLo[4] = {-3.32, -0.43, -2.72, -1.39};
constexpr double kErgmRefHi[4] = {-0.81, 2.49, 0.04, 1.07};

constexpr std::uint64_t kSeed = 20240611;

void say(const ValidationOptions& o, const std::string& msg)
{
    if (o.log)
        *o.log << msg << std::endl;
}

double since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::uint64_t fnv1a(const std::string& s)
{
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

// ---------------------------------------------------------------- WL-only runs

struct WlSurfaceRun {
    std::unique_ptr<WangLandauChain> chain;
    std::unique_ptr<SampleStore> store;
    SmoothingKernel kernel{1.0};
    std::uint64_t flat_iterations = 0;
    double seconds = 0.0;

    ZSurface surface() const { return ZSurface(*store, chain->particles(), chain->state().weights.c, kernel); }
};

// WL chain to gamma <= eps1, then `recorded` further iterations recorded in the store.
WlSurfaceRun run_wl_surface(ParticleSet particles, std::unique_ptr<SweepKernel> kernel, std::uint64_t recorded,
                            std::uint64_t seed)
{
    const auto t0 = Clock::now();
    WlSurfaceRun r;
    r.kernel = SmoothingKernel(default_bandwidth(particles));
    const std::size_t d = particles.size();
    const std::size_t q = particles.dim();
    r.chain = std::make_unique<WangLandauChain>(std::move(particles), std::move(kernel), WlOptions{});
    r.store = std::make_unique<SampleStore>(d, q);
    Rng krng = make_stream(seed, "wl-kernel");
    Rng lrng = make_stream(seed, "wl-labels");
    while (!r.chain->deterministic()) {
        if (r.chain->state().iteration > 200000000ULL)
            throw std::runtime_error("flat-histogram phase did not finish");
        r.chain->step(krng, lrng);
    }
    r.flat_iterations = r.chain->state().iteration;
    for (std::uint64_t k = 0; k < recorded; ++k) {
        const auto out = r.chain->step(krng, lrng);
        r.store->record(out.label, r.chain->kernel().stats());
    }
    r.seconds = since(t0);
    return r;
}

const WlSurfaceRun& ising33_surface_run()
{
    static std::unique_ptr<WlSurfaceRun> cached;
    if (!cached) {
        Rng prng = make_stream(kSeed, "particles");
        const Box box = Box::cube(1, 0.0, 1.0);
        auto particles = ParticleSet::uniform(box, 20, prng);
        Rng init = make_stream(kSeed, "init");
        auto kernel = std::make_unique<IsingSweepKernel>(IsingLattice::random(3, 3, init));
        cached = std::make_unique<WlSurfaceRun>(run_wl_surface(std::move(particles), std::move(kernel), 100000, kSeed));
    }
    return *cached;
}

// ---------------------------------------------------------------- pipeline configs

RunConfig small_ising_config(int rows, int cols, std::uint64_t seed, std::uint64_t data_seed)
{
    RunConfig c = default_config(ModelKind::Ising);
    c.rows = rows;
    c.cols = cols;
    c.theta_true = 0.4;
    c.particles = 20;
    c.theta_steps = 200000;
    c.burn_in = 1999;
    c.seed = seed;
    c.data_seed = data_seed;
    return c;
}

RunConfig mechanism_config()
{
    RunConfig c = small_ising_config(3, 3, kSeed + 6, kSeed + 6);
    c.theta_steps = 20000;
    return c;
}

RunConfig paper_ising_config()
{
    RunConfig c = default_config(ModelKind::Ising);
    c.seed = kSeed + 9;
    return c;
}

RunConfig ergm_config(const std::string& def)
{
    RunConfig c = default_config(ModelKind::Ergm);
    c.ergm_stats = def;
    c.seed = kSeed + 10;
    return c;
}

RunConfig image_config(int k)
{
    RunConfig c = default_config(ModelKind::ImageSeg);
    c.rows = 32;
    c.cols = 32;
    c.theta_true = 0.4;
    c.sigma_true = 0.5;
    c.seed = kSeed + 110 + static_cast<std::uint64_t>(k);
    return c;
}

std::vector<std::pair<std::string, RunConfig>> long_runs(bool full)
{
    std::vector<std::pair<std::string, RunConfig>> runs = {
        {"ising 1x2 (criterion 3)", small_ising_config(1, 2, kSeed + 3, kSeed + 3)},
        {"ising 3x3 (criterion 3)", small_ising_config(3, 3, kSeed + 3, kSeed + 3)},
        {"ising 3x3 seed A (criterion 8)", small_ising_config(3, 3, kSeed + 81, kSeed + 8)},
        {"ising 3x3 seed B (criterion 8)", small_ising_config(3, 3, kSeed + 82, kSeed + 8)},
        {"ising 3x3 (criterion 6)", mechanism_config()},
    };
    if (full) {
        runs.emplace_back("ising 64x64 (criterion 9)", paper_ising_config());
        runs.emplace_back("ergm literal (criterion 10)", ergm_config("literal"));
        runs.emplace_back("ergm standard (criterion 10)", ergm_config("standard"));
        for (int k = 0; k < 3; ++k)
            runs.emplace_back("imageseg 32x32 seed " + std::to_string(k + 1) + " (criterion 11)", image_config(k));
    }
    return runs;
}

double wall_seconds_of(const RunConfig& cfg)
{
    std::ifstream is((fs::path(cfg.out) / "wall_seconds.txt").string());
    double s = -1.0;
    if (is)
        is >> s;
    return s;
}

// ---------------------------------------------------------------- checks

CheckResult check_surface_accuracy(const ValidationOptions& o)
{
    const auto t0 = Clock::now();
    CheckResult r;
    r.id = "1";
    r.title = "Z-surface accuracy, 3x3 Ising, d=20";
    say(o, "criterion 1: WL run on 3x3 Ising");
    const auto& run = ising33_surface_run();
    const auto surface = run.surface();
    const auto inst = EnumerableInstance::ising(3, 3);
    const double half = 0.5;
    const double ref_est = surface.log_z(std::span<const double>(&half, 1));
    const double ref_exact = exact_log_z(inst, std::span<const double>(&half, 1));
    double worst = 0.0;
    nlohmann::json rows = nlohmann::json::array();
    for (int k = 1; k <= 19; ++k) {
        const double t = 0.05 * k;
        const double est = surface.log_z(std::span<const double>(&t, 1)) - ref_est;
        const double ex = exact_log_z(inst, std::span<const double>(&t, 1)) - ref_exact;
        worst = std::max(worst, std::abs(est - ex));
        rows.push_back({{"theta", t}, {"estimate", est}, {"exact", ex}});
    }
    r.measured = worst;
    r.tolerance = "<= " + std::to_string(kSurfaceTol) + " and runtime <= 5 min";
    r.details["grid"] = rows;
    r.details["flat_phase_iterations"] = run.flat_iterations;
    r.details["run_seconds"] = run.seconds;
    r.pass = worst <= kSurfaceTol && run.seconds <= kSurfaceMinutes * 60.0;
    r.seconds = since(t0);
    return r;
}

CheckResult check_weight_convergence(const ValidationOptions& o)
{
    const auto t0 = Clock::now();
    CheckResult r;
    r.id = "2";
    r.title = "log-weight differences match log Z differences, 3x3 Ising";
    say(o, "criterion 2: WL run on 3x3 Ising");
    const auto& run = ising33_surface_run();
    const auto inst = EnumerableInstance::ising(3, 3);
    const auto& c = run.chain->state().weights.c;
    const auto& ps = run.chain->particles();
    std::vector<double> lz(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i)
        lz[i] = exact_log_z(inst, ps.point(i));
    double worst = 0.0;
    for (std::size_t i = 0; i < ps.size(); ++i)
        for (std::size_t j = 0; j < ps.size(); ++j)
            worst = std::max(worst, std::abs((c[i] - c[j]) - (lz[i] - lz[j])));
    r.measured = worst;
    r.tolerance = "<= " + std::to_string(kWeightTol);
    r.details["c"] = c;
    r.details["exact_log_z"] = lz;
    r.pass = worst <= kWeightTol;
    r.seconds = since(t0);
    return r;
}

CheckResult check_posterior(const ValidationOptions& o)
{
    const auto t0 = Clock::now();
    CheckResult r;
    r.id = "3";
    r.title = "posterior mean and quantiles vs quadrature, 1x2 and 3x3 Ising";
    double worst_mean = 0.0, worst_q = 0.0;
    bool pass = true;
    for (auto [rows, cols] : {std::pair{1, 2}, std::pair{3, 3}}) {
        const auto cfg = small_ising_config(rows, cols, kSeed + 3, kSeed + 3);
        say(o, "criterion 3: pipeline run on " + std::to_string(rows) + "x" + std::to_string(cols));
        const auto run = cached_run(cfg, o);
        const auto exact =
            exact_posterior_mean(EnumerableInstance::ising(rows, cols), run.observed, Box::cube(1, 0.0, 1.0));
        const double dm = std::abs(run.summary.mean[0] - exact.mean[0]);
        const double dq = std::max(std::abs(run.summary.q025[0] - exact.q025[0]),
                                   std::abs(run.summary.q975[0] - exact.q975[0]));
        worst_mean = std::max(worst_mean, dm);
        worst_q = std::max(worst_q, dq);
        pass = pass && dm <= kMeanTol && dq <= kQuantileTol;
        r.details[std::to_string(rows) + "x" + std::to_string(cols)] = {
            {"observed_stat", run.observed.values},
            {"mean", run.summary.mean[0]},
            {"q025", run.summary.q025[0]},
            {"q975", run.summary.q975[0]},
            {"exact_mean", exact.mean[0]},
            {"exact_q025", exact.q025[0]},
            {"exact_q975", exact.q975[0]},
        };
    }
    r.measured = worst_mean;
    r.tolerance = "mean error <= " + std::to_string(kMeanTol) + ", quantile error <= " + std::to_string(kQuantileTol);
    r.details["worst_mean_error"] = worst_mean;
    r.details["worst_quantile_error"] = worst_q;
    r.pass = pass;
    r.seconds = since(t0);
    return r;
}

CheckResult check_cftp(const ValidationOptions& o)
{
    const auto t0 = Clock::now();
    CheckResult r;
    r.id = "4";
    r.title = "CFTP exactness, 2x2 lattice, theta = 0.4, 1e5 draws";
    say(o, "criterion 4: 1e5 CFTP draws");
    const double theta = 0.4;
    Rng rng = make_stream(kSeed + 4, "cftp");
    std::vector<std::uint64_t> counts(16, 0);
    std::uint64_t checks = 0, violations = 0;
    for (int k = 0; k < 100000; ++k) {
        try {
            const auto res = cftp_sample_detailed(2, 2, theta, rng);
            checks += res.monotonicity_checks;
            counts[ising_state_index(res.sample)] += 1;
        } catch (const std::logic_error&) {
            ++violations;
        }
    }
    const auto probs = exact_state_probabilities(EnumerableInstance::ising(2, 2), std::span<const double>(&theta, 1));
    const auto chi = chi_square_test(counts, probs);
    r.measured = chi.p_value;
    r.tolerance = "p > " + std::to_string(kChiSquareAlpha) + " and no monotonicity violation";
    r.details = {{"chi2", chi.statistic},
                 {"dof", chi.dof},
                 {"p_value", chi.p_value},
                 {"monotonicity_checks", checks},
                 {"monotonicity_violations", violations}};
    r.pass = chi.p_value > kChiSquareAlpha && violations == 0 && checks > 0;
    r.seconds = since(t0);
    return r;
}

CheckResult check_kernels(const ValidationOptions& o)
{
    const auto t0 = Clock::now();
    CheckResult r;
    r.id = "5";
    r.title = "kernel invariance: heat-bath, pixel and dyad sweeps vs enumeration";
    const int sweeps = 100000;
    double worst_p = 1.0;

    {
        say(o, "criterion 5: heat-bath sweeps on 2x2");
        const double theta = 0.4;
        Rng rng = make_stream(kSeed + 5, "heatbath");
        IsingLattice lat = IsingLattice::random(2, 2, rng);
        std::vector<std::uint64_t> counts(16, 0);
        for (int k = 0; k < sweeps; ++k) {
            ising_heatbath_sweep(lat, theta, rng);
            counts[ising_state_index(lat)] += 1;
        }
        const auto chi = chi_square_test(
            counts, exact_state_probabilities(EnumerableInstance::ising(2, 2), std::span<const double>(&theta, 1)));
        r.details["heatbath"] = {{"chi2", chi.statistic}, {"dof", chi.dof}, {"p_value", chi.p_value}};
        worst_p = std::min(worst_p, chi.p_value);
    }
    {
        say(o, "criterion 5: pixel sweeps on 2x2");
        const std::vector<double> y = {0.7, -0.3, 1.2, -0.9};
        ImageSegState st{IsingLattice(2, 2), 0.8, 0.4, y};
        Rng rng = make_stream(kSeed + 5, "pixel");
        std::vector<std::uint64_t> counts(16, 0);
        for (int k = 0; k < sweeps; ++k) {
            pixel_sweep(st, rng);
            counts[ising_state_index(st.x)] += 1;
        }
        const auto chi = chi_square_test(counts, image_conditional_probabilities(2, 2, st.theta, y, st.sigma2));
        r.details["pixel"] = {{"chi2", chi.statistic}, {"dof", chi.dof}, {"p_value", chi.p_value}};
        worst_p = std::min(worst_p, chi.p_value);
    }
    for (auto def : {ErgmStatistics::Literal, ErgmStatistics::Standard}) {
        say(o, "criterion 5: dyad sweeps on 4 nodes (" + to_string(def) + ")");
        const std::vector<double> theta = {-1.0, 0.5, 0.0, 0.0};
        ErgmGraph g(4);
        Rng rng = make_stream(kSeed + 5, "dyad-" + to_string(def));
        std::vector<std::uint64_t> counts(64, 0);
        for (int k = 0; k < sweeps; ++k) {
            ergm_flip_sweep(g, theta, def, rng);
            counts[ergm_graph_index(g)] += 1;
        }
        const auto chi = chi_square_test(counts, exact_state_probabilities(EnumerableInstance::ergm(4, def), theta));
        r.details["dyad_" + to_string(def)] = {{"chi2", chi.statistic}, {"dof", chi.dof}, {"p_value", chi.p_value}};
        worst_p = std::min(worst_p, chi.p_value);
    }
    r.measured = worst_p;
    r.tolerance = "every p > " + std::to_string(kChiSquareAlpha);
    r.pass = worst_p > kChiSquareAlpha;
    r.seconds = since(t0);
    return r;
}

CheckResult check_mechanism(const ValidationOptions& o)
{
    const auto t0 = Clock::now();
    CheckResult r;
    r.id = "6";
    r.title = "mechanism invariants: weight mass, halving events, weight-shift invariance";

    // (a) mass conservation and (b) halving events, on a fresh 3x3 chain
    say(o, "criterion 6: WL mass and halving bookkeeping");
    Rng prng = make_stream(kSeed + 6, "particles");
    auto particles = ParticleSet::uniform(Box::cube(1, 0.0, 1.0), 20, prng);
    Rng init = make_stream(kSeed + 6, "init");
    WlOptions opts;
    opts.log_halvings = true;
    WangLandauChain chain(std::move(particles), std::make_unique<IsingSweepKernel>(IsingLattice::random(3, 3, init)),
                          opts);
    Rng krng = make_stream(kSeed + 6, "wl-kernel");
    Rng lrng = make_stream(kSeed + 6, "wl-labels");
    double worst_mass = 0.0;
    std::uint64_t steps = 0, halved = 0;
    while (!chain.deterministic()) {
        const auto out = chain.step(krng, lrng);
        worst_mass = std::max(worst_mass, std::abs(out.weight_sum_increment - out.gamma_used));
        halved += out.halved;
        ++steps;
    }
    for (int k = 0; k < 20000; ++k) {
        const auto out = chain.step(krng, lrng);
        worst_mass = std::max(worst_mass, std::abs(out.weight_sum_increment - out.gamma_used));
        ++steps;
    }
    const auto& events = chain.halving_log();
    std::uint64_t bad_events = 0;
    std::uint64_t prev_iteration = 0;
    for (const auto& ev : events) {
        std::uint64_t total = 0;
        for (auto v : ev.occupancy)
            total += v;
        // the recorded occupancy must pass the test and cover exactly the visits since the last reset
        if (!flat_histogram_test(ev.occupancy, ev.eps2) || total != ev.iteration - prev_iteration)
            ++bad_events;
        prev_iteration = ev.iteration;
    }

    // (c) shifting every log-weight leaves the theta trace bitwise unchanged
    say(o, "criterion 6: weight-shift invariance of the theta trace");
    const auto cfg = mechanism_config();
    const auto base = cached_run(cfg, o);
    RunControls shifted_ctl;
    shifted_ctl.write_outputs = false;
    shifted_ctl.weight_shift = 1234.5;
    const auto shifted = run_experiment(cfg, shifted_ctl);
    std::uint64_t differing = 0;
    const auto& a = base.chain.trace();
    const auto& b = shifted.chain.trace();
    if (a.size() != b.size()) {
        differing = std::max(a.size(), b.size());
    } else {
        for (std::size_t t = 0; t < a.size(); ++t)
            differing += std::memcmp(&a[t], &b[t], sizeof(double)) != 0;
    }

    r.measured = worst_mass;
    r.tolerance = "mass error <= 1e-12, every halving preceded by a passing test, 0 differing trace entries";
    r.details = {{"steps_checked", steps},
                 {"worst_mass_error", worst_mass},
                 {"halving_events", events.size()},
                 {"halvings_seen", halved},
                 {"bad_halving_events", bad_events},
                 {"trace_entries", a.size()},
                 {"differing_trace_entries", differing}};
    r.pass = worst_mass <= kMassTol && bad_events == 0 && !events.empty() && events.size() == halved &&
             differing == 0;
    r.seconds = since(t0);
    return r;
}

CheckResult check_acceptance_rates(const ValidationOptions& o)
{
    const auto t0 = Clock::now();
    CheckResult r;
    r.id = "7";
    r.title = "theta-chain acceptance over the final half of every run of >= 1e4 steps";
    bool pass = true;
    double worst = 0.0;  // largest distance outside the band (0 when inside)
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& [name, cfg] : long_runs(o.full)) {
        if (cfg.theta_steps < 10000)
            continue;
        say(o, "criterion 7: " + name);
        const auto run = cached_run(cfg, o);
        const double a = run.final_half_acceptance;
        const bool ok = a >= kAcceptLo && a <= kAcceptHi;
        pass = pass && ok;
        worst = std::max(worst, std::max(kAcceptLo - a, a - kAcceptHi));
        runs.push_back({{"run", name}, {"final_half_acceptance", a}, {"pass", ok}});
    }
    r.measured = worst;
    r.tolerance = "every rate in [0.25, 0.35] (measured = largest excursion outside the band)";
    r.details["runs"] = runs;
    r.pass = pass;
    r.seconds = since(t0);
    return r;
}

CheckResult check_lln(const ValidationOptions& o)
{
    const auto t0 = Clock::now();
    CheckResult r;
    r.id = "8";
    r.title = "running averages of 1{theta > 0.4} from two seeds, 3x3 Ising, 2e5 steps";
    std::vector<double> avgs;
    for (std::uint64_t k : {81, 82}) {
        const auto cfg = small_ising_config(3, 3, kSeed + k, kSeed + 8);
        say(o, "criterion 8: seed " + std::to_string(k));
        const auto run = cached_run(cfg, o);
        const auto col = run.chain.coordinate(0);
        double s = 0.0;
        for (std::size_t t = cfg.burn_in; t < col.size(); ++t)
            s += col[t] > 0.4 ? 1.0 : 0.0;
        avgs.push_back(s / static_cast<double>(col.size() - cfg.burn_in));
    }
    const auto exact = [&] {
        // reference value of the posterior probability, for the report only
        const auto cfg = small_ising_config(3, 3, kSeed + 81, kSeed + 8);
        const auto run = cached_run(cfg, o);
        const auto inst = EnumerableInstance::ising(3, 3);
        const double obs = run.observed[0];
        double num = 0.0, den = 0.0;
        const int n = 20000;
        for (int k = 0; k <= n; ++k) {
            const double t = static_cast<double>(k) / n;
            const double w = (k == 0 || k == n ? 0.5 : 1.0) * std::exp(obs * t - exact_log_z(inst, std::span<const double>(&t, 1)));
            den += w;
            if (t > 0.4)
                num += w;
        }
        return num / den;
    }();
    r.measured = std::abs(avgs[0] - avgs[1]);
    r.tolerance = "<= " + std::to_string(kLlnTol);
    r.details = {{"average_seed_a", avgs[0]}, {"average_seed_b", avgs[1]}, {"quadrature_probability", exact}};
    r.pass = r.measured <= kLlnTol;
    r.seconds = since(t0);
    return r;
}

CheckResult check_paper_ising(const ValidationOptions& o)
{
    const auto t0 = Clock::now();
    CheckResult r;
    r.id = "9";
    r.title = "64x64 Ising, theta = 0.40, d = 100, 10000 steps, burn-in 1999";
    const auto cfg = paper_ising_config();
    say(o, "criterion 9: 64x64 Ising run");
    const auto run = cached_run(cfg, o);
    const double mean = run.summary.mean[0];
    const double acf50 = run.summary.acf[0].size() > 50 ? run.summary.acf[0][50] : 1.0;
    const double secs = wall_seconds_of(run.config);
    r.measured = mean;
    r.tolerance = "mean in [0.36, 0.44], lag-50 ACF < 0.3, runtime <= 30 min";
    r.details = {{"posterior_mean", mean},
                 {"q025", run.summary.q025[0]},
                 {"q975", run.summary.q975[0]},
                 {"acf_lag50", acf50},
                 {"run_seconds", secs},
                 {"observed_stat", run.observed[0]},
                 {"wl_flat_iterations", run.wl_iterations_flat}};
    r.pass = mean >= kIsingMeanLo && mean <= kIsingMeanHi && acf50 < kAcf50Max && secs >= 0.0 &&
             secs <= kIsingMinutes * 60.0;
    r.seconds = since(t0);
    return r;
}

CheckResult check_ergm(const ValidationOptions& o)
{
    const auto t0 = Clock::now();
    CheckResult r;
    r.id = "10";
    r.title = "Florentine ERGM under both statistic definitions, plus the 4-node surface check";
    bool any = false;
    double best = 1e300;
    for (const std::string def : {"literal", "standard"}) {
        const auto cfg = ergm_config(def);
        say(o, "criterion 10: Florentine ERGM (" + def + ")");
        const auto run = cached_run(cfg, o);
        double worst = 0.0;
        bool overlap = true;
        for (int j = 0; j < 4; ++j) {
            worst = std::max(worst, std::abs(run.summary.mean[static_cast<std::size_t>(j)] - kErgmRefMean[j]));
            overlap = overlap && run.summary.q025[static_cast<std::size_t>(j)] <= kErgmRefHi[j] &&
                      run.summary.q975[static_cast<std::size_t>(j)] >= kErgmRefLo[j];
        }
        const bool ok = worst <= kErgmMeanTol && overlap;
        any = any || ok;
        best = std::min(best, worst);
        r.details[def] = {{"observed_stats", run.observed.values},
                          {"mean", run.summary.mean},
                          {"q025", run.summary.q025},
                          {"q975", run.summary.q975},
                          {"max_mean_error", worst},
                          {"intervals_overlap", overlap},
                          {"final_half_acceptance", run.final_half_acceptance},
                          {"wl_flat_iterations", run.wl_iterations_flat},
                          {"pass", ok}};
    }
    const auto hard = check_ergm_surface(o);
    r.details["surface_4_nodes"] = to_json(hard);
    r.measured = best;
    r.tolerance = "under one definition: every mean within 0.5 and every interval overlapping; surface error <= 0.05";
    r.pass = any && hard.pass;
    r.seconds = since(t0);
    return r;
}

CheckResult check_image(const ValidationOptions& o)
{
    const auto t0 = Clock::now();
    CheckResult r;
    r.id = "11";
    r.title = "32x32 image segmentation, theta = 0.4, sigma = 0.5, three seeds";
    bool pass = true;
    double worst = 0.0;
    nlohmann::json runs = nlohmann::json::array();
    for (int k = 0; k < 3; ++k) {
        const auto cfg = image_config(k);
        say(o, "criterion 11: seed " + std::to_string(k + 1));
        const auto run = cached_run(cfg, o);
        const double sm = run.sigma_summary->mean[0];
        const bool covers = run.summary.q025[0] <= 0.4 && run.summary.q975[0] >= 0.4;
        const bool ok = std::abs(sm - 0.5) <= kSigmaTol && covers;
        pass = pass && ok;
        worst = std::max(worst, std::abs(sm - 0.5));
        runs.push_back({{"seed", *cfg.seed},
                        {"sigma_mean", sm},
                        {"theta_mean", run.summary.mean[0]},
                        {"theta_q025", run.summary.q025[0]},
                        {"theta_q975", run.summary.q975[0]},
                        {"pass", ok}});
    }
    r.measured = worst;
    r.tolerance = "|mean sigma - 0.5| <= 0.1 and theta interval contains 0.4, for 3 of 3 seeds";
    r.details["runs"] = runs;
    r.pass = pass;
    r.seconds = since(t0);
    return r;
}

}  // namespace

CheckResult check_ergm_surface(const ValidationOptions& o)
{
    const auto t0 = Clock::now();
    CheckResult r;
    r.id = "10-hard";
    r.title = "4-node ERGM Z-surface vs 64-graph enumeration";
    say(o, "criterion 10 (hard): WL run on 4-node ERGM");
    const Box box = Box::cube(4, -50.0, 50.0);
    Rng prng = make_stream(kSeed + 100, "particles");
    auto particles = ParticleSet::gaussian(box, 40, 0.0, 1.0, prng);
    auto kernel = std::make_unique<ErgmSweepKernel>(ErgmGraph(4), ErgmStatistics::Literal);
    const auto run = run_wl_surface(std::move(particles), std::move(kernel), 100000, kSeed + 100);
    const auto surface = run.surface();
    const auto inst = EnumerableInstance::ergm(4, ErgmStatistics::Literal);

    Rng trng = make_stream(kSeed + 100, "test-points");
    const std::vector<double> origin(4, 0.0);
    const double ref_est = surface.log_z(origin);
    const double ref_exact = exact_log_z(inst, origin);
    double worst = 0.0;
    nlohmann::json rows = nlohmann::json::array();
    for (int k = 0; k < 20; ++k) {
        std::vector<double> t(4);
        for (auto& v : t)
            v = 0.5 * standard_normal(trng);
        const double est = surface.log_z(t) - ref_est;
        const double ex = exact_log_z(inst, t) - ref_exact;
        worst = std::max(worst, std::abs(est - ex));
        rows.push_back({{"theta", t}, {"estimate", est}, {"exact", ex}});
    }
    r.measured = worst;
    r.tolerance = "<= " + std::to_string(kSurfaceTol);
    r.details = {{"points", rows}, {"flat_phase_iterations", run.flat_iterations}, {"run_seconds", run.seconds}};
    r.pass = worst <= kSurfaceTol;
    r.seconds = since(t0);
    return r;
}

RunResult cached_run(RunConfig cfg, const ValidationOptions& opts)
{
    RunConfig keyed = cfg;
    keyed.out.clear();
    keyed.max_wl_iterations = 0;
    std::ostringstream name;
    name << "run-" << std::hex << std::setw(16) << std::setfill('0') << fnv1a(config_to_text(keyed));
    cfg.out = (fs::path(opts.cache_dir) / name.str()).string();
    RunControls ctl;
    ctl.resume = true;
    ctl.log = opts.log;
    const bool fresh = !fs::exists(fs::path(cfg.out) / "wall_seconds.txt");
    auto result = run_experiment(cfg, ctl);
    if (fresh && result.completed) {
        std::ofstream os((fs::path(cfg.out) / "wall_seconds.txt").string());
        os << std::setprecision(17) << result.seconds << '\n';
    }
    return result;
}

CheckResult run_check(int criterion, const ValidationOptions& opts)
{
    const auto t0 = Clock::now();
    try {
        switch (criterion) {
        case 1: return check_surface_accuracy(opts);
        case 2: return check_weight_convergence(opts);
        case 3: return check_posterior(opts);
        case 4: return check_cftp(opts);
        case 5: return check_kernels(opts);
        case 6: return check_mechanism(opts);
        case 7: return check_acceptance_rates(opts);
        case 8: return check_lln(opts);
        case 9: return check_paper_ising(opts);
        case 10: return check_ergm(opts);
        case 11: return check_image(opts);
        default: break;
        }
    } catch (const std::exception& e) {
        CheckResult r;
        r.id = std::to_string(criterion);
        r.title = "error";
        r.pass = false;
        r.details["error"] = e.what();
        r.seconds = since(t0);
        return r;
    }
    throw std::invalid_argument("run_check: no criterion " + std::to_string(criterion));
}

nlohmann::json to_json(const CheckResult& r)
{
    return {{"id", r.id},           {"title", r.title},     {"pass", r.pass},
            {"measured", r.measured}, {"tolerance", r.tolerance}, {"details", r.details},
            {"seconds", r.seconds}};
}

std::string one_line(const CheckResult& r)
{
    std::ostringstream os;
    os << "criterion " << r.id << ": " << (r.pass ? "PASS" : "FAIL") << "  " << r.title << "  measured="
       << std::setprecision(6) << r.measured << "  tolerance: " << r.tolerance;
    if (r.details.contains("error"))
        os << "  error: " << r.details["error"].get<std::string>();
    return os.str();
}

ValidationLevel parse_validation_level(const std::string& s)
{
    if (s == "fast")
        return ValidationLevel::Fast;
    if (s == "full")
        return ValidationLevel::Full;
    throw std::invalid_argument("unknown validation level '" + s + "' (expected fast|full)");
}

nlohmann::json validate_suite(ValidationLevel level, const std::string& out_dir, std::ostream* log)
{
    ValidationOptions opts;
    opts.cache_dir = (fs::path(out_dir) / "runs").string();
    opts.log = log;
    opts.full = level == ValidationLevel::Full;
    fs::create_directories(out_dir);

    std::vector<CheckResult> results;
    const std::vector<int> fast = {1, 2, 3, 4, 5, 6, 8, 7};
    for (int c : fast)
        results.push_back(run_check(c, opts));
    if (level == ValidationLevel::Fast) {
        try {
            results.push_back(check_ergm_surface(opts));
        } catch (const std::exception& e) {
            CheckResult r;
            r.id = "10-hard";
            r.details["error"] = e.what();
            results.push_back(r);
        }
    } else {
        for (int c : {9, 10, 11})
            results.push_back(run_check(c, opts));
    }

    nlohmann::json report;
    report["level"] = level == ValidationLevel::Fast ? "fast" : "full";
    report["checks"] = nlohmann::json::array();
    bool all = true;
    for (const auto& r : results) {
        report["checks"].push_back(to_json(r));
        all = all && r.pass;
        if (log)
            *log << one_line(r) << std::endl;
    }
    report["all_pass"] = all;
    std::ofstream os((fs::path(out_dir) / "report.json").string());
    os << report.dump(2) << '\n';
    return report;
}

}  // namespace wlpost
