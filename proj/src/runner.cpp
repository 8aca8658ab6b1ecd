#include "wlpost/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "wlpost/checkpoint.hpp"
#include "wlpost/models/cftp.hpp"
#include "wlpost/models/ergm.hpp"
#include "wlpost/models/image_seg.hpp"
#include "wlpost/models/ising.hpp"
#include "wlpost/serialize.hpp"
#include "wlpost/wl_engine.hpp"
#include "wlpost/z_surface.hpp"

namespace wlpost {

RunError::RunError(const std::string& phase, std::uint64_t iteration, const std::string& what)
    : std::runtime_error("phase " + phase + ", iteration " + std::to_string(iteration) + ": " + what),
      phase_(phase),
      iteration_(iteration)
{
}

namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kFlatProgressInterval = 5000000;

enum class Phase : std::uint8_t { Data = 0, WlFlat = 1, Joint = 2, Done = 3 };

const char* phase_name(Phase p)
{
    switch (p) {
    case Phase::Data: return "data";
    case Phase::WlFlat: return "wl-flat";
    case Phase::Joint: return "joint";
    case Phase::Done: return "done";
    }
    return "?";
}

struct Streams {
    Rng data, particles, wl_kernel, wl_labels, theta, latent;

    Streams(std::uint64_t seed, std::uint64_t data_seed)
        : data(make_stream(data_seed, "data")),
          particles(make_stream(seed, "particles")),
          wl_kernel(make_stream(seed, "wl-kernel")),
          wl_labels(make_stream(seed, "wl-labels")),
          theta(make_stream(seed, "theta-chain")),
          latent(make_stream(seed, "latent"))
    {
    }

    void save(std::ostream& os) const
    {
        for (const Rng* r : {&data, &particles, &wl_kernel, &wl_labels, &theta, &latent})
            io::write_str(os, serialize_rng(*r));
    }

    void load(std::istream& is)
    {
        for (Rng* r : {&data, &particles, &wl_kernel, &wl_labels, &theta, &latent})
            deserialize_rng(*r, io::read_str(is));
    }
};

struct RunState {
    RunConfig cfg;
    Box box;
    std::unique_ptr<EnergyModel> model;
    std::vector<double> y;
    std::optional<ImageSegState> image;
    std::optional<IsingLattice> data_lattice;  // for the PGM snapshot
    std::unique_ptr<WangLandauChain> wl;
    std::unique_ptr<SampleStore> store;
    SmoothingKernel kernel{1.0};
    RwProposal proposal;
    AdaptState adapt;
    std::unique_ptr<ThetaChain> chain;
    std::vector<double> sigma_trace;
    std::vector<double> gamma_trace;
    Phase phase = Phase::Data;
    std::uint64_t steps_done = 0;
    std::uint64_t wl_iterations_flat = 0;
    std::uint64_t halvings = 0;
    Streams rng;

    explicit RunState(const RunConfig& c) : cfg(c), rng(*c.seed, c.data_seed.value_or(*c.seed)) {}
};

void say(std::ostream* log, const std::string& msg)
{
    if (log)
        *log << msg << std::endl;
}

std::unique_ptr<SweepKernel> skeleton_kernel(const RunConfig& cfg)
{
    if (cfg.model == ModelKind::Ergm)
        return std::make_unique<ErgmSweepKernel>(ErgmGraph(1), parse_ergm_statistics(cfg.ergm_stats));
    return std::make_unique<IsingSweepKernel>(IsingLattice(cfg.rows, cfg.cols));
}

RwProposal base_proposal(const RunConfig& cfg, const Box& box)
{
    if (cfg.proposal == "reflected") {
        RwProposal p = default_reflected_uniform(box);
        if (cfg.proposal_scale > 0.0)
            for (auto& b : std::get<ReflectedUniform>(p.variant).half_width)
                b = cfg.proposal_scale;
        return p;
    }
    RwProposal p = default_gaussian_block(box);
    if (cfg.proposal_scale > 0.0)
        std::get<GaussianBlock>(p.variant).sigma = cfg.proposal_scale;
    return p;
}

AdaptOptions adapt_options(const RunConfig& cfg)
{
    AdaptOptions o;
    o.target_rate = cfg.target_accept;
    o.scale_exponent = cfg.adapt_scale_exponent;
    o.moment_exponent = cfg.adapt_moment_exponent;
    o.blend_after = cfg.adapt_blend_after;
    return o;
}

WlOptions wl_options(const RunConfig& cfg)
{
    WlOptions o;
    o.gamma0 = cfg.gamma0;
    o.eps1 = cfg.eps1;
    o.eps2 = cfg.eps2;
    o.tail_exponent = cfg.tail_exponent;
    o.recenter_interval = cfg.recenter_interval;
    o.sweeps_per_step = cfg.sweeps_per_step;
    return o;
}

ParticleSet particles_from_flat(const std::vector<double>& flat, std::size_t q, const Box& box)
{
    if (q == 0 || flat.empty() || flat.size() % q != 0)
        throw std::runtime_error("checkpoint: particle block has the wrong size");
    std::vector<ParameterPoint> pts;
    for (std::size_t i = 0; i < flat.size(); i += q)
        pts.emplace_back(std::vector<double>(flat.begin() + static_cast<std::ptrdiff_t>(i),
                                             flat.begin() + static_cast<std::ptrdiff_t>(i + q)));
    return ParticleSet(std::move(pts), box);
}

void setup_sampling(RunState& s, ParticleSet particles, std::unique_ptr<SweepKernel> kernel)
{
    const auto& cfg = s.cfg;
    const std::size_t q = cfg.theta_dim();
    const double h = cfg.bandwidth > 0.0 ? cfg.bandwidth : default_bandwidth(particles);
    s.kernel = SmoothingKernel(h);
    s.wl = std::make_unique<WangLandauChain>(std::move(particles), std::move(kernel), wl_options(cfg));
    s.store = std::make_unique<SampleStore>(cfg.particles, q, cfg.store_stride);
    s.proposal = base_proposal(cfg, s.box);
    s.proposal.validate();
    s.adapt = AdaptState::initial(q, adapt_options(cfg));
    s.chain = std::make_unique<ThetaChain>(s.box.center(), cfg.burn_in);
}

// Phase "data": simulate or load the data set, draw particles, build the chains.
std::unique_ptr<RunState> build_initial(const RunConfig& cfg, std::ostream* log)
{
    auto s = std::make_unique<RunState>(cfg);
    const std::size_t q = cfg.theta_dim();
    s->box = Box::cube(q, cfg.box_lower(), cfg.box_upper());
    CftpOptions cftp;
    cftp.max_sweeps = cfg.cftp_max_sweeps;

    std::unique_ptr<SweepKernel> kernel;
    SufficientStats observed;
    switch (cfg.model) {
    case ModelKind::Ising: {
        auto res = cftp_sample_detailed(cfg.rows, cfg.cols, cfg.theta_true, s->rng.data, cftp);
        say(log, "data: CFTP coalesced from T = " + std::to_string(res.horizon));
        observed = ising_stat(res.sample);
        s->data_lattice = res.sample;
        kernel = std::make_unique<IsingSweepKernel>(res.sample);
        break;
    }
    case ModelKind::ImageSeg: {
        auto res = cftp_sample_detailed(cfg.rows, cfg.cols, cfg.theta_true, s->rng.data, cftp);
        say(log, "data: CFTP coalesced from T = " + std::to_string(res.horizon));
        s->y = simulate_noisy_image(res.sample, cfg.sigma_true, s->rng.data);
        s->data_lattice = res.sample;
        s->image = initial_image_state(cfg.rows, cfg.cols, s->y);
        observed = ising_stat(s->image->x);
        kernel = std::make_unique<IsingSweepKernel>(s->image->x);
        break;
    }
    case ModelKind::Ergm: {
        const auto def = parse_ergm_statistics(cfg.ergm_stats);
        ErgmGraph g = load_edge_list(cfg.ergm_edges);
        observed = ergm_stats(g, def);
        kernel = std::make_unique<ErgmSweepKernel>(std::move(g), def);
        break;
    }
    }
    s->model = std::make_unique<EnergyModel>(s->box, observed);

    ParticleSet particles = cfg.particle_source == "uniform"
                                ? ParticleSet::uniform(s->box, cfg.particles, s->rng.particles)
                                : ParticleSet::gaussian(s->box, cfg.particles, cfg.particle_mean,
                                                        cfg.particle_variance, s->rng.particles);
    setup_sampling(*s, std::move(particles), std::move(kernel));
    s->phase = Phase::WlFlat;
    return s;
}

std::string serialize_state(const RunState& s)
{
    std::ostringstream os(std::ios::binary);
    io::write_str(os, config_to_text(s.cfg));
    io::write_pod<std::uint8_t>(os, static_cast<std::uint8_t>(s.phase));
    io::write_pod<std::uint64_t>(os, s.steps_done);
    io::write_pod<std::uint64_t>(os, s.wl_iterations_flat);
    io::write_pod<std::uint64_t>(os, s.halvings);
    const auto flat = s.wl->particles().flat();
    io::write_vec(os, std::vector<double>(flat.begin(), flat.end()));
    io::write_vec(os, s.model->observed().values);
    io::write_vec(os, s.y);
    io::write_pod(os, s.kernel.bandwidth);
    s.wl->save(os);
    s.store->save(os);
    s.chain->save(os);
    save_adapt(os, s.adapt);
    io::write_vec(os, s.sigma_trace);
    io::write_vec(os, s.gamma_trace);
    io::write_pod<std::uint8_t>(os, s.image ? 1 : 0);
    if (s.image) {
        io::write_pod(os, s.image->sigma2);
        io::write_pod(os, s.image->theta);
        io::write_vec(os, s.image->x.spins());
    }
    io::write_pod<std::uint8_t>(os, s.data_lattice ? 1 : 0);
    if (s.data_lattice)
        io::write_vec(os, s.data_lattice->spins());
    s.rng.save(os);
    return os.str();
}

// Everything that must agree between a checkpoint and the config resuming it.
std::string resume_key(RunConfig c)
{
    c.out.clear();
    c.checkpoint_interval = 0;
    c.max_wl_iterations = 0;
    return config_to_text(c);
}

std::unique_ptr<RunState> restore_state(const std::string& payload, const std::string& out_dir)
{
    std::istringstream is(payload, std::ios::binary);
    std::istringstream cfg_text(io::read_str(is));
    RunConfig cfg = parse_config(cfg_text, "checkpoint config");
    cfg.out = out_dir;
    auto s = std::make_unique<RunState>(cfg);
    const std::size_t q = cfg.theta_dim();
    s->box = Box::cube(q, cfg.box_lower(), cfg.box_upper());
    s->phase = static_cast<Phase>(io::read_pod<std::uint8_t>(is));
    s->steps_done = io::read_pod<std::uint64_t>(is);
    s->wl_iterations_flat = io::read_pod<std::uint64_t>(is);
    s->halvings = io::read_pod<std::uint64_t>(is);
    const auto flat = io::read_vec<double>(is);
    s->model = std::make_unique<EnergyModel>(s->box, SufficientStats(io::read_vec<double>(is)));
    s->y = io::read_vec<double>(is);
    const double h = io::read_pod<double>(is);
    setup_sampling(*s, particles_from_flat(flat, q, s->box), skeleton_kernel(cfg));
    s->kernel = SmoothingKernel(h);
    s->wl->load(is);
    s->store->load(is);
    s->chain->load(is);
    load_adapt(is, s->adapt);
    s->sigma_trace = io::read_vec<double>(is);
    s->gamma_trace = io::read_vec<double>(is);
    if (io::read_pod<std::uint8_t>(is)) {
        const double sigma2 = io::read_pod<double>(is);
        const double theta = io::read_pod<double>(is);
        auto spins = io::read_vec<std::int8_t>(is);
        s->image = ImageSegState{IsingLattice(cfg.rows, cfg.cols, std::move(spins)), sigma2, theta, s->y};
        s->image->validate();
    }
    if (io::read_pod<std::uint8_t>(is))
        s->data_lattice = IsingLattice(cfg.rows, cfg.cols, io::read_vec<std::int8_t>(is));
    s->rng.load(is);
    return s;
}

std::string checkpoint_path(const RunConfig& cfg)
{
    return (fs::path(cfg.out) / "checkpoint.bin").string();
}

void write_checkpoint(const RunState& s)
{
    fs::create_directories(s.cfg.out);
    write_checkpoint_file(checkpoint_path(s.cfg), serialize_state(s));
}

// Phase "wl-flat": run the Wang-Landau chain alone until the deterministic tail starts.
void run_flat_phase(RunState& s, std::ostream* log)
{
    auto& wl = *s.wl;
    while (!wl.deterministic()) {
        if (wl.state().iteration >= s.cfg.max_wl_iterations)
            throw RunError(phase_name(Phase::WlFlat), wl.state().iteration,
                           "flat-histogram phase did not reach gamma <= eps1 within max_wl_iterations = " +
                               std::to_string(s.cfg.max_wl_iterations) + " (gamma = " +
                               std::to_string(wl.state().schedule.gamma) + ")");
        const auto out = wl.step(s.rng.wl_kernel, s.rng.wl_labels);
        if (s.cfg.record_from_start)
            s.store->record(out.label, wl.kernel().stats());
        if (out.halved) {
            ++s.halvings;
            say(log, "wl-flat: iteration " + std::to_string(wl.state().iteration) + ", gamma -> " +
                         std::to_string(wl.state().schedule.gamma));
        } else if (log && wl.state().iteration % kFlatProgressInterval == 0) {
            const auto& occ = wl.state().occupancy;
            const auto rep = occupancy_report(occ, s.cfg.eps2);
            const auto unvisited = std::count(occ.begin(), occ.end(), std::uint64_t{0});
            say(log, "wl-flat: iteration " + std::to_string(wl.state().iteration) + ", gamma " +
                         std::to_string(wl.state().schedule.gamma) + ", occupancy deviation " +
                         std::to_string(rep.max_deviation) + " (flat at " + std::to_string(rep.threshold) + "), " +
                         std::to_string(unvisited) + " labels unvisited");
        }
    }
    s.wl_iterations_flat = wl.state().iteration;
    s.phase = Phase::Joint;
}

void joint_step(RunState& s)
{
    auto& wl = *s.wl;
    const auto out = wl.step(s.rng.wl_kernel, s.rng.wl_labels);
    s.store->record(out.label, wl.kernel().stats());
    const ZSurface surface(*s.store, wl.particles(), wl.state().weights.c, s.kernel);
    const LogZFunction log_z = [&surface](std::span<const double> t) { return surface.log_z(t); };
    if (s.image) {
        auto& img = *s.image;
        const EnergyModel conditional = s.model->with_observed(ising_stat(img.x));
        theta_step(*s.chain, conditional, s.proposal, s.adapt, log_z, s.rng.theta);
        img.theta = s.chain->current()[0];
        img.sigma2 = sigma2_draw(img.x, s.y, s.rng.latent);
        pixel_sweep(img, s.rng.latent);
        s.sigma_trace.push_back(std::sqrt(img.sigma2));
    } else {
        theta_step(*s.chain, *s.model, s.proposal, s.adapt, log_z, s.rng.theta);
    }
    s.gamma_trace.push_back(out.gamma_used);
    ++s.steps_done;
}

std::string fmt17(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::vector<SurfaceRow> surface_rows(const RunState& s, const GridSpec& grid, const std::vector<double>& anchor)
{
    const ZSurface surface(*s.store, s.wl->particles(), s.wl->state().weights.c, s.kernel);
    const std::size_t q = s.box.dim();
    std::vector<SurfaceRow> rows;
    for (std::size_t axis = 0; axis < q; ++axis) {
        for (std::size_t k = 0; k < grid.steps; ++k) {
            SurfaceRow r;
            r.theta = anchor;
            r.theta[axis] = grid.lo + (grid.hi - grid.lo) * static_cast<double>(k) / static_cast<double>(grid.steps - 1);
            r.log_z = surface.log_z(r.theta);
            rows.push_back(std::move(r));
        }
    }
    return rows;
}

GridSpec default_grid(const RunConfig& cfg)
{
    if (!cfg.surface_grid.empty())
        return parse_grid(cfg.surface_grid);
    GridSpec g;
    g.lo = cfg.box_lower();
    g.hi = cfg.box_upper();
    g.steps = 101;
    return g;
}

void write_trace_csv(const RunState& s, const std::string& path)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot open " + path);
    const auto& ch = *s.chain;
    const std::size_t q = ch.dim();
    os << "iteration";
    for (std::size_t j = 0; j < q; ++j)
        os << ",theta_" << (j + 1);
    os << ",accepted,log_acceptance,gamma";
    if (s.image)
        os << ",sigma";
    os << '\n';
    for (std::size_t t = 0; t < ch.length(); ++t) {
        os << (t + 1);
        for (double v : ch.row(t))
            os << ',' << fmt17(v);
        os << ',' << static_cast<int>(ch.accepted()[t]) << ',' << fmt17(ch.log_acceptances()[t]) << ','
           << fmt17(s.gamma_trace[t]);
        if (s.image)
            os << ',' << fmt17(s.sigma_trace[t]);
        os << '\n';
    }
}

nlohmann::json config_json(const RunConfig& cfg)
{
    nlohmann::json j = nlohmann::json::object();
    std::istringstream is(config_to_text(cfg));
    std::string line;
    while (std::getline(is, line)) {
        const auto eq = line.find(" = ");
        if (eq != std::string::npos)
            j[line.substr(0, eq)] = line.substr(eq + 3);
    }
    return j;
}

void finish(RunState& s, RunResult& r, bool write_files)
{
    const auto& cfg = s.cfg;
    r.summary = summarize(*s.chain, cfg.burn_in, cfg.acf_max_lag);
    if (s.image)
        r.sigma_summary = summarize(s.sigma_trace, 1, {}, cfg.burn_in, cfg.acf_max_lag);
    const std::size_t n = s.chain->length();
    r.final_half_acceptance = s.chain->acceptance_rate(n / 2, n);
    if (!write_files)
        return;

    fs::create_directories(cfg.out);
    const fs::path out(cfg.out);
    write_trace_csv(s, (out / "trace.csv").string());

    std::vector<double> anchor(s.box.dim());
    for (std::size_t j = 0; j < anchor.size(); ++j)
        anchor[j] = std::clamp(r.summary.mean[j], s.box.lower[j], s.box.upper[j]);
    write_surface_csv(surface_rows(s, default_grid(cfg), anchor), (out / "logz.csv").string());

    for (std::size_t j = 0; j < s.chain->dim(); ++j) {
        const auto col = s.chain->coordinate(j);
        const std::span<const double> post(col.data() + cfg.burn_in, col.size() - cfg.burn_in);
        write_histogram_csv(histogram(post, cfg.histogram_bins),
                            (out / ("histogram_theta_" + std::to_string(j + 1) + ".csv")).string());
    }
    if (s.image) {
        const std::span<const double> post(s.sigma_trace.data() + cfg.burn_in, s.sigma_trace.size() - cfg.burn_in);
        write_histogram_csv(histogram(post, cfg.histogram_bins), (out / "histogram_sigma.csv").string());
    }
    if (s.data_lattice)
        write_pgm(*s.data_lattice, (out / "data.pgm").string());

    nlohmann::json j;
    j["model"] = to_string(cfg.model);
    // run-control keys are left out so that outputs do not depend on where or how often they were saved
    j["config"] = config_json(cfg);
    j["config"].erase("out");
    j["config"].erase("checkpoint_interval");
    j["config"].erase("max_wl_iterations");
    j["observed_stats"] = s.model->observed().values;
    j["theta"] = to_json(r.summary);
    if (r.sigma_summary)
        j["sigma"] = to_json(*r.sigma_summary);
    j["final_half_acceptance"] = r.final_half_acceptance;
    const auto& st = s.wl->state();
    const auto occ = occupancy_report(st.occupancy, cfg.eps2);
    j["wang_landau"] = {
        {"iterations_flat_phase", s.wl_iterations_flat},
        {"iterations_total", st.iteration},
        {"halvings", s.halvings},
        {"final_gamma", st.schedule.gamma},
        {"bandwidth", s.kernel.bandwidth},
        {"stored_samples", s.store->total_visits()},
        {"occupancy_max_deviation", occ.max_deviation},
        {"occupancy_threshold", occ.threshold},
        {"log_weights", st.weights.c},
    };
    std::ofstream os((out / "summary.json").string());
    if (!os)
        throw std::runtime_error("cannot open summary.json in " + cfg.out);
    os << j.dump(2) << '\n';
}

}  // namespace

RunResult run_experiment(const RunConfig& config, const RunControls& controls)
{
    const auto t0 = std::chrono::steady_clock::now();
    config.validate();
    std::ostream* log = controls.log;

    std::unique_ptr<RunState> sp;
    Phase phase = Phase::Data;
    std::uint64_t iteration = 0;
    auto where = [&]() -> std::uint64_t {
        if (!sp)
            return 0;
        if (phase == Phase::WlFlat)
            return sp->wl->state().iteration;
        return sp->steps_done;
    };
    try {
        if (controls.resume && fs::exists(checkpoint_path(config))) {
            sp = restore_state(read_checkpoint_file(checkpoint_path(config)), config.out);
            if (resume_key(sp->cfg) != resume_key(config))
                throw std::runtime_error("config differs from the one stored in " + checkpoint_path(config));
            sp->cfg.checkpoint_interval = config.checkpoint_interval;
            sp->cfg.max_wl_iterations = config.max_wl_iterations;
            say(log, std::string("resume: phase ") + phase_name(sp->phase) + ", " + std::to_string(sp->steps_done) +
                         " theta steps done");
        } else {
            sp = build_initial(config, log);
        }
        RunState& s = *sp;

        phase = s.phase;
        if (s.phase == Phase::WlFlat) {
            try {
                run_flat_phase(s, log);
            } catch (const RunError&) {
                // keep the progress so that a resume with a larger max_wl_iterations continues from here
                if (controls.write_outputs)
                    write_checkpoint(s);
                throw;
            }
            say(log, "wl-flat: gamma <= eps1 after " + std::to_string(s.wl_iterations_flat) + " iterations");
            if (controls.weight_shift != 0.0)
                s.wl->shift_weights(controls.weight_shift);
            if (s.cfg.checkpoint_interval > 0 && controls.write_outputs)
                write_checkpoint(s);
        }

        phase = Phase::Joint;
        const std::uint64_t limit =
            controls.stop_after ? std::min(*controls.stop_after, s.cfg.theta_steps) : s.cfg.theta_steps;
        const std::uint64_t report_every = std::max<std::uint64_t>(1, s.cfg.theta_steps / 10);
        while (s.steps_done < limit) {
            joint_step(s);
            if (s.steps_done % report_every == 0)
                say(log, "joint: " + std::to_string(s.steps_done) + " / " + std::to_string(s.cfg.theta_steps) +
                             " theta steps");
            if (s.cfg.checkpoint_interval > 0 && s.steps_done % s.cfg.checkpoint_interval == 0 && controls.write_outputs)
                write_checkpoint(s);
        }

        RunResult r;
        r.config = s.cfg;
        r.observed = s.model->observed();
        r.wl_iterations_flat = s.wl_iterations_flat;
        r.wl_iterations_total = s.wl->state().iteration;
        r.halvings = s.halvings;
        r.final_gamma = s.wl->state().schedule.gamma;
        r.bandwidth = s.kernel.bandwidth;
        if (s.steps_done < s.cfg.theta_steps) {
            if (controls.write_outputs)
                write_checkpoint(s);
            r.chain = *s.chain;
            r.sigma_trace = s.sigma_trace;
            r.completed = false;
        } else {
            s.phase = Phase::Done;
            phase = Phase::Done;
            if (controls.write_outputs)
                write_checkpoint(s);
            finish(s, r, controls.write_outputs);
            r.chain = *s.chain;
            r.sigma_trace = s.sigma_trace;
            r.completed = true;
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return r;
    } catch (const RunError&) {
        throw;
    } catch (const std::exception& e) {
        iteration = where();
        throw RunError(phase_name(phase), iteration, e.what());
    }
}

std::vector<SurfaceRow> surface_on_grid(const RunConfig& config, const GridSpec& grid, std::ostream* log)
{
    config.validate();
    std::unique_ptr<RunState> s;
    try {
        if (fs::exists(checkpoint_path(config))) {
            say(log, "surface: using " + checkpoint_path(config));
            s = restore_state(read_checkpoint_file(checkpoint_path(config)), config.out);
        } else {
            s = build_initial(config, log);
            run_flat_phase(*s, log);
        }
    } catch (const RunError&) {
        throw;
    } catch (const std::exception& e) {
        throw RunError("surface", 0, e.what());
    }
    if (s->store->total_visits() == 0) {
        // the flat phase alone records nothing unless record_from_start is set
        throw RunError("surface", s->wl->state().iteration,
                       "no recorded samples: run the experiment first or set record_from_start = true");
    }
    const auto centre = s->box.center();
    return surface_rows(*s, grid, centre.coords);
}

void write_surface_csv(const std::vector<SurfaceRow>& rows, const std::string& path)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot open " + path);
    const std::size_t q = rows.empty() ? 1 : rows.front().theta.size();
    for (std::size_t j = 0; j < q; ++j)
        os << (j ? "," : "") << "theta_" << (j + 1);
    os << ",log_z\n";
    for (const auto& r : rows) {
        for (std::size_t j = 0; j < q; ++j)
            os << (j ? "," : "") << fmt17(r.theta[j]);
        os << ',' << fmt17(r.log_z) << '\n';
    }
}

}  // namespace wlpost
