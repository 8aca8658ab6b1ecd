#include "wlpost/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace wlpost {

ModelKind parse_model_kind(const std::string& s)
{
    if (s == "ising")
        return ModelKind::Ising;
    if (s == "imageseg")
        return ModelKind::ImageSeg;
    if (s == "ergm")
        return ModelKind::Ergm;
    throw std::invalid_argument("unknown model '" + s + "' (expected ising|imageseg|ergm)");
}

std::string to_string(ModelKind m)
{
    switch (m) {
    case ModelKind::Ising: return "ising";
    case ModelKind::ImageSeg: return "imageseg";
    case ModelKind::Ergm: return "ergm";
    }
    return "?";
}

RunConfig default_config(ModelKind model)
{
    RunConfig c;
    c.model = model;
    if (model == ModelKind::Ergm) {
        c.ergm_edges = std::string(WLPOST_DATA_DIR) + "/florentine_business.txt";
        c.particles = 400;
        c.particle_source = "gaussian";
        c.particle_mean = 0.0;
        c.particle_variance = 5.0;
        c.proposal = "gaussian";
        c.theta_steps = 25000;
        c.burn_in = 1999;
        c.max_wl_iterations = 1000000000;
    }
    return c;
}

double RunConfig::box_lower() const
{
    if (prior_lower)
        return *prior_lower;
    return model == ModelKind::Ergm ? -50.0 : 0.0;
}

double RunConfig::box_upper() const
{
    if (prior_upper)
        return *prior_upper;
    return model == ModelKind::Ergm ? 50.0 : 1.0;
}

void RunConfig::validate() const
{
    auto bad = [](const std::string& key, const std::string& why) {
        throw std::invalid_argument("config: " + key + " " + why);
    };
    if (!seed)
        bad("seed", "is mandatory");
    if (model != ModelKind::Ergm) {
        if (rows < 1 || cols < 1 || rows > 4096 || cols > 4096)
            bad("rows/cols", "must lie in 1..4096");
        if (!(theta_true >= 0.0 && std::isfinite(theta_true)))
            bad("theta_true", "must be finite and >= 0 (ferromagnetic data generation)");
    }
    if (model == ModelKind::ImageSeg && !(sigma_true > 0.0 && std::isfinite(sigma_true)))
        bad("sigma_true", "must be positive");
    if (model == ModelKind::Ergm) {
        if (ergm_edges.empty())
            bad("ergm_edges", "must name an edge-list file");
        if (ergm_stats != "literal" && ergm_stats != "standard")
            bad("ergm_stats", "must be literal|standard");
    }
    if (!(box_lower() < box_upper()) || !std::isfinite(box_lower()) || !std::isfinite(box_upper()))
        bad("prior_lower/prior_upper", "must be finite with lower < upper");
    if (model != ModelKind::Ergm && box_lower() < 0.0)
        bad("prior_lower", "must be >= 0 for lattice models");
    if (particles < 1)
        bad("particles", "must be >= 1");
    if (particle_source != "uniform" && particle_source != "gaussian")
        bad("particle_source", "must be uniform|gaussian");
    if (!(particle_variance > 0.0))
        bad("particle_variance", "must be positive");
    if (!(bandwidth >= 0.0) || !std::isfinite(bandwidth))
        bad("bandwidth", "must be >= 0 (0 selects the default)");
    if (!(gamma0 > 0.0) || !std::isfinite(gamma0))
        bad("gamma0", "must be positive");
    if (!(eps1 > 0.0 && eps1 < gamma0))
        bad("eps1", "must lie in (0, gamma0)");
    if (!(eps2 > 0.0 && eps2 < 1.0))
        bad("eps2", "must lie in (0, 1)");
    if (!(tail_exponent > 0.5 && tail_exponent <= 1.0))
        bad("tail_exponent", "must lie in (0.5, 1]");
    if (sweeps_per_step < 1)
        bad("sweeps_per_step", "must be >= 1");
    if (store_stride < 1)
        bad("store_stride", "must be >= 1");
    if (max_wl_iterations < 1)
        bad("max_wl_iterations", "must be >= 1");
    if (cftp_max_sweeps < 1)
        bad("cftp_max_sweeps", "must be >= 1");
    if (theta_steps < 1)
        bad("theta_steps", "must be >= 1");
    if (burn_in >= theta_steps)
        bad("burn_in", "must be smaller than theta_steps");
    if (proposal != "reflected" && proposal != "gaussian")
        bad("proposal", "must be reflected|gaussian");
    if (!(proposal_scale >= 0.0) || !std::isfinite(proposal_scale))
        bad("proposal_scale", "must be >= 0 (0 selects the default)");
    if (!(target_accept > 0.0 && target_accept < 1.0))
        bad("target_accept", "must lie in (0, 1)");
    if (!(adapt_scale_exponent > 0.5 && adapt_scale_exponent <= 1.0))
        bad("adapt_scale_exponent", "must lie in (0.5, 1]");
    if (!(adapt_moment_exponent > 0.5 && adapt_moment_exponent <= 1.0))
        bad("adapt_moment_exponent", "must lie in (0.5, 1]");
    if (out.empty())
        bad("out", "must not be empty");
    if (histogram_bins < 1)
        bad("histogram_bins", "must be >= 1");
    if (!surface_grid.empty())
        parse_grid(surface_grid);
}

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v)
{
    std::size_t pos = 0;
    double x;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: " + key + ": not a number: '" + v + "'");
    }
    if (pos != v.size())
        throw std::invalid_argument("config: " + key + ": trailing characters in '" + v + "'");
    return x;
}

std::uint64_t to_u64(const std::string& key, const std::string& v)
{
    if (v.empty() || v[0] == '-')
        throw std::invalid_argument("config: " + key + ": expected a non-negative integer, got '" + v + "'");
    std::size_t pos = 0;
    unsigned long long x;
    try {
        x = std::stoull(v, &pos);
    } catch (const std::exception&) {
        // allow 1e5 style
        const double d = to_double(key, v);
        if (d < 0 || d != std::floor(d) || d > 1.8e19)
            throw std::invalid_argument("config: " + key + ": expected a non-negative integer, got '" + v + "'");
        return static_cast<std::uint64_t>(d);
    }
    if (pos != v.size()) {
        const double d = to_double(key, v);
        if (d < 0 || d != std::floor(d) || d > 1.8e19)
            throw std::invalid_argument("config: " + key + ": expected a non-negative integer, got '" + v + "'");
        return static_cast<std::uint64_t>(d);
    }
    return x;
}

int to_int(const std::string& key, const std::string& v)
{
    const auto x = to_u64(key, v);
    if (x > 1000000000ULL)
        throw std::invalid_argument("config: " + key + ": value too large");
    return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes")
        return true;
    if (v == "false" || v == "0" || v == "no")
        return false;
    throw std::invalid_argument("config: " + key + ": expected true|false, got '" + v + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters()
{
    static const std::map<std::string, Setter> m = {
        {"model", [](RunConfig& c, const std::string&, const std::string& v) { c.model = parse_model_kind(v); }},
        {"rows", [](RunConfig& c, const std::string& k, const std::string& v) { c.rows = to_int(k, v); }},
        {"cols", [](RunConfig& c, const std::string& k, const std::string& v) { c.cols = to_int(k, v); }},
        {"theta_true", [](RunConfig& c, const std::string& k, const std::string& v) { c.theta_true = to_double(k, v); }},
        {"sigma_true", [](RunConfig& c, const std::string& k, const std::string& v) { c.sigma_true = to_double(k, v); }},
        {"ergm_edges", [](RunConfig& c, const std::string&, const std::string& v) { c.ergm_edges = v; }},
        {"ergm_stats", [](RunConfig& c, const std::string&, const std::string& v) { c.ergm_stats = v; }},
        {"prior_lower", [](RunConfig& c, const std::string& k, const std::string& v) { c.prior_lower = to_double(k, v); }},
        {"prior_upper", [](RunConfig& c, const std::string& k, const std::string& v) { c.prior_upper = to_double(k, v); }},
        {"particles", [](RunConfig& c, const std::string& k, const std::string& v) { c.particles = to_u64(k, v); }},
        {"particle_source", [](RunConfig& c, const std::string&, const std::string& v) { c.particle_source = v; }},
        {"particle_mean", [](RunConfig& c, const std::string& k, const std::string& v) { c.particle_mean = to_double(k, v); }},
        {"particle_variance",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.particle_variance = to_double(k, v); }},
        {"bandwidth", [](RunConfig& c, const std::string& k, const std::string& v) { c.bandwidth = to_double(k, v); }},
        {"gamma0", [](RunConfig& c, const std::string& k, const std::string& v) { c.gamma0 = to_double(k, v); }},
        {"eps1", [](RunConfig& c, const std::string& k, const std::string& v) { c.eps1 = to_double(k, v); }},
        {"eps2", [](RunConfig& c, const std::string& k, const std::string& v) { c.eps2 = to_double(k, v); }},
        {"tail_exponent", [](RunConfig& c, const std::string& k, const std::string& v) { c.tail_exponent = to_double(k, v); }},
        {"recenter_interval",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.recenter_interval = to_u64(k, v); }},
        {"sweeps_per_step", [](RunConfig& c, const std::string& k, const std::string& v) { c.sweeps_per_step = to_int(k, v); }},
        {"store_stride", [](RunConfig& c, const std::string& k, const std::string& v) { c.store_stride = to_u64(k, v); }},
        {"record_from_start",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.record_from_start = to_bool(k, v); }},
        {"max_wl_iterations",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.max_wl_iterations = to_u64(k, v); }},
        {"cftp_max_sweeps", [](RunConfig& c, const std::string& k, const std::string& v) { c.cftp_max_sweeps = to_u64(k, v); }},
        {"theta_steps", [](RunConfig& c, const std::string& k, const std::string& v) { c.theta_steps = to_u64(k, v); }},
        {"burn_in", [](RunConfig& c, const std::string& k, const std::string& v) { c.burn_in = to_u64(k, v); }},
        {"proposal", [](RunConfig& c, const std::string&, const std::string& v) { c.proposal = v; }},
        {"proposal_scale", [](RunConfig& c, const std::string& k, const std::string& v) { c.proposal_scale = to_double(k, v); }},
        {"target_accept", [](RunConfig& c, const std::string& k, const std::string& v) { c.target_accept = to_double(k, v); }},
        {"adapt_scale_exponent",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.adapt_scale_exponent = to_double(k, v); }},
        {"adapt_moment_exponent",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.adapt_moment_exponent = to_double(k, v); }},
        {"adapt_blend_after",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.adapt_blend_after = to_u64(k, v); }},
        {"seed", [](RunConfig& c, const std::string& k, const std::string& v) { c.seed = to_u64(k, v); }},
        {"data_seed", [](RunConfig& c, const std::string& k, const std::string& v) { c.data_seed = to_u64(k, v); }},
        {"out", [](RunConfig& c, const std::string&, const std::string& v) { c.out = v; }},
        {"checkpoint_interval",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.checkpoint_interval = to_u64(k, v); }},
        {"acf_max_lag", [](RunConfig& c, const std::string& k, const std::string& v) { c.acf_max_lag = to_u64(k, v); }},
        {"histogram_bins", [](RunConfig& c, const std::string& k, const std::string& v) { c.histogram_bins = to_u64(k, v); }},
        {"surface_grid", [](RunConfig& c, const std::string&, const std::string& v) { c.surface_grid = v; }},
    };
    return m;
}

}  // namespace

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value)
{
    const auto& m = setters();
    const auto it = m.find(trim(key));
    if (it == m.end())
        throw std::invalid_argument("config: unknown key '" + key + "'");
    it->second(cfg, it->first, trim(value));
}

RunConfig parse_config(std::istream& is, const std::string& source)
{
    std::vector<std::pair<std::string, std::string>> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(source + ":" + std::to_string(line_no) + ": expected key = value");
        kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    RunConfig cfg;
    for (const auto& [k, v] : kv)
        if (k == "model")
            cfg = default_config(parse_model_kind(v));
    for (const auto& [k, v] : kv) {
        if (k == "model")
            continue;
        try {
            apply_setting(cfg, k, v);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(source + ": " + e.what());
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot open config file " + path);
    return parse_config(is, path);
}

std::string config_to_text(const RunConfig& c)
{
    std::ostringstream os;
    os.precision(17);
    os << "model = " << to_string(c.model) << '\n';
    os << "rows = " << c.rows << '\n';
    os << "cols = " << c.cols << '\n';
    os << "theta_true = " << c.theta_true << '\n';
    os << "sigma_true = " << c.sigma_true << '\n';
    os << "ergm_edges = " << c.ergm_edges << '\n';
    os << "ergm_stats = " << c.ergm_stats << '\n';
    os << "prior_lower = " << c.box_lower() << '\n';
    os << "prior_upper = " << c.box_upper() << '\n';
    os << "particles = " << c.particles << '\n';
    os << "particle_source = " << c.particle_source << '\n';
    os << "particle_mean = " << c.particle_mean << '\n';
    os << "particle_variance = " << c.particle_variance << '\n';
    os << "bandwidth = " << c.bandwidth << '\n';
    os << "gamma0 = " << c.gamma0 << '\n';
    os << "eps1 = " << c.eps1 << '\n';
    os << "eps2 = " << c.eps2 << '\n';
    os << "tail_exponent = " << c.tail_exponent << '\n';
    os << "recenter_interval = " << c.recenter_interval << '\n';
    os << "sweeps_per_step = " << c.sweeps_per_step << '\n';
    os << "store_stride = " << c.store_stride << '\n';
    os << "record_from_start = " << (c.record_from_start ? "true" : "false") << '\n';
    os << "max_wl_iterations = " << c.max_wl_iterations << '\n';
    os << "cftp_max_sweeps = " << c.cftp_max_sweeps << '\n';
    os << "theta_steps = " << c.theta_steps << '\n';
    os << "burn_in = " << c.burn_in << '\n';
    os << "proposal = " << c.proposal << '\n';
    os << "proposal_scale = " << c.proposal_scale << '\n';
    os << "target_accept = " << c.target_accept << '\n';
    os << "adapt_scale_exponent = " << c.adapt_scale_exponent << '\n';
    os << "adapt_moment_exponent = " << c.adapt_moment_exponent << '\n';
    os << "adapt_blend_after = " << c.adapt_blend_after << '\n';
    if (c.seed)
        os << "seed = " << *c.seed << '\n';
    if (c.data_seed)
        os << "data_seed = " << *c.data_seed << '\n';
    os << "out = " << c.out << '\n';
    os << "checkpoint_interval = " << c.checkpoint_interval << '\n';
    os << "acf_max_lag = " << c.acf_max_lag << '\n';
    os << "histogram_bins = " << c.histogram_bins << '\n';
    if (!c.surface_grid.empty())
        os << "surface_grid = " << c.surface_grid << '\n';
    return os.str();
}

GridSpec parse_grid(const std::string& text)
{
    const auto a = text.find(':');
    const auto b = a == std::string::npos ? std::string::npos : text.find(':', a + 1);
    if (a == std::string::npos || b == std::string::npos)
        throw std::invalid_argument("grid: expected lo:hi:steps, got '" + text + "'");
    GridSpec g;
    g.lo = to_double("grid lo", trim(text.substr(0, a)));
    g.hi = to_double("grid hi", trim(text.substr(a + 1, b - a - 1)));
    g.steps = to_u64("grid steps", trim(text.substr(b + 1)));
    if (!(g.lo < g.hi) || g.steps < 2)
        throw std::invalid_argument("grid: need lo < hi and at least 2 steps, got '" + text + "'");
    return g;
}

}  // namespace wlpost
