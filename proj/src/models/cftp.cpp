#include "wlpost/models/cftp.hpp"

#include <sstream>
#include <stdexcept>
#include <vector>

namespace wlpost {

namespace {

// One raster heat-bath sweep applied to both chains with shared uniforms.
void coupled_sweep(IsingLattice& top, IsingLattice& bottom, const double (&p_plus)[9], Rng& g)
{
    const int rows = top.rows();
    const int cols = top.cols();
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const int i = r * cols + c;
            int st = 0, sb = 0;
            if (c > 0) {
                st += top[i - 1];
                sb += bottom[i - 1];
            }
            if (c + 1 < cols) {
                st += top[i + 1];
                sb += bottom[i + 1];
            }
            if (r > 0) {
                st += top[i - cols];
                sb += bottom[i - cols];
            }
            if (r + 1 < rows) {
                st += top[i + cols];
                sb += bottom[i + cols];
            }
            const double u = uniform01(g);
            top[i] = u < p_plus[st + 4] ? 1 : -1;
            bottom[i] = u < p_plus[sb + 4] ? 1 : -1;
        }
    }
}

void assert_monotone(const IsingLattice& top, const IsingLattice& bottom)
{
    for (int i = 0; i < top.size(); ++i)
        if (top[i] < bottom[i])
            throw std::logic_error("cftp: monotone coupling violated (top < bottom at site " + std::to_string(i) + ")");
}

}  // namespace

CftpResult cftp_sample_detailed(int rows, int cols, double theta, Rng& rng, const CftpOptions& options)
{
    if (!(theta >= 0.0))
        throw std::invalid_argument("cftp_sample: monotone coupling needs theta >= 0");
    double p_plus[9];
    for (int s = -4; s <= 4; ++s)
        p_plus[s + 4] = heatbath_prob_plus(theta, s);

    // seeds[k] drives the sweep at time -(k+1)
    std::vector<std::uint64_t> seeds;
    CftpResult res{IsingLattice(rows, cols), 0, 0, 0};
    for (std::uint64_t T = 1;; T *= 2) {
        if (T > options.max_sweeps) {
            std::ostringstream msg;
            msg << "cftp_sample: no coalescence within " << options.max_sweeps << " sweeps (theta=" << theta
                << ", lattice " << rows << "x" << cols << ")";
            throw std::runtime_error(msg.str());
        }
        while (seeds.size() < T)
            seeds.push_back(rng());
        IsingLattice top(rows, cols, 1);
        IsingLattice bottom(rows, cols, -1);
        for (std::uint64_t t = T; t >= 1; --t) {
            Rng g(seeds[t - 1]);
            coupled_sweep(top, bottom, p_plus, g);
            assert_monotone(top, bottom);
            ++res.monotonicity_checks;
            ++res.total_sweeps;
        }
        if (top == bottom) {
            res.sample = std::move(top);
            res.horizon = T;
            return res;
        }
    }
}

IsingLattice cftp_sample(int rows, int cols, double theta, Rng& rng, const CftpOptions& options)
{
    return cftp_sample_detailed(rows, cols, theta, rng, options).sample;
}

}  // namespace wlpost
