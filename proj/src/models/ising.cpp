#include "wlpost/models/ising.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "wlpost/serialize.hpp"

namespace wlpost {

IsingLattice::IsingLattice(int rows, int cols, std::int8_t fill) : rows_(rows), cols_(cols)
{
    if (rows < 1 || cols < 1)
        throw std::invalid_argument("IsingLattice: dimensions must be positive");
    if (fill != 1 && fill != -1)
        throw std::invalid_argument("IsingLattice: spins must be +1 or -1");
    spins_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill);
}

IsingLattice::IsingLattice(int rows, int cols, std::vector<std::int8_t> spins)
    : rows_(rows), cols_(cols), spins_(std::move(spins))
{
    if (rows < 1 || cols < 1)
        throw std::invalid_argument("IsingLattice: dimensions must be positive");
    if (spins_.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
        throw std::invalid_argument("IsingLattice: spin count does not match dimensions");
    for (auto s : spins_)
        if (s != 1 && s != -1)
            throw std::invalid_argument("IsingLattice: spins must be +1 or -1");
}

IsingLattice IsingLattice::random(int rows, int cols, Rng& rng)
{
    IsingLattice lat(rows, cols);
    for (auto& s : lat.spins_)
        s = (rng() >> 63) ? 1 : -1;
    return lat;
}

IsingLattice IsingLattice::checkerboard(int rows, int cols)
{
    IsingLattice lat(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            lat.set(r, c, ((r + c) % 2 == 0) ? 1 : -1);
    return lat;
}

void IsingLattice::set(int r, int c, std::int8_t s)
{
    if (s != 1 && s != -1)
        throw std::invalid_argument("IsingLattice::set: spins must be +1 or -1");
    spins_[static_cast<std::size_t>(r * cols_ + c)] = s;
}

int IsingLattice::neighbour_sum(int i) const
{
    const int r = i / cols_;
    const int c = i % cols_;
    const auto* s = spins_.data();
    int sum = 0;
    if (c > 0)
        sum += s[i - 1];
    if (c + 1 < cols_)
        sum += s[i + 1];
    if (r > 0)
        sum += s[i - cols_];
    if (r + 1 < rows_)
        sum += s[i + cols_];
    return sum;
}

int ising_bond_count(int rows, int cols)
{
    return rows * (cols - 1) + (rows - 1) * cols;
}

int ising_energy(const IsingLattice& lat)
{
    int e = 0;
    for (int r = 0; r < lat.rows(); ++r)
        for (int c = 0; c < lat.cols(); ++c) {
            if (c + 1 < lat.cols())
                e += lat.at(r, c) * lat.at(r, c + 1);
            if (r + 1 < lat.rows())
                e += lat.at(r, c) * lat.at(r + 1, c);
        }
    return e;
}

SufficientStats ising_stat(const IsingLattice& lat)
{
    return SufficientStats{static_cast<double>(ising_energy(lat))};
}

double heatbath_prob_plus(double theta, int neighbour_sum)
{
    return 1.0 / (1.0 + std::exp(-2.0 * theta * neighbour_sum));
}

int ising_heatbath_sweep(IsingLattice& lat, double theta, Rng& rng)
{
    // neighbour sums lie in {-4,-2,0,2,4}
    double p_plus[9];
    for (int s = -4; s <= 4; ++s)
        p_plus[s + 4] = heatbath_prob_plus(theta, s);
    int delta = 0;
    const int rows = lat.rows();
    const int cols = lat.cols();
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const int i = r * cols + c;
            int s = 0;
            if (c > 0)
                s += lat[i - 1];
            if (c + 1 < cols)
                s += lat[i + 1];
            if (r > 0)
                s += lat[i - cols];
            if (r + 1 < rows)
                s += lat[i + cols];
            const std::int8_t next = uniform01(rng) < p_plus[s + 4] ? 1 : -1;
            const std::int8_t old = lat[i];
            if (next != old) {
                delta += (next - old) * s;
                lat[i] = next;
            }
        }
    }
    return delta;
}

void write_pgm(const IsingLattice& lat, const std::string& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("write_pgm: cannot open " + path);
    os << "P5\n" << lat.cols() << ' ' << lat.rows() << "\n255\n";
    for (auto s : lat.spins())
        os.put(static_cast<char>(s > 0 ? 255 : 0));
}

IsingSweepKernel::IsingSweepKernel(IsingLattice start) : lat_(std::move(start)), stats_(ising_stat(lat_)) {}

void IsingSweepKernel::sweep(std::span<const double> theta, Rng& rng)
{
    stats_[0] += ising_heatbath_sweep(lat_, theta[0], rng);
}

void IsingSweepKernel::save(std::ostream& os) const
{
    io::write_pod<std::int32_t>(os, lat_.rows());
    io::write_pod<std::int32_t>(os, lat_.cols());
    io::write_vec(os, lat_.spins());
}

void IsingSweepKernel::load(std::istream& is)
{
    const int rows = io::read_pod<std::int32_t>(is);
    const int cols = io::read_pod<std::int32_t>(is);
    auto spins = io::read_vec<std::int8_t>(is);
    lat_ = IsingLattice(rows, cols, std::move(spins));
    stats_ = ising_stat(lat_);
}

}  // namespace wlpost
