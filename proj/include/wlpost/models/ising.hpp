#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "wlpost/core.hpp"
#include "wlpost/random.hpp"
#include "wlpost/wl_engine.hpp"

namespace wlpost {

/// rows x cols lattice of +-1 spins with free boundary conditions.
class IsingLattice {
public:
    IsingLattice(int rows, int cols, std::int8_t fill = 1);
    IsingLattice(int rows, int cols, std::vector<std::int8_t> spins);

    static IsingLattice random(int rows, int cols, Rng& rng);
    static IsingLattice checkerboard(int rows, int cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int size() const { return rows_ * cols_; }
    std::int8_t at(int r, int c) const { return spins_[static_cast<std::size_t>(r * cols_ + c)]; }
    void set(int r, int c, std::int8_t s);
    std::int8_t& operator[](int i) { return spins_[static_cast<std::size_t>(i)]; }
    std::int8_t operator[](int i) const { return spins_[static_cast<std::size_t>(i)]; }
    const std::vector<std::int8_t>& spins() const { return spins_; }

    /// Sum of the (up to four) nearest-neighbour spins of site i.
    int neighbour_sum(int i) const;

    bool operator==(const IsingLattice&) const = default;

private:
    int rows_;
    int cols_;
    std::vector<std::int8_t> spins_;
};

/// Number of nearest-neighbour bonds, m(n-1) + (m-1)n.
int ising_bond_count(int rows, int cols);

/// sum over horizontal and vertical bonds of x_a x_b (K = 1).
SufficientStats ising_stat(const IsingLattice& lat);
int ising_energy(const IsingLattice& lat);

/// P(spin = +1 | neighbour sum s) = 1 / (1 + exp(-2 theta s)).
double heatbath_prob_plus(double theta, int neighbour_sum);

/// One systematic raster sweep of heat-bath updates. Returns the change in the
/// Ising statistic.
int ising_heatbath_sweep(IsingLattice& lat, double theta, Rng& rng);

/// Writes the lattice as a binary PGM (+1 white, -1 black).
void write_pgm(const IsingLattice& lat, const std::string& path);

class IsingSweepKernel final : public SweepKernel {
public:
    explicit IsingSweepKernel(IsingLattice start);

    void sweep(std::span<const double> theta, Rng& rng) override;
    const SufficientStats& stats() const override { return stats_; }
    void save(std::ostream& os) const override;
    void load(std::istream& is) override;

    const IsingLattice& lattice() const { return lat_; }

private:
    IsingLattice lat_;
    SufficientStats stats_;
};

}  // namespace wlpost
