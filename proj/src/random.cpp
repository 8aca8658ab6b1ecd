#include "wlpost/random.hpp"

#include <sstream>
#include <stdexcept>

namespace wlpost {

std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Rng make_stream(std::uint64_t root_seed, std::string_view name)
{
    // FNV-1a of the stream name, mixed with the root seed
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : name) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    std::uint64_t state = root_seed ^ h;
    std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(state)), static_cast<std::uint32_t>(splitmix64(state)),
                      static_cast<std::uint32_t>(splitmix64(state)), static_cast<std::uint32_t>(splitmix64(state)),
                      static_cast<std::uint32_t>(splitmix64(state)), static_cast<std::uint32_t>(splitmix64(state)),
                      static_cast<std::uint32_t>(splitmix64(state)), static_cast<std::uint32_t>(splitmix64(state))};
    return Rng(seq);
}

double standard_normal(Rng& rng)
{
    // fresh distribution each call: no cached second variate survives between calls,
    // which keeps checkpointed generator state sufficient for bitwise resume
    std::normal_distribution<double> n(0.0, 1.0);
    return n(rng);
}

std::size_t sample_categorical(std::span<const double> probs, double u)
{
    if (probs.empty())
        throw std::invalid_argument("sample_categorical: empty distribution");
    double cum = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] > 0.0) {
            cum += probs[i];
            last_positive = i;
            if (u < cum)
                return i;
        }
    }
    return last_positive;
}

std::string serialize_rng(const Rng& rng)
{
    std::ostringstream os;
    os << rng;
    return os.str();
}

void deserialize_rng(Rng& rng, const std::string& text)
{
    std::istringstream is(text);
    is >> rng;
    if (!is)
        throw std::runtime_error("deserialize_rng: malformed generator state");
}

}  // namespace wlpost
