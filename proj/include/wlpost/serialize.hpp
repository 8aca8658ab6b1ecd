#pragma once

// Little helpers for the checkpoint format: fixed-width little-endian PODs,
// length-prefixed (u64) vectors and strings.

#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace wlpost::io {

template <typename T>
void write_pod(std::ostream& os, const T& v)
{
    static_assert(std::is_trivially_copyable_v<T>);
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is)
{
    static_assert(std::is_trivially_copyable_v<T>);
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is)
        throw std::runtime_error("checkpoint: unexpected end of data");
    return v;
}

template <typename T>
void write_vec(std::ostream& os, const std::vector<T>& v)
{
    write_pod<std::uint64_t>(os, v.size());
    if (!v.empty())
        os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
std::vector<T> read_vec(std::istream& is)
{
    const auto n = read_pod<std::uint64_t>(is);
    if (n > (std::uint64_t{1} << 40))
        throw std::runtime_error("checkpoint: implausible vector length");
    std::vector<T> v(n);
    if (n > 0)
        is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
    if (!is)
        throw std::runtime_error("checkpoint: unexpected end of data");
    return v;
}

inline void write_str(std::ostream& os, const std::string& s)
{
    write_pod<std::uint64_t>(os, s.size());
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_str(std::istream& is)
{
    const auto n = read_pod<std::uint64_t>(is);
    if (n > (std::uint64_t{1} << 32))
        throw std::runtime_error("checkpoint: implausible string length");
    std::string s(n, '\0');
    is.read(s.data(), static_cast<std::streamsize>(n));
    if (!is)
        throw std::runtime_error("checkpoint: unexpected end of data");
    return s;
}

}  // namespace wlpost::io
