#include "wlpost/checkpoint.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "wlpost/serialize.hpp"

namespace wlpost {

namespace {

constexpr char kMagic[8] = {'W', 'L', 'P', 'O', 'S', 'T', 'C', 'K'};

std::uint64_t fnv1a(const std::string& s)
{
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

void write_checkpoint_file(const std::string& path, const std::string& payload)
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os)
            throw std::runtime_error("checkpoint: cannot open " + tmp + " for writing");
        os.write(kMagic, sizeof kMagic);
        io::write_pod<std::uint32_t>(os, kCheckpointVersion);
        io::write_pod<std::uint64_t>(os, payload.size());
        io::write_pod<std::uint64_t>(os, fnv1a(payload));
        os.write(payload.data(), static_cast<std::streamsize>(payload.size()));
        if (!os)
            throw std::runtime_error("checkpoint: write to " + tmp + " failed");
    }
    std::filesystem::rename(tmp, path);
}

std::string read_checkpoint_file(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("checkpoint: cannot open " + path);
    char magic[8];
    is.read(magic, sizeof magic);
    if (!is || !std::equal(magic, magic + 8, kMagic))
        throw std::runtime_error("checkpoint: " + path + " is not a checkpoint file");
    const auto version = io::read_pod<std::uint32_t>(is);
    if (version != kCheckpointVersion)
        throw std::runtime_error("checkpoint: " + path + " has unsupported version " + std::to_string(version));
    const auto len = io::read_pod<std::uint64_t>(is);
    const auto sum = io::read_pod<std::uint64_t>(is);
    if (len > (std::uint64_t{1} << 40))
        throw std::runtime_error("checkpoint: implausible payload length");
    std::string payload(len, '\0');
    is.read(payload.data(), static_cast<std::streamsize>(len));
    if (!is)
        throw std::runtime_error("checkpoint: " + path + " is truncated");
    if (fnv1a(payload) != sum)
        throw std::runtime_error("checkpoint: " + path + " failed its checksum");
    return payload;
}

}  // namespace wlpost
