#include "nlsball/checkpoint.hpp"

#include "nlsball/errors.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace nlsball {

namespace {

template <typename T>
void put_le(std::ostream& os, T value)
{
    std::uint64_t bits = 0;
    if constexpr (std::is_same_v<T, double>)
        bits = std::bit_cast<std::uint64_t>(value);
    else
        bits = static_cast<std::uint64_t>(value);
    std::array<char, sizeof(T)> bytes{};
    for (std::size_t i = 0; i < sizeof(T); ++i)
        bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    os.write(bytes.data(), bytes.size());
}

template <typename T>
bool get_le(std::istream& is, T& value)
{
    std::array<unsigned char, sizeof(T)> bytes{};
    if (!is.read(reinterpret_cast<char*>(bytes.data()), bytes.size()))
        return false;
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    if constexpr (std::is_same_v<T, double>)
        value = std::bit_cast<double>(bits);
    else
        value = static_cast<T>(bits);
    return true;
}

} // namespace

void write_checkpoint(std::ostream& os, const Checkpoint& ckpt)
{
    os.write(checkpoint_magic, sizeof checkpoint_magic);
    put_le<std::uint32_t>(os, checkpoint_version);
    put_le<std::uint64_t>(os, ckpt.header.config_hash);
    put_le<std::uint64_t>(os, ckpt.header.seed);
    put_le<std::uint64_t>(os, ckpt.header.dim);
    for (const auto& s : ckpt.snapshots) {
        if (s.state.dim() != ckpt.header.dim)
            throw ValidationError("snapshot dimension does not match checkpoint header");
        put_le<double>(os, s.time);
        for (const auto& c : s.state.coeffs()) {
            put_le<double>(os, c.real());
            put_le<double>(os, c.imag());
        }
    }
    if (!os)
        throw std::runtime_error("failed writing checkpoint");
}

Checkpoint read_checkpoint(std::istream& is)
{
    char magic[sizeof checkpoint_magic];
    if (!is.read(magic, sizeof magic) || !std::equal(magic, magic + sizeof magic, checkpoint_magic))
        throw ValidationError("not a checkpoint file (bad magic)");
    std::uint32_t version = 0;
    Checkpoint ckpt;
    if (!get_le(is, version) || !get_le(is, ckpt.header.config_hash) ||
        !get_le(is, ckpt.header.seed) || !get_le(is, ckpt.header.dim))
        throw ValidationError("truncated checkpoint header");
    if (version != checkpoint_version)
        throw ValidationError("unsupported checkpoint version " + std::to_string(version));
    const auto dim = static_cast<std::size_t>(ckpt.header.dim);
    for (;;) {
        Snapshot s;
        if (!get_le(is, s.time))
            break;
        s.state = SpectralField(dim);
        for (std::size_t n = 0; n < dim; ++n) {
            double re = 0, im = 0;
            if (!get_le(is, re) || !get_le(is, im))
                throw ValidationError("truncated checkpoint record");
            s.state.coeffs()[n] = {re, im};
        }
        ckpt.snapshots.push_back(std::move(s));
    }
    return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_checkpoint(os, ckpt);
}

Checkpoint load_checkpoint(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("cannot open " + path.string());
    return read_checkpoint(is);
}

} // namespace nlsball
