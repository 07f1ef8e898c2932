#ifndef GIBC_GAP_IO_HPP
#define GIBC_GAP_IO_HPP

// Native gap-matrix container. Little-endian layout:
//
//   offset  size  field
//        0     8  magic "GIBCGAP1"
//        8     4  uint32 M (collocation points)
//       12     4  uint32 N (kernel truncation)
//       16     8  double rho
//       24    32  double Re(eta), Im(eta), Re(gamma), Im(gamma)
//       56     8  double delta
//       64     8  uint64 seed
//       72  16M^2 row-major entries, (Re, Im) double pairs
//
// Doubles are stored as their IEEE-754 bit patterns, so a write/read cycle is
// bit-exact.

#include "gibc/common.hpp"
#include "gibc/operator.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace gibc {

inline constexpr char kGapMagic[8] = {'G', 'I', 'B', 'C', 'G', 'A', 'P', '1'};
inline constexpr std::size_t kGapHeaderBytes = 72;

static_assert(std::endian::native == std::endian::little, "gap container I/O assumes a little-endian host");

namespace detail {

template <typename T>
void put(std::vector<char>& buf, T v)
{
    const auto at = buf.size();
    buf.resize(at + sizeof(T));
    std::memcpy(buf.data() + at, &v, sizeof(T));
}

template <typename T>
T take(const std::vector<char>& buf, std::size_t& at)
{
    T v;
    std::memcpy(&v, buf.data() + at, sizeof(T));
    at += sizeof(T);
    return v;
}

inline std::vector<char> read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, const char* data, std::size_t size)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out.write(data, static_cast<std::streamsize>(size));
    if (!out) throw Error("write failed for " + path.string());
}

}  // namespace detail

inline std::vector<char> encode_gap_matrix(const GapMatrix& a)
{
    const int m = a.size();
    std::vector<char> buf(kGapMagic, kGapMagic + 8);
    buf.reserve(kGapHeaderBytes + 16 * static_cast<std::size_t>(m) * m);
    detail::put<std::uint32_t>(buf, static_cast<std::uint32_t>(m));
    detail::put<std::uint32_t>(buf, static_cast<std::uint32_t>(a.config.kernel_truncation));
    detail::put(buf, a.config.rho);
    detail::put(buf, a.impedance.eta.real());
    detail::put(buf, a.impedance.eta.imag());
    detail::put(buf, a.impedance.gamma.real());
    detail::put(buf, a.impedance.gamma.imag());
    detail::put(buf, a.noise.delta);
    detail::put<std::uint64_t>(buf, a.noise.seed);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            detail::put(buf, a.entries(i, j).real());
            detail::put(buf, a.entries(i, j).imag());
        }
    }
    return buf;
}

inline GapMatrix decode_gap_matrix(const std::vector<char>& buf)
{
    if (buf.size() < kGapHeaderBytes || std::memcmp(buf.data(), kGapMagic, 8) != 0) {
        throw FormatError("gap container: bad magic or truncated header");
    }
    std::size_t at = 8;
    const auto m = detail::take<std::uint32_t>(buf, at);
    const auto n = detail::take<std::uint32_t>(buf, at);
    if (m < 4 || m > 1u << 15) throw FormatError("gap container: implausible size M = " + std::to_string(m));
    const std::size_t expected = kGapHeaderBytes + 16 * static_cast<std::size_t>(m) * m;
    if (buf.size() != expected) {
        throw FormatError("gap container: expected " + std::to_string(expected) + " bytes, found " +
                          std::to_string(buf.size()));
    }
    GapMatrix a;
    a.config.collocation_points = static_cast<int>(m);
    a.config.kernel_truncation = static_cast<int>(n);
    a.config.rho = detail::take<double>(buf, at);
    const double er = detail::take<double>(buf, at);
    const double ei = detail::take<double>(buf, at);
    const double gr = detail::take<double>(buf, at);
    const double gi = detail::take<double>(buf, at);
    a.impedance = {{er, ei}, {gr, gi}};
    a.noise.delta = detail::take<double>(buf, at);
    a.noise.seed = detail::take<std::uint64_t>(buf, at);
    a.entries.resize(m, m);
    for (std::uint32_t i = 0; i < m; ++i) {
        for (std::uint32_t j = 0; j < m; ++j) {
            const double re = detail::take<double>(buf, at);
            const double im = detail::take<double>(buf, at);
            a.entries(i, j) = {re, im};
        }
    }
    if (!a.entries.allFinite()) throw FormatError("gap container: non-finite entries");
    try {
        a.config.validate();
        a.noise.validate();
    } catch (const DomainError& e) {
        throw FormatError(std::string("gap container: invalid metadata (") + e.what() + ")");
    }
    return a;
}

inline void save_gap_matrix(const std::filesystem::path& path, const GapMatrix& a)
{
    const auto buf = encode_gap_matrix(a);
    detail::write_file(path, buf.data(), buf.size());
}

inline GapMatrix load_gap_matrix(const std::filesystem::path& path)
{
    return decode_gap_matrix(detail::read_file(path));
}

/// Debug export: one row "i,j,re,im" per entry.
inline void save_gap_csv(const std::filesystem::path& path, const GapMatrix& a)
{
    std::string out = "i,j,re,im\n";
    char line[96];
    for (int i = 0; i < a.size(); ++i) {
        for (int j = 0; j < a.size(); ++j) {
            std::snprintf(line, sizeof line, "%d,%d,%.17g,%.17g\n", i, j, a.entries(i, j).real(),
                          a.entries(i, j).imag());
            out += line;
        }
    }
    detail::write_file(path, out.data(), out.size());
}

}  // namespace gibc

#endif  // GIBC_GAP_IO_HPP
