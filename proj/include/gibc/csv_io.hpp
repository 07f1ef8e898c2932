#ifndef GIBC_CSV_IO_HPP
#define GIBC_CSV_IO_HPP

// Text outputs for external plotting and Cauchy-data input. Reals are printed
// with 17 significant digits so they parse back to the same double.

#include "gibc/contour.hpp"
#include "gibc/gap_io.hpp"
#include "gibc/impedance.hpp"
#include "gibc/sampling.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace gibc {

namespace detail {

inline std::string fmt17(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::vector<std::string> split_fields(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r' && ch != ' ' && ch != '\t') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_double(const std::string& s, const std::string& where)
{
    double v = 0.0;
    const char* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || s.empty()) throw FormatError(where + ": cannot parse number '" + s + "'");
    return v;
}

inline long parse_long(const std::string& s, const std::string& where)
{
    long v = 0;
    const char* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || s.empty()) throw FormatError(where + ": cannot parse integer '" + s + "'");
    return v;
}

}  // namespace detail

/// Columns x, y, value, flags.
inline void save_indicator_csv(const std::filesystem::path& path, const IndicatorGrid& ind)
{
    std::string out = "x,y,value,flags\n";
    for (std::size_t k = 0; k < ind.grid.size(); ++k) {
        out += detail::fmt17(ind.grid.points[k].x) + ',' + detail::fmt17(ind.grid.points[k].y) + ',' +
               detail::fmt17(ind.values[k]) + ',' + std::to_string(ind.flags[k]) + '\n';
    }
    detail::write_file(path, out.data(), out.size());
}

/// Columns polyline, x, y; closed polylines do not repeat their first vertex.
inline void save_contour_csv(const std::filesystem::path& path, const std::vector<Polyline>& lines)
{
    std::string out = "polyline,x,y\n";
    for (std::size_t id = 0; id < lines.size(); ++id) {
        for (const auto& v : lines[id].vertices) {
            out += std::to_string(id) + ',' + detail::fmt17(v.x) + ',' + detail::fmt17(v.y) + '\n';
        }
    }
    detail::write_file(path, out.data(), out.size());
}

/// Columns n, Re f_n, Im f_n, Re g_n, Im g_n; g is the outward current d/dr u on r = 1.
inline void save_cauchy_csv(const std::filesystem::path& path, const CauchyPair& c)
{
    c.validate();
    std::string out = "n,re_f,im_f,re_g,im_g\n";
    for (int n = -c.f.order(); n <= c.f.order(); ++n) {
        out += std::to_string(n) + ',' + detail::fmt17(c.f[n].real()) + ',' + detail::fmt17(c.f[n].imag()) + ',' +
               detail::fmt17(c.g[n].real()) + ',' + detail::fmt17(c.g[n].imag()) + '\n';
    }
    detail::write_file(path, out.data(), out.size());
}

/// Reads a Cauchy pair. An optional header line is skipped; missing modes are zero,
/// and the truncation order is the largest |n| present.
inline CauchyPair load_cauchy_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open Cauchy data file " + path.string());
    std::map<long, std::pair<cplx, cplx>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto fields = detail::split_fields(line);
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (!fields[0].empty() && fields[0][0] == '#') continue;
        const std::string where = path.string() + ":" + std::to_string(lineno);
        if (lineno == 1 && fields[0] == "n") continue;
        if (fields.size() != 5) throw FormatError(where + ": expected 5 columns, found " + std::to_string(fields.size()));
        const long n = detail::parse_long(fields[0], where);
        if (n < -100000 || n > 100000) throw FormatError(where + ": mode index out of range");
        if (rows.count(n)) throw FormatError(where + ": duplicate mode " + std::to_string(n));
        rows[n] = {{detail::parse_double(fields[1], where), detail::parse_double(fields[2], where)},
                   {detail::parse_double(fields[3], where), detail::parse_double(fields[4], where)}};
    }
    if (rows.empty()) throw FormatError(path.string() + ": no data rows");
    long order = 0;
    for (const auto& [n, v] : rows) order = std::max(order, std::abs(n));
    CauchyPair c{FourierCoefficients(static_cast<int>(order)), FourierCoefficients(static_cast<int>(order))};
    for (const auto& [n, v] : rows) {
        c.f[static_cast<int>(n)] = v.first;
        c.g[static_cast<int>(n)] = v.second;
    }
    if (!c.f.all_finite() || !c.g.all_finite()) throw FormatError(path.string() + ": non-finite values");
    return c;
}

}  // namespace gibc

#endif  // GIBC_CSV_IO_HPP
