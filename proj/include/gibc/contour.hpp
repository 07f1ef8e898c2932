#ifndef GIBC_CONTOUR_HPP
#define GIBC_CONTOUR_HPP

// Marching-squares level sets of an indicator sampled on a lattice grid.

#include "gibc/common.hpp"
#include "gibc/sampling.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

namespace gibc {

struct Polyline {
    std::vector<Point2> vertices;
    bool closed = false;

    double mean_radius() const
    {
        if (vertices.empty()) return 0.0;
        double acc = 0.0;
        for (const auto& p : vertices) acc += p.norm();
        return acc / static_cast<double>(vertices.size());
    }
};

namespace detail {

struct Segment {
    std::int64_t edge[2];
    Point2 point[2];
    bool used = false;
};

}  // namespace detail

/// Contours of ind.values at `threshold` (0 < threshold < 1). Cells with a corner
/// outside the sampled region are skipped; saddles are resolved by the cell mean.
inline std::vector<Polyline> extract_level_set(const IndicatorGrid& ind, double threshold)
{
    if (!(threshold > 0.0 && threshold < 1.0)) throw DomainError("extract_level_set: threshold must lie in (0, 1)");
    const SamplingGrid& g = ind.grid;
    if (!g.is_lattice()) throw DomainError("extract_level_set: indicator is not on a lattice grid");
    if (ind.values.size() != g.size()) throw DomainError("extract_level_set: value count does not match grid");

    const int res = g.resolution;
    const double step = 2.0 / (res - 1);
    std::vector<double> field(static_cast<std::size_t>(res) * res, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 0; k < g.size(); ++k) {
        field[static_cast<std::size_t>(g.lattice_row[k] * res + g.lattice_col[k])] = ind.values[k];
    }
    auto at = [&](int r, int c) { return field[static_cast<std::size_t>(r * res + c)]; };
    auto node = [&](int r, int c) { return Point2{-1.0 + c * step, -1.0 + r * step}; };
    auto h_edge = [res](int r, int c) { return 2 * (static_cast<std::int64_t>(r) * res + c); };
    auto v_edge = [res](int r, int c) { return 2 * (static_cast<std::int64_t>(r) * res + c) + 1; };

    std::vector<detail::Segment> segs;
    for (int r = 0; r + 1 < res; ++r) {
        for (int c = 0; c + 1 < res; ++c) {
            // corners counter-clockwise from bottom-left
            const std::array<int, 4> cr{r, r, r + 1, r + 1};
            const std::array<int, 4> cc{c, c + 1, c + 1, c};
            std::array<double, 4> v{};
            bool complete = true;
            for (int k = 0; k < 4; ++k) {
                v[static_cast<std::size_t>(k)] = at(cr[static_cast<std::size_t>(k)], cc[static_cast<std::size_t>(k)]);
                if (std::isnan(v[static_cast<std::size_t>(k)])) complete = false;
            }
            if (!complete) continue;
            std::array<bool, 4> above{};
            for (int k = 0; k < 4; ++k) above[static_cast<std::size_t>(k)] = v[static_cast<std::size_t>(k)] > threshold;

            // edge k joins corner k and corner k+1
            const std::array<std::int64_t, 4> edge_id{h_edge(r, c), v_edge(r, c + 1), h_edge(r + 1, c), v_edge(r, c)};
            auto crossing = [&](int k) {
                const auto a = static_cast<std::size_t>(k);
                const auto b = static_cast<std::size_t>((k + 1) % 4);
                const double t = (threshold - v[a]) / (v[b] - v[a]);
                const Point2 pa = node(cr[a], cc[a]);
                const Point2 pb = node(cr[b], cc[b]);
                return Point2{pa.x + t * (pb.x - pa.x), pa.y + t * (pb.y - pa.y)};
            };
            auto emit = [&](int e0, int e1) {
                detail::Segment s;
                s.edge[0] = edge_id[static_cast<std::size_t>(e0)];
                s.edge[1] = edge_id[static_cast<std::size_t>(e1)];
                s.point[0] = crossing(e0);
                s.point[1] = crossing(e1);
                segs.push_back(s);
            };

            std::vector<int> crossed;
            for (int k = 0; k < 4; ++k) {
                if (above[static_cast<std::size_t>(k)] != above[static_cast<std::size_t>((k + 1) % 4)]) crossed.push_back(k);
            }
            if (crossed.size() == 2) {
                emit(crossed[0], crossed[1]);
            } else if (crossed.size() == 4) {
                const bool center_above = 0.25 * (v[0] + v[1] + v[2] + v[3]) > threshold;
                if (center_above == above[0]) {
                    emit(0, 1);  // isolate corner 1
                    emit(2, 3);  // isolate corner 3
                } else {
                    emit(3, 0);  // isolate corner 0
                    emit(1, 2);  // isolate corner 2
                }
            }
        }
    }

    std::unordered_map<std::int64_t, std::vector<std::size_t>> by_edge;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        by_edge[segs[i].edge[0]].push_back(i);
        by_edge[segs[i].edge[1]].push_back(i);
    }
    auto next_from = [&](std::int64_t edge) -> std::ptrdiff_t {
        for (auto i : by_edge[edge]) {
            if (!segs[i].used) return static_cast<std::ptrdiff_t>(i);
        }
        return -1;
    };
    // Follows unused segments from `edge`, appending crossing points to `out`.
    auto walk = [&](std::int64_t edge, std::vector<Point2>& out) {
        for (auto i = next_from(edge); i >= 0; i = next_from(edge)) {
            auto& s = segs[static_cast<std::size_t>(i)];
            s.used = true;
            const int far = s.edge[0] == edge ? 1 : 0;
            out.push_back(s.point[far]);
            edge = s.edge[far];
        }
        return edge;
    };

    std::vector<Polyline> lines;
    for (auto& seed : segs) {
        if (seed.used) continue;
        seed.used = true;
        std::vector<Point2> fwd{seed.point[0], seed.point[1]};
        const std::int64_t end = walk(seed.edge[1], fwd);
        Polyline pl;
        if (end == seed.edge[0]) {
            fwd.pop_back();  // last point repeats the first
            pl.closed = true;
            pl.vertices = std::move(fwd);
        } else {
            std::vector<Point2> back;
            walk(seed.edge[0], back);
            pl.vertices.assign(back.rbegin(), back.rend());
            pl.vertices.insert(pl.vertices.end(), fwd.begin(), fwd.end());
        }
        lines.push_back(std::move(pl));
    }
    return lines;
}

}  // namespace gibc

#endif  // GIBC_CONTOUR_HPP
