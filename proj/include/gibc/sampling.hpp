#ifndef GIBC_SAMPLING_HPP
#define GIBC_SAMPLING_HPP

// Sampling-method reconstruction of the inclusion: Poisson-kernel right-hand
// sides, spectral cutoff and Tikhonov-Morozov solves, indicators W and P.

#include "gibc/common.hpp"
#include "gibc/operator.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <vector>

namespace gibc {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    double norm() const { return std::hypot(x, y); }
};

struct SamplingGrid {
    std::vector<Point2> points;
    double margin = 0.1;
    /// Lattice metadata; resolution = 0 for an unstructured point list.
    int resolution = 0;
    std::vector<int> lattice_row;  ///< index along y
    std::vector<int> lattice_col;  ///< index along x

    std::size_t size() const { return points.size(); }
    bool is_lattice() const { return resolution > 0; }

    void validate() const
    {
        if (!(margin > 0.0)) throw DomainError("SamplingGrid: margin must be positive");
        for (const auto& p : points) {
            if (p.norm() > 1.0 - margin + 1e-12) throw DomainError("SamplingGrid: point outside |z| <= 1 - margin");
        }
    }
};

/// resolution x resolution lattice on [-1, 1]^2 restricted to |z| <= 1 - margin.
inline SamplingGrid make_lattice_grid(int resolution, double margin)
{
    if (resolution < 2) throw DomainError("make_lattice_grid: resolution must be >= 2");
    if (!(margin > 0.0 && margin < 1.0)) throw DomainError("make_lattice_grid: margin must lie in (0, 1)");
    SamplingGrid g;
    g.margin = margin;
    g.resolution = resolution;
    const double step = 2.0 / (resolution - 1);
    for (int r = 0; r < resolution; ++r) {
        for (int c = 0; c < resolution; ++c) {
            const Point2 p{-1.0 + c * step, -1.0 + r * step};
            if (p.norm() <= 1.0 - margin + 1e-12) {
                g.points.push_back(p);
                g.lattice_row.push_back(r);
                g.lattice_col.push_back(c);
            }
        }
    }
    return g;
}

inline SamplingGrid make_point_grid(std::vector<Point2> points, double margin = 0.1)
{
    SamplingGrid g;
    g.points = std::move(points);
    g.margin = margin;
    g.validate();
    return g;
}

enum class IndicatorKind { W, P };

inline const char* to_string(IndicatorKind k) { return k == IndicatorKind::W ? "W" : "P"; }

/// Per-point flag bits in IndicatorGrid::flags.
enum PointFlag : std::uint32_t {
    kFlagDegenerate = 1u << 0,       ///< every spectral mode was cut, or the solution vanished
    kFlagMorozovTooLarge = 1u << 1,  ///< discrepancy target exceeds the data; alpha at upper bracket
    kFlagMorozovUnreachable = 1u << 2,  ///< residual at smallest alpha still above target
};

struct IndicatorGrid {
    SamplingGrid grid;
    std::vector<double> values;  ///< normalized to max 1 unless all zero
    std::vector<std::uint32_t> flags;
    std::vector<double> alphas;  ///< Tikhonov parameter per point (P only)
    IndicatorKind kind = IndicatorKind::W;

    std::size_t flagged_count() const
    {
        return static_cast<std::size_t>(std::count_if(flags.begin(), flags.end(), [](auto f) { return f != 0; }));
    }
};

namespace detail {

/// Runs body(i) for i in [0, n) on all hardware threads; each index is written by one thread.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body)
{
    const std::size_t workers = std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

inline void normalize_by_max(std::vector<double>& v)
{
    const double mx = v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
    if (mx > 0.0) {
        for (auto& x : v) x /= mx;
    }
}

}  // namespace detail

/// Poisson kernel (1/2pi)(1 - |z|^2)/(|z|^2 + 1 - 2|z| cos(theta_j - theta_z)) on the M-point grid.
inline CVector poisson_rhs(Point2 z, int m)
{
    const double r = z.norm();
    if (!(r < 1.0)) throw DomainError("poisson_rhs: sampling point must satisfy |z| < 1");
    if (m < 1) throw DomainError("poisson_rhs: need M >= 1");
    const double tz = std::atan2(z.y, z.x);
    const double r2 = r * r;
    CVector b(m);
    for (int j = 0; j < m; ++j) {
        b(j) = (1.0 / kTwoPi) * (1.0 - r2) / (r2 + 1.0 - 2.0 * r * std::cos(grid_angle(j, m) - tz));
    }
    return b;
}

struct CutoffSolution {
    CVector f;
    int retained = 0;
    bool degenerate = false;
};

/// f = sum over sqrt-eigenvalues s_k > cutoff of (v_k^* b / s_k) v_k.
inline CutoffSolution solve_cutoff(const PsdSqrt& s, const CVector& b, double cutoff = 1e-8)
{
    if (!(cutoff > 0.0)) throw DomainError("solve_cutoff: cutoff must be positive");
    if (b.size() != s.vectors.rows()) throw DomainError("solve_cutoff: size mismatch");
    CutoffSolution out;
    out.f = CVector::Zero(b.size());
    const CVector c = s.vectors.adjoint() * b;
    for (Eigen::Index k = 0; k < c.size(); ++k) {
        if (s.root_values(k) > cutoff) {
            out.f += (c(k) / s.root_values(k)) * s.vectors.col(k);
            ++out.retained;
        }
    }
    out.degenerate = out.retained == 0;
    return out;
}

/// Convenience overload for a Hermitian PSD matrix S given directly.
inline CutoffSolution solve_cutoff(const CMatrix& s, const CVector& b, double cutoff = 1e-8)
{
    const auto eig = hermitian_eigen(s);
    PsdSqrt root;
    root.vectors = eig.vectors;
    root.root_values = eig.values.cwiseMax(0.0);
    return solve_cutoff(root, b, cutoff);
}

/// W(z) = ||f_z||^{-1} normalized to max 1, with f_z the cutoff solution of S f = b_z.
inline IndicatorGrid indicator_W(const SamplingGrid& grid, const PsdSqrt& s, double cutoff = 1e-8)
{
    if (grid.size() == 0) throw DomainError("indicator_W: empty sampling grid");
    const int m = static_cast<int>(s.vectors.rows());
    IndicatorGrid out;
    out.grid = grid;
    out.kind = IndicatorKind::W;
    out.values.assign(grid.size(), 0.0);
    out.flags.assign(grid.size(), 0u);
    detail::parallel_for(grid.size(), [&](std::size_t i) {
        const auto sol = solve_cutoff(s, poisson_rhs(grid.points[i], m), cutoff);
        const double nrm = sol.f.norm();
        if (sol.degenerate || !(nrm > 0.0)) {
            out.flags[i] |= kFlagDegenerate;
        } else {
            out.values[i] = 1.0 / nrm;
        }
    });
    detail::normalize_by_max(out.values);
    return out;
}

/// f^alpha = (H^* H + alpha I)^{-1} H^* b.
inline CVector tikhonov_solve(const CMatrix& h, const CVector& b, double alpha)
{
    if (!(alpha > 0.0)) throw DomainError("tikhonov_solve: alpha must be positive");
    if (h.rows() != b.size()) throw DomainError("tikhonov_solve: size mismatch");
    const CMatrix normal = h.adjoint() * h + alpha * CMatrix::Identity(h.cols(), h.cols());
    return normal.ldlt().solve(h.adjoint() * b);
}

/// Spectral form of tikhonov_solve for Hermitian H = V diag(mu) V^*.
inline CVector tikhonov_solve(const HermitianEigen& h, const CVector& b, double alpha)
{
    if (!(alpha > 0.0)) throw DomainError("tikhonov_solve: alpha must be positive");
    CVector c = h.vectors.adjoint() * b;
    for (Eigen::Index k = 0; k < c.size(); ++k) {
        const double mu = h.values(k);
        c(k) *= mu / (mu * mu + alpha);
    }
    return h.vectors * c;
}

namespace detail {

/// ||H f^alpha - b|| from the eigen-coefficients c = V^* b.
inline double spectral_residual(const RVector& mu, const CVector& c, double alpha)
{
    double acc = 0.0;
    for (Eigen::Index k = 0; k < c.size(); ++k) {
        const double damp = alpha / (mu(k) * mu(k) + alpha);
        acc += damp * damp * std::norm(c(k));
    }
    return std::sqrt(acc);
}

}  // namespace detail

inline double tikhonov_residual(const HermitianEigen& h, const CVector& b, double alpha)
{
    return detail::spectral_residual(h.values, h.vectors.adjoint() * b, alpha);
}

struct MorozovSettings {
    double alpha_min = 1e-16;
    double alpha_max = 1e4;
    double rel_tol = 1e-3;
    int max_iter = 200;
};

enum class MorozovStatus { Converged, TargetAboveData, Unreachable };

struct MorozovResult {
    double alpha = 0.0;
    double residual = 0.0;
    MorozovStatus status = MorozovStatus::Converged;
};

/// Bisection in log(alpha) for ||H f^alpha - b|| = delta_abs. The Tikhonov residual
/// is nondecreasing in alpha.
inline MorozovResult morozov_alpha(const HermitianEigen& h, const CVector& b, double delta_abs,
                                   const MorozovSettings& set = {})
{
    if (!(delta_abs > 0.0)) throw DomainError("morozov_alpha: discrepancy target must be positive");
    MorozovResult out;
    const CVector c = h.vectors.adjoint() * b;
    auto residual = [&](double a) { return detail::spectral_residual(h.values, c, a); };
    const double r_hi = residual(set.alpha_max);
    if (r_hi <= delta_abs) {
        out = {set.alpha_max, r_hi, MorozovStatus::TargetAboveData};
        return out;
    }
    const double r_lo = residual(set.alpha_min);
    if (r_lo >= delta_abs) {
        out = {set.alpha_min, r_lo, MorozovStatus::Unreachable};
        return out;
    }
    double lo = std::log(set.alpha_min);
    double hi = std::log(set.alpha_max);
    double alpha = set.alpha_min;
    double res = r_lo;
    for (int it = 0; it < set.max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        alpha = std::exp(mid);
        res = residual(alpha);
        if (std::abs(res - delta_abs) <= set.rel_tol * delta_abs) break;
        if (res < delta_abs) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    out.alpha = alpha;
    out.residual = res;
    out.status = MorozovStatus::Converged;
    return out;
}

inline MorozovResult morozov_alpha(const CMatrix& h, const CVector& b, double delta_abs,
                                   const MorozovSettings& set = {})
{
    return morozov_alpha(hermitian_eigen(h), b, delta_abs, set);
}

struct PIndicatorSettings {
    double tau = 1.2;
    /// Relative discrepancy used when the data carry no noise (delta = 0).
    double noiseless_level = 1e-8;
    MorozovSettings morozov{};
};

/// P(z) = ||S f_z^alpha||^{-1} normalized to max 1; f_z^alpha is the Tikhonov solution of
/// H f = b_z with alpha from the discrepancy principle at tau * delta * ||b_z||.
inline IndicatorGrid indicator_P(const SamplingGrid& grid, const HermitianEigen& h, const PsdSqrt& s,
                                 const NoiseSpec& noise, const PIndicatorSettings& set = {})
{
    if (grid.size() == 0) throw DomainError("indicator_P: empty sampling grid");
    noise.validate();
    const int m = static_cast<int>(h.vectors.rows());
    const double level = noise.delta > 0.0 ? noise.delta : set.noiseless_level;
    const CMatrix root = s.matrix();
    IndicatorGrid out;
    out.grid = grid;
    out.kind = IndicatorKind::P;
    out.values.assign(grid.size(), 0.0);
    out.flags.assign(grid.size(), 0u);
    out.alphas.assign(grid.size(), 0.0);
    detail::parallel_for(grid.size(), [&](std::size_t i) {
        const CVector b = poisson_rhs(grid.points[i], m);
        const auto mz = morozov_alpha(h, b, set.tau * level * b.norm(), set.morozov);
        if (mz.status == MorozovStatus::TargetAboveData) out.flags[i] |= kFlagMorozovTooLarge;
        if (mz.status == MorozovStatus::Unreachable) out.flags[i] |= kFlagMorozovUnreachable;
        out.alphas[i] = mz.alpha;
        const double nrm = (root * tikhonov_solve(h, b, mz.alpha)).norm();
        if (nrm > 0.0) {
            out.values[i] = 1.0 / nrm;
        } else {
            out.flags[i] |= kFlagDegenerate;
        }
    });
    detail::normalize_by_max(out.values);
    return out;
}

/// Median of ind.values over lo <= |z| < hi; NaN when no point falls in the band.
inline double band_median(const IndicatorGrid& ind, double lo, double hi)
{
    std::vector<double> v;
    for (std::size_t k = 0; k < ind.grid.size(); ++k) {
        const double r = ind.grid.points[k].norm();
        if (r >= lo && r < hi) v.push_back(ind.values[k]);
    }
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Median inside |z| < inner over median on outer_lo < |z| < outer_hi.
inline double separation_ratio(const IndicatorGrid& ind, double inner, double outer_lo, double outer_hi)
{
    return band_median(ind, 0.0, inner) / band_median(ind, std::nextafter(outer_lo, 2.0), outer_hi);
}

}  // namespace gibc

#endif  // GIBC_SAMPLING_HPP
