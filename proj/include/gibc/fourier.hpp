#ifndef GIBC_FOURIER_HPP
#define GIBC_FOURIER_HPP

// Sampled 2*pi-periodic boundary functions and their truncated Fourier series.
//
// Samples live on the left-endpoint grid theta_j = 2*pi*j/M, j = 0..M-1, and
// every boundary quadrature in the library is the matching Riemann sum.

#include "gibc/common.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace gibc {

class PeriodicGridFunction {
public:
    explicit PeriodicGridFunction(std::vector<cplx> values) : values_(std::move(values))
    {
        if (values_.size() < 4) {
            throw DomainError("PeriodicGridFunction: need at least 4 samples, got " +
                              std::to_string(values_.size()));
        }
        for (const auto& v : values_) {
            if (!is_finite(v)) throw DomainError("PeriodicGridFunction: non-finite sample");
        }
    }

    /// Samples fn(theta_j) on an M-point grid.
    static PeriodicGridFunction sample(int m, const std::function<cplx(double)>& fn)
    {
        if (m < 4) throw DomainError("PeriodicGridFunction::sample: M must be >= 4");
        std::vector<cplx> v(static_cast<std::size_t>(m));
        for (int j = 0; j < m; ++j) v[static_cast<std::size_t>(j)] = fn(grid_angle(j, m));
        return PeriodicGridFunction(std::move(v));
    }

    int size() const { return static_cast<int>(values_.size()); }
    double angle(int j) const { return grid_angle(j, size()); }
    cplx operator[](int j) const { return values_[static_cast<std::size_t>(j)]; }
    std::span<const cplx> values() const { return values_; }

private:
    std::vector<cplx> values_;
};

/// Coefficients c_n for |n| <= N of sum_n c_n e^{i n theta}.
class FourierCoefficients {
public:
    explicit FourierCoefficients(int order) : order_(order)
    {
        if (order < 0) throw DomainError("FourierCoefficients: negative order");
        coeffs_.assign(static_cast<std::size_t>(2 * order + 1), cplx{});
    }

    /// Single mode e^{i n theta} scaled by `value`, truncated at `order`.
    static FourierCoefficients mode(int order, int n, cplx value = 1.0)
    {
        FourierCoefficients c(order);
        c[n] = value;
        return c;
    }

    int order() const { return order_; }

    cplx& operator[](int n) { return coeffs_[index(n)]; }
    cplx operator[](int n) const { return coeffs_[index(n)]; }

    /// c_n, or zero when |n| exceeds the truncation order.
    cplx coeff(int n) const { return (n < -order_ || n > order_) ? cplx{} : coeffs_[static_cast<std::size_t>(n + order_)]; }

    bool all_finite() const
    {
        for (const auto& c : coeffs_) {
            if (!is_finite(c)) return false;
        }
        return true;
    }

    /// Same function, zero-padded or truncated to a different order.
    FourierCoefficients with_order(int order) const
    {
        FourierCoefficients out(order);
        for (int n = -order; n <= order; ++n) out[n] = coeff(n);
        return out;
    }

private:
    std::size_t index(int n) const
    {
        if (n < -order_ || n > order_) {
            throw DomainError("FourierCoefficients: mode " + std::to_string(n) + " outside |n| <= " +
                              std::to_string(order_));
        }
        return static_cast<std::size_t>(n + order_);
    }

    int order_;
    std::vector<cplx> coeffs_;
};

/// c_n = (1/M) sum_j f(theta_j) e^{-i n theta_j}, |n| <= order. Requires order <= M/2 - 1.
inline FourierCoefficients analyze(const PeriodicGridFunction& f, int order)
{
    const int m = f.size();
    if (order < 0 || order > m / 2 - 1) {
        throw DomainError("analyze: order " + std::to_string(order) + " too large for " + std::to_string(m) +
                          " samples (need order <= M/2 - 1)");
    }
    FourierCoefficients c(order);
    for (int n = -order; n <= order; ++n) {
        cplx acc{};
        for (int j = 0; j < m; ++j) acc += f[j] * std::polar(1.0, -static_cast<double>(n) * f.angle(j));
        c[n] = acc / static_cast<double>(m);
    }
    return c;
}

inline cplx synthesize_at(const FourierCoefficients& c, double theta)
{
    cplx acc{};
    for (int n = -c.order(); n <= c.order(); ++n) acc += c[n] * std::polar(1.0, static_cast<double>(n) * theta);
    return acc;
}

inline std::vector<cplx> synthesize(const FourierCoefficients& c, std::span<const double> angles)
{
    std::vector<cplx> out;
    out.reserve(angles.size());
    for (double t : angles) out.push_back(synthesize_at(c, t));
    return out;
}

/// The series sampled back onto an M-point grid.
inline PeriodicGridFunction synthesize_grid(const FourierCoefficients& c, int m)
{
    return PeriodicGridFunction::sample(m, [&](double t) { return synthesize_at(c, t); });
}

/// Discrete L2 norm on a circle of the given radius: sqrt(radius * (2*pi/M) * sum |f_j|^2).
inline double boundary_l2_norm(const PeriodicGridFunction& f, double radius)
{
    if (!(radius > 0.0)) throw DomainError("boundary_l2_norm: radius must be positive");
    double acc = 0.0;
    for (const auto& v : f.values()) acc += std::norm(v);
    return std::sqrt(radius * (kTwoPi / f.size()) * acc);
}

/// Riemann-sum pairing sum_j f_j conj(g_j) * radius * 2*pi/M.
inline cplx boundary_pairing(const PeriodicGridFunction& f, const PeriodicGridFunction& g, double radius = 1.0)
{
    if (f.size() != g.size()) throw DomainError("boundary_pairing: grid sizes differ");
    cplx acc{};
    for (int j = 0; j < f.size(); ++j) acc += f[j] * std::conj(g[j]);
    return acc * radius * (kTwoPi / f.size());
}

}  // namespace gibc

#endif  // GIBC_FOURIER_HPP
