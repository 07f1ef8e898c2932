#ifndef GIBC_ANNULUS_HPP
#define GIBC_ANNULUS_HPP

// Series solution of the electrostatic problem on the unit disk with a
// concentric circular inclusion of radius rho carrying a generalized
// impedance boundary condition (GIBC).
//
// Sign and measure conventions (used everywhere in the library):
//   * The normal nu is outward to the annulus D1 = {rho < r < 1}. On the outer
//     circle that is +d/dr; on the inclusion boundary r = rho it points toward
//     the origin, so d/dnu = -d/dr there.
//   * GIBC on r = rho with constant coefficients:
//         (-d/dr - (eta/rho^2) d^2/dtheta^2 + gamma) u(rho, theta) = 0.
//   * Arc length: ds = rho dtheta and d/ds = (1/rho) d/dtheta on r = rho;
//     ds = dtheta on r = 1.
//   * The DtN map returns d/dr u(1, theta).
//   * Boundary pairing <f, g> = integral of f * conj(g) ds.

#include "gibc/common.hpp"
#include "gibc/fourier.hpp"

#include <cstdlib>
#include <string>
#include <vector>

namespace gibc {

/// Constant GIBC coefficients. The physical model needs Re > 0 and Im >= 0 for both;
/// the closed-form helpers below accept any value so that limits can be studied.
struct ImpedancePair {
    cplx eta{};
    cplx gamma{};

    void validate() const
    {
        if (!is_finite(eta) || !is_finite(gamma)) throw DomainError("ImpedancePair: non-finite coefficient");
        if (!(eta.real() > 0.0) || !(gamma.real() > 0.0)) {
            throw DomainError("ImpedancePair: Re(eta) and Re(gamma) must be positive");
        }
        if (eta.imag() < 0.0 || gamma.imag() < 0.0) {
            throw DomainError("ImpedancePair: Im(eta) and Im(gamma) must be nonnegative");
        }
    }

    /// The sampling method needs strictly absorbing coefficients.
    void require_strictly_absorbing() const
    {
        validate();
        if (!(eta.imag() > 0.0) || !(gamma.imag() > 0.0)) {
            throw DomainError("ImpedancePair: sampling requires Im(eta) > 0 and Im(gamma) > 0");
        }
    }
};

struct AnnulusConfig {
    double rho = 0.5;
    int kernel_truncation = 20;
    int collocation_points = 64;

    void validate() const
    {
        if (!(rho > 0.0 && rho < 1.0)) throw DomainError("AnnulusConfig: rho must lie in (0, 1)");
        if (kernel_truncation < 1) throw DomainError("AnnulusConfig: kernel truncation must be >= 1");
        if (collocation_points <= 2 * kernel_truncation) {
            throw DomainError("AnnulusConfig: need collocation_points > 2 * kernel_truncation");
        }
    }
};

/// u(r, theta) = a_0 + b_0 ln r + sum_{n != 0} (a_n r^{|n|} + b_n r^{-|n|}) e^{i n theta}.
struct HarmonicCoefficients {
    FourierCoefficients a;
    FourierCoefficients b;
    /// Smallest radius where the series is meaningful; 0 for a field harmonic in the whole disk.
    double inner_radius = 0.0;

    explicit HarmonicCoefficients(int order, double inner = 0.0) : a(order), b(order), inner_radius(inner) {}

    int order() const { return a.order(); }

    bool has_singular_part() const
    {
        for (int n = -order(); n <= order(); ++n) {
            if (b[n] != cplx{}) return true;
        }
        return false;
    }
};

inline cplx sigma_n(int n, const AnnulusConfig& cfg, const ImpedancePair& imp)
{
    if (n == 0) throw DomainError("sigma_n: n must be nonzero (use sigma_0)");
    const double k = std::abs(static_cast<double>(n));
    const double rho = cfg.rho;
    const cplx num = k * rho - k * k * imp.eta - imp.gamma * rho * rho;
    const cplx den = k * rho + k * k * imp.eta + imp.gamma * rho * rho;
    if (std::abs(den) == 0.0) {
        throw SingularParameterError("sigma_n: |n| rho + |n|^2 eta + gamma rho^2 vanishes for n = " +
                                     std::to_string(n));
    }
    return std::pow(rho, 2.0 * k) * (num / den);
}

inline cplx sigma_0(const AnnulusConfig& cfg, const ImpedancePair& imp)
{
    const cplx gr = imp.gamma * cfg.rho;
    const cplx den = gr * std::log(cfg.rho) - 1.0;
    if (std::abs(den) == 0.0) throw SingularParameterError("sigma_0: gamma rho ln(rho) = 1");
    return gr / den;
}

namespace detail {

inline cplx checked_resonance(cplx s, int n)
{
    if (std::abs(s + 1.0) == 0.0) {
        throw ResonanceError("sigma_n = -1 at n = " + std::to_string(n) + "; series solution does not exist");
    }
    return s;
}

}  // namespace detail

/// Coefficients of the defective potential for Dirichlet data f on r = 1.
inline HarmonicCoefficients solve_defective(const FourierCoefficients& f, const AnnulusConfig& cfg,
                                            const ImpedancePair& imp)
{
    HarmonicCoefficients h(f.order(), cfg.rho);
    h.a[0] = f[0];
    h.b[0] = -sigma_0(cfg, imp) * f[0];
    for (int n = -f.order(); n <= f.order(); ++n) {
        if (n == 0) continue;
        const cplx s = detail::checked_resonance(sigma_n(n, cfg, imp), n);
        h.a[n] = f[n] / (s + 1.0);
        h.b[n] = s * f[n] / (s + 1.0);
    }
    return h;
}

/// Harmonic extension of f into the disk without inclusion.
inline HarmonicCoefficients solve_healthy(const FourierCoefficients& f)
{
    HarmonicCoefficients h(f.order());
    h.a = f;
    return h;
}

inline FourierCoefficients trace_current_defective(const FourierCoefficients& f, const AnnulusConfig& cfg,
                                                   const ImpedancePair& imp)
{
    FourierCoefficients g(f.order());
    g[0] = -sigma_0(cfg, imp) * f[0];
    for (int n = -f.order(); n <= f.order(); ++n) {
        if (n == 0) continue;
        const cplx s = detail::checked_resonance(sigma_n(n, cfg, imp), n);
        g[n] = std::abs(static_cast<double>(n)) * f[n] * (1.0 - s) / (s + 1.0);
    }
    return g;
}

inline FourierCoefficients trace_current_healthy(const FourierCoefficients& f)
{
    FourierCoefficients g(f.order());
    for (int n = -f.order(); n <= f.order(); ++n) g[n] = std::abs(static_cast<double>(n)) * f[n];
    return g;
}

/// Coefficients of (Lambda_0 - Lambda) f, untruncated.
inline FourierCoefficients current_gap(const FourierCoefficients& f, const AnnulusConfig& cfg,
                                       const ImpedancePair& imp)
{
    const auto healthy = trace_current_healthy(f);
    const auto defective = trace_current_defective(f, cfg, imp);
    FourierCoefficients g(f.order());
    for (int n = -f.order(); n <= f.order(); ++n) g[n] = healthy[n] - defective[n];
    return g;
}

/// Eigenvalue of the truncated gap operator on e^{i n theta}: sigma_0 for n = 0,
/// 2|n| sigma_n/(sigma_n + 1) for 1 <= |n| <= N, and 0 beyond the truncation.
inline cplx gap_eigenvalue(int n, const AnnulusConfig& cfg, const ImpedancePair& imp)
{
    if (n == 0) return sigma_0(cfg, imp);
    if (std::abs(n) > cfg.kernel_truncation) return {};
    const cplx s = detail::checked_resonance(sigma_n(n, cfg, imp), n);
    return 2.0 * std::abs(static_cast<double>(n)) * s / (s + 1.0);
}

namespace detail {

inline void check_radius(const HarmonicCoefficients& h, double r)
{
    if (!(r <= 1.0) || r < 0.0) throw DomainError("evaluate_potential: r outside [0, 1]");
    if (h.has_singular_part()) {
        if (!(r > 0.0) || r < h.inner_radius) {
            throw DomainError("evaluate_potential: r = " + std::to_string(r) + " outside the annulus");
        }
    }
}

}  // namespace detail

inline cplx evaluate_potential(const HarmonicCoefficients& h, double r, double theta)
{
    detail::check_radius(h, r);
    const bool singular = h.has_singular_part();
    cplx u = h.a[0];
    if (singular) u += h.b[0] * std::log(r);
    for (int n = -h.order(); n <= h.order(); ++n) {
        if (n == 0) continue;
        const double k = std::abs(static_cast<double>(n));
        cplx radial = h.a[n] * std::pow(r, k);
        if (singular) radial += h.b[n] * std::pow(r, -k);
        u += radial * std::polar(1.0, n * theta);
    }
    return u;
}

/// d/dr of the series at (r, theta).
inline cplx evaluate_radial_derivative(const HarmonicCoefficients& h, double r, double theta)
{
    detail::check_radius(h, r);
    const bool singular = h.has_singular_part();
    cplx du = singular ? h.b[0] / r : cplx{};
    for (int n = -h.order(); n <= h.order(); ++n) {
        if (n == 0) continue;
        const double k = std::abs(static_cast<double>(n));
        cplx radial = k * h.a[n] * std::pow(r, k - 1.0);
        if (singular) radial -= k * h.b[n] * std::pow(r, -k - 1.0);
        du += radial * std::polar(1.0, n * theta);
    }
    return du;
}

/// Truncated kernel K(theta, phi) of Lambda_0 - Lambda; a function of theta - phi only.
inline cplx gap_kernel(double theta, double phi, const AnnulusConfig& cfg, const ImpedancePair& imp)
{
    const double d = theta - phi;
    cplx k = sigma_0(cfg, imp) / kTwoPi;
    for (int n = 1; n <= cfg.kernel_truncation; ++n) {
        const cplx s = detail::checked_resonance(sigma_n(n, cfg, imp), n);
        // modes n and -n share sigma, so e^{ind} + e^{-ind} = 2 cos(nd)
        k += (1.0 / kPi) * static_cast<double>(n) * s / (s + 1.0) * 2.0 * std::cos(n * d);
    }
    return k;
}

// Closed-form energies of the series (orthogonality of e^{i n theta}). For
// u_n(r) = a r^k + b r^-k the cross terms of |u_r|^2 + |u_theta/r|^2 cancel,
// leaving 2k^2 (|a|^2 r^{2k-2} + |b|^2 r^{-2k-2}).

/// Integral of |grad u0|^2 over the unit disk for the harmonic extension of f.
inline double dirichlet_energy_disk(const FourierCoefficients& f)
{
    double e = 0.0;
    for (int n = -f.order(); n <= f.order(); ++n) e += std::abs(static_cast<double>(n)) * std::norm(f[n]);
    return kTwoPi * e;
}

/// Integral of |grad u|^2 over rho < r < 1.
inline double dirichlet_energy_annulus(const HarmonicCoefficients& h, double rho)
{
    double e = -std::norm(h.b[0]) * std::log(rho);
    for (int n = -h.order(); n <= h.order(); ++n) {
        if (n == 0) continue;
        const double k = std::abs(static_cast<double>(n));
        const double r2k = std::pow(rho, 2.0 * k);
        e += k * (std::norm(h.a[n]) * (1.0 - r2k) + std::norm(h.b[n]) * (1.0 / r2k - 1.0));
    }
    return kTwoPi * e;
}

/// Mode value u_n(rho) of the series on the inclusion boundary.
inline cplx inner_mode_value(const HarmonicCoefficients& h, int n, double rho)
{
    if (n == 0) return h.a[0] + h.b[0] * std::log(rho);
    const double k = std::abs(static_cast<double>(n));
    return h.a[n] * std::pow(rho, k) + h.b[n] * std::pow(rho, -k);
}

/// Integral over r = rho of |du/ds|^2 ds.
inline double tangential_energy_inner(const HarmonicCoefficients& h, double rho)
{
    double e = 0.0;
    for (int n = -h.order(); n <= h.order(); ++n) e += static_cast<double>(n) * n * std::norm(inner_mode_value(h, n, rho));
    return kTwoPi * e / rho;
}

/// Integral over r = rho of |u|^2 ds.
inline double mass_inner(const HarmonicCoefficients& h, double rho)
{
    double e = 0.0;
    for (int n = -h.order(); n <= h.order(); ++n) e += std::norm(inner_mode_value(h, n, rho));
    return kTwoPi * rho * e;
}

struct EnergyIdentity {
    cplx lhs;  ///< discrete pairing <f, (Lambda_0 - Lambda) f> on the collocation grid
    cplx rhs;  ///< closed-form energies assembled mode by mode
};

/// Both sides of <f, (L0 - L) f> = int_D |grad u0|^2 - int_D1 |grad u|^2
///                                 - int_{r=rho} conj(eta)|du/ds|^2 + conj(gamma)|u|^2 ds.
inline EnergyIdentity energy_identity_residual(const FourierCoefficients& f, const AnnulusConfig& cfg,
                                               const ImpedancePair& imp)
{
    const int m = cfg.collocation_points;
    if (m <= 2 * f.order()) throw DomainError("energy_identity_residual: need collocation_points > 2 * order(f)");
    const auto fg = synthesize_grid(f, m);
    const auto gap = synthesize_grid(current_gap(f, cfg, imp), m);
    EnergyIdentity out;
    out.lhs = boundary_pairing(fg, gap);

    const auto h = solve_defective(f, cfg, imp);
    out.rhs = dirichlet_energy_disk(f) - dirichlet_energy_annulus(h, cfg.rho) -
              std::conj(imp.eta) * tangential_energy_inner(h, cfg.rho) -
              std::conj(imp.gamma) * mass_inner(h, cfg.rho);
    return out;
}

}  // namespace gibc

#endif  // GIBC_ANNULUS_HPP
