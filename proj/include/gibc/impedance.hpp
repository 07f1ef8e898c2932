#ifndef GIBC_IMPEDANCE_HPP
#define GIBC_IMPEDANCE_HPP

// Recovery of the impedance coefficients on a known inclusion boundary r = rho
// from Cauchy data on the outer circle. Data completion continues the harmonic
// series inward; multiplying the GIBC by conj(u) and integrating over r = rho
// gives one linear equation in (eta, gamma) per voltage/current pair:
//
//     -int conj(u) d_nu u ds = int eta |du/ds|^2 + gamma |u|^2 ds.

#include "gibc/annulus.hpp"
#include "gibc/common.hpp"
#include "gibc/fourier.hpp"

#include <Eigen/SVD>

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace gibc {

/// Voltage f and current g = d/dr u on the outer circle, as Fourier series.
struct CauchyPair {
    FourierCoefficients f;
    FourierCoefficients g;

    void validate() const
    {
        if (f.order() != g.order()) throw DomainError("CauchyPair: f and g must share a truncation order");
    }
};

/// Exact data for voltage f from the series forward solver.
inline CauchyPair synthetic_pair(const FourierCoefficients& f, const AnnulusConfig& cfg, const ImpedancePair& imp)
{
    return {f, trace_current_defective(f, cfg, imp)};
}

/// eta ~ sum_k eta_k psi1_k(theta), gamma ~ sum_k gamma_k psi2_k(theta) on r = rho.
struct BasisSet {
    using Function = std::function<cplx(double)>;
    std::vector<Function> psi1;
    std::vector<Function> psi2;

    static BasisSet constant()
    {
        BasisSet b;
        b.psi1.emplace_back([](double) { return cplx{1.0}; });
        b.psi2.emplace_back([](double) { return cplx{1.0}; });
        return b;
    }

    int unknowns() const { return static_cast<int>(psi1.size() + psi2.size()); }
};

/// a_n = (|n| f_n + g_n)/(2|n|), b_n = (|n| f_n - g_n)/(2|n|), a_0 = f_0, b_0 = g_0 for |n| <= order.
inline HarmonicCoefficients complete_data(const CauchyPair& c, int order = 10)
{
    c.validate();
    if (order < 0 || order > c.f.order()) {
        throw DomainError("complete_data: order " + std::to_string(order) + " exceeds data truncation " +
                          std::to_string(c.f.order()));
    }
    HarmonicCoefficients h(order);
    h.a[0] = c.f[0];
    h.b[0] = c.g[0];
    for (int n = -order; n <= order; ++n) {
        if (n == 0) continue;
        const double k = std::abs(static_cast<double>(n));
        h.a[n] = (k * c.f[n] + c.g[n]) / (2.0 * k);
        h.b[n] = (k * c.f[n] - c.g[n]) / (2.0 * k);
    }
    return h;
}

struct InnerTrace {
    PeriodicGridFunction u;
    PeriodicGridFunction dnu_u;  ///< -d/dr u at r = rho
    PeriodicGridFunction ds_u;   ///< (1/rho) d/dtheta u, from the series
};

inline InnerTrace trace_on_gamma0(const HarmonicCoefficients& h, double rho, int m)
{
    if (!(rho > 0.0 && rho < 1.0)) throw DomainError("trace_on_gamma0: rho must lie in (0, 1)");
    if (m < 4) throw DomainError("trace_on_gamma0: need at least 4 samples");
    std::vector<cplx> u(static_cast<std::size_t>(m)), dnu(static_cast<std::size_t>(m)), ds(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        const double t = grid_angle(j, m);
        cplx uj = inner_mode_value(h, 0, rho);
        cplx dr = h.b[0] / rho;
        cplx dt{};
        for (int n = -h.order(); n <= h.order(); ++n) {
            if (n == 0) continue;
            const double k = std::abs(static_cast<double>(n));
            const cplx e = std::polar(1.0, n * t);
            const cplx un = inner_mode_value(h, n, rho);
            uj += un * e;
            dr += k * (h.a[n] * std::pow(rho, k - 1.0) - h.b[n] * std::pow(rho, -k - 1.0)) * e;
            dt += kI * static_cast<double>(n) * un * e;
        }
        const auto sj = static_cast<std::size_t>(j);
        u[sj] = uj;
        dnu[sj] = -dr;
        ds[sj] = dt / rho;
    }
    return {PeriodicGridFunction(std::move(u)), PeriodicGridFunction(std::move(dnu)), PeriodicGridFunction(std::move(ds))};
}

struct ImpedanceSystem {
    CMatrix matrix;  ///< one row per retained pair; eta block then gamma block
    CVector rhs;
    std::vector<int> excluded;  ///< pairs dropped because u vanished on r = rho
    std::vector<std::string> warnings;
    double condition_number = 0.0;
    bool ill_posed = false;
};

inline constexpr double kIllPosedCondition = 1e12;

namespace detail {

inline double condition_number(const CMatrix& a)
{
    if (a.rows() == 0 || a.cols() == 0) return std::numeric_limits<double>::infinity();
    Eigen::JacobiSVD<CMatrix> svd(a);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    if (a.rows() < a.cols() || !(smin > 0.0)) return std::numeric_limits<double>::infinity();
    return sv(0) / smin;
}

}  // namespace detail

inline ImpedanceSystem assemble_impedance_system(const std::vector<CauchyPair>& pairs, double rho,
                                                 const BasisSet& basis, int m, int series_order = 10)
{
    if (pairs.empty()) throw DomainError("assemble_impedance_system: need at least one Cauchy pair");
    if (basis.psi1.empty() || basis.psi2.empty()) throw DomainError("assemble_impedance_system: empty basis");
    const int n1 = static_cast<int>(basis.psi1.size());
    const int cols = basis.unknowns();
    const double w = rho * kTwoPi / m;

    std::vector<Eigen::Matrix<cplx, 1, Eigen::Dynamic>> rows;
    std::vector<cplx> rhs;
    ImpedanceSystem sys;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const auto h = complete_data(pairs[p], std::min(series_order, pairs[p].f.order()));
        const auto tr = trace_on_gamma0(h, rho, m);
        bool vanishes = true;
        for (const auto& v : tr.u.values()) {
            if (v != cplx{}) vanishes = false;
        }
        if (vanishes) {
            sys.excluded.push_back(static_cast<int>(p));
            sys.warnings.push_back("pair " + std::to_string(p) + ": potential vanishes on the inclusion, row excluded");
            continue;
        }
        Eigen::Matrix<cplx, 1, Eigen::Dynamic> row = Eigen::Matrix<cplx, 1, Eigen::Dynamic>::Zero(cols);
        cplx r{};
        for (int j = 0; j < m; ++j) {
            const double t = grid_angle(j, m);
            const double us2 = std::norm(tr.ds_u[j]);
            const double u2 = std::norm(tr.u[j]);
            for (int k = 0; k < n1; ++k) row(k) += basis.psi1[static_cast<std::size_t>(k)](t) * us2 * w;
            for (int k = 0; k < cols - n1; ++k) row(n1 + k) += basis.psi2[static_cast<std::size_t>(k)](t) * u2 * w;
            r -= std::conj(tr.u[j]) * tr.dnu_u[j] * w;
        }
        rows.push_back(row);
        rhs.push_back(r);
    }
    sys.matrix.resize(static_cast<Eigen::Index>(rows.size()), cols);
    sys.rhs.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        sys.matrix.row(static_cast<Eigen::Index>(i)) = rows[i];
        sys.rhs(static_cast<Eigen::Index>(i)) = rhs[i];
    }
    sys.condition_number = detail::condition_number(sys.matrix);
    sys.ill_posed = !(sys.condition_number <= kIllPosedCondition);
    return sys;
}

struct ConstantRecovery {
    cplx eta;
    cplx gamma;
    double residual_norm = 0.0;
    double condition_number = 0.0;
    std::vector<std::string> warnings;
};

struct VaryingRecovery {
    CVector eta_coeffs;
    CVector gamma_coeffs;
    double residual_norm = 0.0;
    double condition_number = 0.0;
    std::vector<std::string> warnings;
};

namespace detail {

inline CVector least_squares(const ImpedanceSystem& sys)
{
    if (sys.ill_posed) {
        throw IllPosedError("impedance system is ill-conditioned (condition number " +
                            std::to_string(sys.condition_number) + ")");
    }
    Eigen::JacobiSVD<CMatrix> svd(sys.matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd.solve(sys.rhs);
}

inline void check_gram(const std::vector<BasisSet::Function>& fns, int m, const char* which)
{
    const auto n = static_cast<Eigen::Index>(fns.size());
    CMatrix gram = CMatrix::Zero(n, n);
    for (int j = 0; j < m; ++j) {
        const double t = grid_angle(j, m);
        for (Eigen::Index a = 0; a < n; ++a) {
            for (Eigen::Index b = 0; b < n; ++b) {
                gram(a, b) += fns[static_cast<std::size_t>(a)](t) * std::conj(fns[static_cast<std::size_t>(b)](t));
            }
        }
    }
    const double cond = condition_number(gram);
    if (!(cond <= kIllPosedCondition)) {
        throw IllPosedError(std::string("basis ") + which + " is not linearly independent on the sample grid");
    }
}

}  // namespace detail

inline VaryingRecovery recover_varying(const std::vector<CauchyPair>& pairs, double rho, const BasisSet& basis,
                                       int m = 256, int series_order = 10)
{
    detail::check_gram(basis.psi1, m, "psi1");
    detail::check_gram(basis.psi2, m, "psi2");
    if (static_cast<int>(pairs.size()) < basis.unknowns()) {
        throw DomainError("recover_varying: need at least " + std::to_string(basis.unknowns()) + " Cauchy pairs");
    }
    const auto sys = assemble_impedance_system(pairs, rho, basis, m, series_order);
    const CVector x = detail::least_squares(sys);
    const auto n1 = static_cast<Eigen::Index>(basis.psi1.size());
    VaryingRecovery out;
    out.eta_coeffs = x.head(n1);
    out.gamma_coeffs = x.tail(x.size() - n1);
    out.residual_norm = (sys.matrix * x - sys.rhs).norm();
    out.condition_number = sys.condition_number;
    out.warnings = sys.warnings;
    return out;
}

/// Constant (eta, gamma) from >= 2 pairs; least squares when more are given.
inline ConstantRecovery recover_constants(const std::vector<CauchyPair>& pairs, double rho, int m = 256,
                                          int series_order = 10)
{
    if (pairs.size() < 2) throw DomainError("recover_constants: need at least two Cauchy pairs");
    const auto sys = assemble_impedance_system(pairs, rho, BasisSet::constant(), m, series_order);
    const CVector x = detail::least_squares(sys);
    ConstantRecovery out;
    out.eta = x(0);
    out.gamma = x(1);
    out.residual_norm = (sys.matrix * x - sys.rhs).norm();
    out.condition_number = sys.condition_number;
    out.warnings = sys.warnings;
    return out;
}

/// g^delta = g + delta e^{i p theta}.
inline FourierCoefficients add_current_noise(const FourierCoefficients& g, double delta, int p)
{
    if (p < 1 || p > g.order()) {
        throw DomainError("add_current_noise: mode p = " + std::to_string(p) + " outside 1.." + std::to_string(g.order()));
    }
    FourierCoefficients out = g;
    out[p] += delta;
    return out;
}

}  // namespace gibc

#endif  // GIBC_IMPEDANCE_HPP
