#ifndef GIBC_OPERATOR_HPP
#define GIBC_OPERATOR_HPP

// Collocation matrix of the current-gap operator Lambda_0 - Lambda, its
// multiplicative noise model, and the Hermitian imaginary part with its
// positive square root.

#include "gibc/annulus.hpp"
#include "gibc/common.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace gibc {

struct NoiseSpec {
    double delta = 0.0;
    std::uint64_t seed = 0;

    void validate() const
    {
        if (!(delta >= 0.0) || !std::isfinite(delta)) throw DomainError("NoiseSpec: delta must be >= 0");
    }
};

struct GapMatrix {
    CMatrix entries;
    AnnulusConfig config;
    ImpedancePair impedance;
    NoiseSpec noise;  ///< delta = 0 for the noiseless assembly

    int size() const { return static_cast<int>(entries.rows()); }
};

/// entries(i, j) = K(theta_i, theta_j) * 2*pi/M on the M = collocation_points grid.
/// The kernel is tabulated once per index difference, so the result is exactly
/// circulant and symmetric.
inline GapMatrix assemble_gap_matrix(const AnnulusConfig& cfg, const ImpedancePair& imp)
{
    cfg.validate();
    const int m = cfg.collocation_points;
    const double w = kTwoPi / m;
    std::vector<cplx> table(static_cast<std::size_t>(m));
    for (int d = 0; d <= m / 2; ++d) {
        const cplx k = gap_kernel(grid_angle(d, m), 0.0, cfg, imp) * w;
        table[static_cast<std::size_t>(d)] = k;
        table[static_cast<std::size_t>((m - d) % m)] = k;
    }
    GapMatrix a;
    a.config = cfg;
    a.impedance = imp;
    a.entries.resize(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) a.entries(i, j) = table[static_cast<std::size_t>(((i - j) % m + m) % m)];
    }
    return a;
}

namespace detail {

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
inline double unit_uniform(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

}  // namespace detail

/// M x M matrix with i.i.d. uniform [-1, 1] entries (std::mt19937_64, row-major draw
/// order), scaled to unit spectral norm.
inline RMatrix noise_matrix(int m, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    RMatrix e(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) e(i, j) = 2.0 * detail::unit_uniform(gen) - 1.0;
    }
    Eigen::JacobiSVD<RMatrix> svd(e);
    const double norm = svd.singularValues()(0);
    if (!(norm > 0.0)) throw Error("noise_matrix: degenerate draw");
    return e / norm;
}

/// A^delta_ij = A_ij (1 + delta E_ij) with E from noise_matrix(M, seed).
inline GapMatrix apply_noise(const GapMatrix& a, const NoiseSpec& noise)
{
    noise.validate();
    GapMatrix out = a;
    out.noise = noise;
    if (noise.delta == 0.0) return out;
    const RMatrix e = noise_matrix(a.size(), noise.seed);
    for (int i = 0; i < a.size(); ++i) {
        for (int j = 0; j < a.size(); ++j) out.entries(i, j) = a.entries(i, j) * (1.0 + noise.delta * e(i, j));
    }
    return out;
}

inline double spectral_norm(const CMatrix& a)
{
    Eigen::JacobiSVD<CMatrix> svd(a);
    return svd.singularValues()(0);
}

/// (A - A^*)/(2i), symmetrized so the result is Hermitian to the last bit.
inline CMatrix hermitian_imag(const CMatrix& a)
{
    if (a.rows() != a.cols()) throw DomainError("hermitian_imag: matrix must be square");
    CMatrix h = (a - a.adjoint()) / (2.0 * kI);
    CMatrix sym = 0.5 * (h + h.adjoint());
    for (Eigen::Index i = 0; i < sym.rows(); ++i) sym(i, i) = sym(i, i).real();
    return sym;
}

/// Imaginary part of the gap operator with respect to the boundary pairing
/// <f, g> = sum f_j conj(g_j): Im<f, A f> = f^* H f with H = (A^* - A)/(2i).
/// This is the operator that is positive when Im(eta), Im(gamma) > 0; note it is
/// the negative of hermitian_imag(A).
inline CMatrix pairing_imag(const CMatrix& a) { return hermitian_imag(a.adjoint()); }

struct HermitianEigen {
    CMatrix vectors;  ///< columns are orthonormal eigenvectors
    RVector values;   ///< ascending
};

namespace detail {

/// True when every row is the previous one shifted right by one, bit for bit.
inline bool is_circulant(const CMatrix& h)
{
    const Eigen::Index m = h.rows();
    for (Eigen::Index i = 1; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            if (h(i, j) != h(0, (j - i + m) % m)) return false;
        }
    }
    return true;
}

/// Hermitian circulant: eigenvectors are the discrete Fourier vectors, exactly.
/// A general eigensolver mixes the tiny high-mode eigenvalues with roundoff of
/// size eps * ||H||, which breaks the rotational symmetry of the noiseless data.
inline HermitianEigen circulant_eigen(const CMatrix& h)
{
    const int m = static_cast<int>(h.rows());
    std::vector<std::pair<double, int>> modes;
    modes.reserve(static_cast<std::size_t>(m));
    for (int n = -(m - 1) / 2; n <= m / 2; ++n) {
        cplx lambda{};
        for (int d = 0; d < m; ++d) lambda += h(0, d) * std::polar(1.0, grid_angle(((n * d) % m + m) % m, m));
        modes.emplace_back(lambda.real(), n);
    }
    std::stable_sort(modes.begin(), modes.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    HermitianEigen out{CMatrix(m, m), RVector(m)};
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    for (int k = 0; k < m; ++k) {
        out.values(k) = modes[static_cast<std::size_t>(k)].first;
        const int n = modes[static_cast<std::size_t>(k)].second;
        for (int j = 0; j < m; ++j) out.vectors(j, k) = std::polar(scale, grid_angle(((n * j) % m + m) % m, m));
    }
    return out;
}

}  // namespace detail

/// Ascending eigenpairs. Exactly circulant input (the noiseless gap operator)
/// takes the Fourier basis; everything else goes to the dense solver.
inline HermitianEigen hermitian_eigen(const CMatrix& h)
{
    if (h.rows() != h.cols()) throw DomainError("hermitian_eigen: matrix must be square");
    if (h.rows() > 0 && detail::is_circulant(h)) return detail::circulant_eigen(h);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    if (es.info() != Eigen::Success) throw Error("hermitian_eigen: eigensolver did not converge");
    return {es.eigenvectors(), es.eigenvalues()};
}

/// H^{1/2} = V Sigma^{1/2} V^* with negative eigenvalues clamped to zero.
struct PsdSqrt {
    CMatrix vectors;
    RVector root_values;  ///< sqrt(max(lambda_k, 0)), ascending
    int clamped = 0;      ///< eigenvalues that were negative

    CMatrix matrix() const { return vectors * root_values.cast<cplx>().asDiagonal() * vectors.adjoint(); }
};

inline PsdSqrt psd_sqrt(const HermitianEigen& eig)
{
    PsdSqrt s;
    s.vectors = eig.vectors;
    s.root_values.resize(eig.values.size());
    for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
        const double v = eig.values(k);
        if (v < 0.0) ++s.clamped;
        s.root_values(k) = std::sqrt(std::max(v, 0.0));
    }
    return s;
}

inline PsdSqrt psd_sqrt(const CMatrix& h) { return psd_sqrt(hermitian_eigen(h)); }

}  // namespace gibc

#endif  // GIBC_OPERATOR_HPP
