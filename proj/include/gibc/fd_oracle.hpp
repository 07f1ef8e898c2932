#ifndef GIBC_FD_ORACLE_HPP
#define GIBC_FD_ORACLE_HPP

// Second-order finite-difference solver for the defective problem on the
// polar grid [rho, 1] x [0, 2*pi). It shares nothing with the series solver
// beyond the boundary-condition conventions in annulus.hpp and serves as an
// independent check of it.

#include "gibc/annulus.hpp"
#include "gibc/common.hpp"
#include "gibc/fourier.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <string>
#include <vector>

namespace gibc {

struct FdSolution {
    int radial_points = 0;   ///< nodes r_i = rho + i h, i = 0..R-1
    int angular_points = 0;  ///< nodes theta_j = 2 pi j / M
    double rho = 0.0;
    double h = 0.0;
    std::vector<cplx> values;  ///< row-major [i][j]
    std::vector<cplx> outer_current;

    double radius(int i) const { return rho + i * h; }
    cplx value(int i, int j) const { return values[static_cast<std::size_t>(i * angular_points + j)]; }

    PeriodicGridFunction inner_trace() const
    {
        return PeriodicGridFunction(std::vector<cplx>(values.begin(), values.begin() + angular_points));
    }
    PeriodicGridFunction current() const { return PeriodicGridFunction(outer_current); }
};

/// Solves u_rr + u_r/r + u_thetatheta/r^2 = 0 with u(1, .) = f and the GIBC at r = rho.
/// d/dr is discretized one-sided (second order) on both circles.
inline FdSolution fd_solve(const PeriodicGridFunction& f, const AnnulusConfig& cfg, const ImpedancePair& imp,
                           int radial_points)
{
    if (radial_points < 8) throw DomainError("fd_solve: need at least 8 radial points");
    if (!(cfg.rho > 0.0 && cfg.rho < 1.0)) throw DomainError("fd_solve: rho must lie in (0, 1)");

    const int nr = radial_points;
    const int m = f.size();
    const double rho = cfg.rho;
    const double h = (1.0 - rho) / (nr - 1);
    const double dt = kTwoPi / m;
    const double dt2 = dt * dt;
    auto idx = [m](int i, int j) { return i * m + ((j % m) + m) % m; };

    using Triplet = Eigen::Triplet<cplx>;
    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(nr) * m * 5);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(nr * m);

    for (int j = 0; j < m; ++j) {
        // GIBC row: -(-3u0 + 4u1 - u2)/(2h) - (eta/rho^2)(u_{j+1} - 2u_j + u_{j-1})/dt^2 + gamma u0 = 0
        const int row = idx(0, j);
        const cplx tang = imp.eta / (rho * rho * dt2);
        trip.emplace_back(row, idx(0, j), 3.0 / (2.0 * h) + 2.0 * tang + imp.gamma);
        trip.emplace_back(row, idx(1, j), -4.0 / (2.0 * h));
        trip.emplace_back(row, idx(2, j), 1.0 / (2.0 * h));
        trip.emplace_back(row, idx(0, j + 1), -tang);
        trip.emplace_back(row, idx(0, j - 1), -tang);
    }
    for (int i = 1; i < nr - 1; ++i) {
        const double r = rho + i * h;
        const double up = 1.0 / (h * h) + 1.0 / (2.0 * h * r);
        const double down = 1.0 / (h * h) - 1.0 / (2.0 * h * r);
        const double ang = 1.0 / (r * r * dt2);
        for (int j = 0; j < m; ++j) {
            const int row = idx(i, j);
            trip.emplace_back(row, idx(i + 1, j), up);
            trip.emplace_back(row, idx(i - 1, j), down);
            trip.emplace_back(row, idx(i, j), -2.0 / (h * h) - 2.0 * ang);
            trip.emplace_back(row, idx(i, j + 1), ang);
            trip.emplace_back(row, idx(i, j - 1), ang);
        }
    }
    for (int j = 0; j < m; ++j) {
        trip.emplace_back(idx(nr - 1, j), idx(nr - 1, j), 1.0);
        rhs[idx(nr - 1, j)] = f[j];
    }

    Eigen::SparseMatrix<cplx> mat(nr * m, nr * m);
    mat.setFromTriplets(trip.begin(), trip.end());
    mat.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
    lu.analyzePattern(mat);
    lu.factorize(mat);
    if (lu.info() != Eigen::Success) {
        throw OracleFailure("fd_solve: factorization failed (" + lu.lastErrorMessage() + ")");
    }
    Eigen::VectorXcd u = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !u.allFinite()) throw OracleFailure("fd_solve: solve failed");

    FdSolution out;
    out.radial_points = nr;
    out.angular_points = m;
    out.rho = rho;
    out.h = h;
    out.values.assign(u.data(), u.data() + u.size());
    out.outer_current.resize(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        out.outer_current[static_cast<std::size_t>(j)] =
            (3.0 * u[idx(nr - 1, j)] - 4.0 * u[idx(nr - 2, j)] + u[idx(nr - 3, j)]) / (2.0 * h);
    }
    return out;
}

}  // namespace gibc

#endif  // GIBC_FD_ORACLE_HPP
