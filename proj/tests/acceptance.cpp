// Acceptance gate: runs each criterion at its stated tolerance and prints one
// PASS/FAIL line per criterion with the measured values and wall time.
//
// Exit status is 0 only when the set of failing criteria equals the set given
// by --expect-fail (empty by default), so a known failure stays visible in the
// output while any regression or unexpected pass still fails the run.

#include "gibc/contour.hpp"
#include "gibc/fd_oracle.hpp"
#include "gibc/impedance.hpp"
#include "gibc/operator.hpp"
#include "gibc/sampling.hpp"

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

using namespace gibc;

namespace {

const ImpedancePair kBaseline{{5.0, 2.0}, {10.0, 1.0}};
const ImpedancePair kComparison{{1.0, 1.0}, {1.0, 1.0}};

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...)
{
    char buf[1024];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

FourierCoefficients random_unit_f(std::mt19937_64& gen, int order)
{
    std::normal_distribution<double> nd;
    FourierCoefficients c(order);
    double total = 0.0;
    for (int n = -order; n <= order; ++n) {
        c[n] = {nd(gen), nd(gen)};
        total += std::norm(c[n]);
    }
    for (int n = -order; n <= order; ++n) c[n] /= std::sqrt(total);
    return c;
}

std::vector<double> ranks(const std::vector<double>& v)
{
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b)
{
    const auto ra = ranks(a);
    const auto rb = ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

struct Pipeline {
    HermitianEigen h;
    PsdSqrt s;
    NoiseSpec noise;
};

Pipeline pipeline(double rho, const ImpedancePair& imp, const NoiseSpec& noise)
{
    const auto a = apply_noise(assemble_gap_matrix(AnnulusConfig{rho, 20, 64}, imp), noise);
    Pipeline p;
    p.h = hermitian_eigen(pairing_imag(a.entries));
    p.s = psd_sqrt(p.h);
    p.noise = noise;
    return p;
}

// 1
Outcome noisy_recovery()
{
    struct Row {
        double delta;
        int p;
        cplx eta, gamma;
    };
    const Row rows[] = {{0.01, 1, {5.0485, 1.9044}, {10.2582, 0.2951}}, {0.04, 4, {5.4441, 1.8730}, {8.5754, 0.1658}}};
    const AnnulusConfig cfg{0.5, 20, 64};
    Outcome o{true, ""};
    for (const auto& row : rows) {
        std::vector<CauchyPair> pairs;
        for (int n : {1, 2}) {
            auto pair = synthetic_pair(FourierCoefficients::mode(10, n), cfg, kBaseline);
            pair.g = add_current_noise(pair.g, row.delta, row.p);
            pairs.push_back(pair);
        }
        const auto r = recover_constants(pairs, 0.5, 256, 10);
        const double err = std::max({std::abs(r.eta.real() - row.eta.real()), std::abs(r.eta.imag() - row.eta.imag()),
                                     std::abs(r.gamma.real() - row.gamma.real()),
                                     std::abs(r.gamma.imag() - row.gamma.imag())});
        // each component within 2% of its own reference value
        bool ok = true;
        for (auto [got, ref] : {std::pair{r.eta.real(), row.eta.real()}, std::pair{r.eta.imag(), row.eta.imag()},
                                std::pair{r.gamma.real(), row.gamma.real()},
                                std::pair{r.gamma.imag(), row.gamma.imag()}}) {
            ok = ok && std::abs(got - ref) <= 0.02 * std::abs(ref);
        }
        o.pass = o.pass && ok;
        o.detail += fmt("(d=%.2f,p=%d) eta=%.4f%+.4fi gamma=%.4f%+.4fi max|err|=%.3g; ", row.delta, row.p,
                        r.eta.real(), r.eta.imag(), r.gamma.real(), r.gamma.imag(), err);
    }
    return o;
}

// 2
Outcome exact_recovery()
{
    Outcome o{true, ""};
    double worst = 0.0;
    for (const auto& imp : {kBaseline, kComparison, ImpedancePair{{2.0, 0.5}, {3.0, 2.0}}}) {
        const AnnulusConfig cfg{0.5, 20, 64};
        const std::vector<CauchyPair> pairs{synthetic_pair(FourierCoefficients::mode(10, 1), cfg, imp),
                                            synthetic_pair(FourierCoefficients::mode(10, 2), cfg, imp)};
        const auto r = recover_constants(pairs, 0.5);
        worst = std::max({worst, std::abs(r.eta - imp.eta) / std::abs(imp.eta),
                          std::abs(r.gamma - imp.gamma) / std::abs(imp.gamma)});
    }
    o.pass = worst < 1e-6;
    o.detail = fmt("max relative error %.3g over 3 parameter sets", worst);
    return o;
}

// 3
Outcome energy_identity()
{
    std::mt19937_64 gen(20240301);
    double worst = 0.0;
    int trials = 0;
    for (double rho : {0.25, 0.5}) {
        const AnnulusConfig cfg{rho, 40, 128};
        for (int t = 0; t < 20; ++t) {
            const auto e = energy_identity_residual(random_unit_f(gen, 8), cfg, kBaseline);
            worst = std::max(worst, std::abs(e.lhs - e.rhs) / std::max(std::abs(e.lhs), 1e-30));
            ++trials;
        }
    }
    return {worst < 1e-6, fmt("max relative residual %.3g over %d trials", worst, trials)};
}

// 4
Outcome psd()
{
    Outcome o{true, ""};
    for (const auto& imp : {kBaseline, kComparison}) {
        const auto a = assemble_gap_matrix(AnnulusConfig{0.5, 20, 64}, imp);
        const auto e = hermitian_eigen(pairing_imag(a.entries));
        const double lo = e.values(0);
        const double hi = e.values(e.values.size() - 1);
        o.pass = o.pass && lo >= -1e-10 * hi;
        o.detail += fmt("eta=%g%+gi: min/max = %.3g/%.3g; ", imp.eta.real(), imp.eta.imag(), lo, hi);
    }
    return o;
}

// 5
Outcome eigen_action()
{
    const AnnulusConfig cfg{0.5, 20, 64};
    const auto a = assemble_gap_matrix(cfg, kBaseline);
    double worst = 0.0;
    for (int n = -20; n <= 20; ++n) {
        if (n == 0) continue;
        CVector v(64);
        for (int j = 0; j < 64; ++j) v(j) = std::polar(1.0, n * grid_angle(j, 64));
        const cplx lambda = 2.0 * std::abs(n) * sigma_n(n, cfg, kBaseline) / (sigma_n(n, cfg, kBaseline) + 1.0);
        worst = std::max(worst, (a.entries * v - lambda * v).norm() / v.norm());
    }
    return {worst < 1e-10, fmt("max ||A v_n - lambda_n v_n|| / ||v_n|| = %.3g", worst)};
}

// 6
Outcome fd_convergence()
{
    const AnnulusConfig cfg{0.5, 20, 64};
    FourierCoefficients f(4);
    f[1] = 0.5;
    f[-1] = 0.5;
    f[2] = 0.25;
    const auto g = trace_current_defective(f, cfg, kBaseline);
    std::vector<double> err;
    for (int level = 0; level < 4; ++level) {
        const int radial = 16 * (1 << level) + 1;
        const int angular = 16 * (1 << level);
        const auto sol = fd_solve(synthesize_grid(f, angular), cfg, kBaseline, radial);
        double e = 0.0;
        for (int j = 0; j < angular; ++j) e = std::max(e, std::abs(sol.current()[j] - synthesize_at(g, grid_angle(j, angular))));
        err.push_back(e);
    }
    Outcome o{true, "ratios"};
    for (std::size_t k = 1; k < err.size(); ++k) {
        const double ratio = err[k - 1] / err[k];
        o.pass = o.pass && ratio >= 3.5 && ratio <= 4.5;
        o.detail += fmt(" %.3f", ratio);
    }
    o.detail += fmt(" (errors %.3g -> %.3g)", err.front(), err.back());
    return o;
}

// 7
Outcome separation()
{
    const auto grid = make_lattice_grid(101, 0.1);
    Outcome o{true, ""};
    for (auto [rho, inner] : {std::pair{0.5, 0.4}, std::pair{0.25, 0.2}}) {
        int good = 0;
        double lo = 1e300;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const auto p = pipeline(rho, kBaseline, NoiseSpec{0.02, seed});
            const auto w = indicator_W(grid, p.s, 1e-8);
            const double ratio = separation_ratio(w, inner, 0.65, 0.9);
            lo = std::min(lo, ratio);
            good += ratio >= 3.0;
        }
        o.pass = o.pass && good >= 9;
        o.detail += fmt("rho=%.2f: %d/10 seeds >= 3 (min ratio %.3g); ", rho, good, lo);
    }
    return o;
}

// 8
// Pairs related by the square symmetries of the lattice are also symmetries of
// the 64-point collocation grid; the remaining equal-radius pairs are not, and
// for them the sampled Poisson kernel aliases mode n onto n - M. Both classes are
// reported; the criterion is judged over all pairs.
Outcome symmetry()
{
    const auto grid = make_lattice_grid(101, 0.1);
    const auto p = pipeline(0.5, kBaseline, NoiseSpec{0.0, 0});
    const auto w = indicator_W(grid, p.s, 1e-8);
    std::vector<std::size_t> idx(grid.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return grid.points[a].norm() < grid.points[b].norm(); });
    auto grid_symmetric = [](Point2 a, Point2 b) {
        const double ax = std::abs(a.x), ay = std::abs(a.y), bx = std::abs(b.x), by = std::abs(b.y);
        return (std::abs(ax - bx) < 1e-12 && std::abs(ay - by) < 1e-12) ||
               (std::abs(ax - by) < 1e-12 && std::abs(ay - bx) < 1e-12);
    };
    double worst_sym = 0.0, worst_other = 0.0, other_radius = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const Point2 a = grid.points[idx[i]];
        for (std::size_t j = i + 1; j < idx.size() && grid.points[idx[j]].norm() - a.norm() < 1e-12; ++j) {
            const double d = std::abs(w.values[idx[i]] - w.values[idx[j]]);
            ++pairs;
            if (grid_symmetric(a, grid.points[idx[j]])) {
                worst_sym = std::max(worst_sym, d);
            } else if (d > worst_other) {
                worst_other = d;
                other_radius = a.norm();
            }
        }
    }
    const double worst = std::max(worst_sym, worst_other);
    return {worst < 1e-8, fmt("max |W(z1) - W(z2)| = %.3g over %zu equal-radius pairs (grid-symmetric %.3g; "
                              "other %.3g, worst at |z| = %.3f)",
                              worst, pairs, worst_sym, worst_other, other_radius)};
}

// 9
Outcome indicator_comparison()
{
    const auto grid = make_lattice_grid(101, 0.1);
    const auto p = pipeline(0.5, kComparison, NoiseSpec{0.02, 1});
    const auto w = indicator_W(grid, p.s, 1e-8);
    const auto pi = indicator_P(grid, p.h, p.s, p.noise);
    const double rs = spearman(w.values, pi.values);
    return {rs > 0.9, fmt("Spearman(W, P) = %.4f over %zu points", rs, grid.size())};
}

// 10
Outcome completion()
{
    std::mt19937_64 gen(77);
    const AnnulusConfig cfg{0.5, 20, 64};
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
        const auto f = random_unit_f(gen, 10);
        const auto fwd = solve_defective(f, cfg, kBaseline);
        const auto h = complete_data(synthetic_pair(f, cfg, kBaseline), 10);
        for (int n = -10; n <= 10; ++n) {
            worst = std::max({worst, std::abs(h.a[n] - fwd.a[n]), std::abs(h.b[n] - fwd.b[n])});
        }
    }
    return {worst < 1e-10, fmt("max |coefficient error| = %.3g", worst)};
}

// 11
Outcome injectivity()
{
    const AnnulusConfig cfg{0.5, 20, 64};
    const auto a = assemble_gap_matrix(cfg, kBaseline).entries;
    const double dg = spectral_norm(a - assemble_gap_matrix(cfg, ImpedancePair{kBaseline.eta, kBaseline.gamma + 1.0}).entries);
    const double de = spectral_norm(a - assemble_gap_matrix(cfg, ImpedancePair{kBaseline.eta + 1.0, kBaseline.gamma}).entries);
    return {dg > 1e-6 && de > 1e-6, fmt("||dA|| for gamma+1: %.3g, eta+1: %.3g", dg, de)};
}

}  // namespace

int main(int argc, char** argv)
{
    std::set<int> expected_fail;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--expect-fail") == 0 && i + 1 < argc) {
            expected_fail.insert(std::atoi(argv[++i]));
        } else {
            std::fprintf(stderr, "usage: %s [--expect-fail ID]...\n", argv[0]);
            return 2;
        }
    }

    const std::vector<Criterion> criteria{
        {1, "noisy impedance recovery", 5.0, noisy_recovery},
        {2, "exact-data impedance recovery", 5.0, exact_recovery},
        {3, "energy identity", 10.0, energy_identity},
        {4, "PSD imaginary part", 1.0, psd},
        {5, "circulant eigen-action", 1.0, eigen_action},
        {6, "FD oracle second-order convergence", 30.0, fd_convergence},
        {7, "indicator separation", 60.0, separation},
        {8, "rotational symmetry", 30.0, symmetry},
        {9, "W/P rank agreement", 60.0, indicator_comparison},
        {10, "data-completion roundtrip", 1.0, completion},
        {11, "DtN injectivity probe", 1.0, injectivity},
    };

    std::set<int> failed;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.limit_s;
        const bool pass = o.pass && in_time;
        if (!pass) failed.insert(c.id);
        std::printf("%s [%2d] %-36s %s | %.2fs (limit %.0fs%s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), secs, c.limit_s, in_time ? "" : ", exceeded");
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failed.size(), criteria.size());
    if (failed != expected_fail) {
        if (!expected_fail.empty()) std::printf("failing set differs from --expect-fail\n");
        return 1;
    }
    return 0;
}
