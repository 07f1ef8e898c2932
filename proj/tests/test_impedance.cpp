#include <catch2/catch_amalgamated.hpp>

#include "gibc/impedance.hpp"

#include <random>

using namespace gibc;

namespace {

const ImpedancePair kBaseline{{5.0, 2.0}, {10.0, 1.0}};
const AnnulusConfig kCfg{0.5, 20, 64};

FourierCoefficients modes(int order, std::initializer_list<std::pair<int, cplx>> entries)
{
    FourierCoefficients c(order);
    for (const auto& [n, v] : entries) c[n] += v;
    return c;
}

std::vector<CauchyPair> mode_pairs(const ImpedancePair& imp, double rho = 0.5)
{
    const AnnulusConfig cfg{rho, 20, 64};
    return {synthetic_pair(FourierCoefficients::mode(10, 1), cfg, imp),
            synthetic_pair(FourierCoefficients::mode(10, 2), cfg, imp)};
}

}  // namespace

TEST_CASE("complete_data", "[impedance]")
{
    SECTION("healthy data has no singular part")
    {
        FourierCoefficients f(5);
        for (int n = -5; n <= 5; ++n) f[n] = cplx{0.1 * n, 1.0 / (1 + n * n)};
        const auto h = complete_data({f, trace_current_healthy(f)}, 5);
        for (int n = -5; n <= 5; ++n) {
            if (n != 0) CHECK(std::abs(h.b[n]) < 1e-15);
        }
        CHECK(h.b[0] == cplx{});
    }
    SECTION("formula")
    {
        const auto h = complete_data({FourierCoefficients::mode(3, 1), FourierCoefficients(3)}, 3);
        CHECK(h.a[1] == cplx{0.5});
        CHECK(h.b[1] == cplx{0.5});
    }
    SECTION("roundtrip against the forward solver")
    {
        std::mt19937_64 gen(8);
        std::normal_distribution<double> nd;
        FourierCoefficients f(10);
        for (int n = -10; n <= 10; ++n) f[n] = {nd(gen), nd(gen)};
        const auto fwd = solve_defective(f, kCfg, kBaseline);
        const auto h = complete_data(synthetic_pair(f, kCfg, kBaseline), 10);
        for (int n = -10; n <= 10; ++n) {
            CHECK(std::abs(h.a[n] - fwd.a[n]) < 1e-10);
            CHECK(std::abs(h.b[n] - fwd.b[n]) < 1e-10);
        }
    }
    SECTION("order beyond the data")
    {
        CHECK_THROWS_AS(complete_data({FourierCoefficients(3), FourierCoefficients(3)}, 4), DomainError);
        CHECK_THROWS_AS(complete_data({FourierCoefficients(3), FourierCoefficients(2)}, 2), DomainError);
    }
}

TEST_CASE("trace_on_gamma0", "[impedance]")
{
    SECTION("constant potential")
    {
        HarmonicCoefficients h(2, 0.5);
        h.a[0] = 1.0;
        const auto tr = trace_on_gamma0(h, 0.5, 16);
        for (int j = 0; j < 16; ++j) {
            CHECK(tr.u[j] == cplx{1.0});
            CHECK(tr.dnu_u[j] == cplx{});
            CHECK(tr.ds_u[j] == cplx{});
        }
    }
    SECTION("logarithmic term")
    {
        HarmonicCoefficients h(1, 0.5);
        h.b[0] = 1.0;
        const auto tr = trace_on_gamma0(h, 0.5, 8);
        for (int j = 0; j < 8; ++j) CHECK(std::abs(tr.dnu_u[j] + 2.0) < 1e-15);
    }
    SECTION("tangential derivative against centered differences")
    {
        const double rho = 0.5;
        const auto h = solve_defective(FourierCoefficients::mode(3, 1), kCfg, kBaseline);
        const int m = 64;
        const auto tr = trace_on_gamma0(h, rho, m);
        const double modulus = std::abs((h.a[1] * rho + h.b[1] / rho) / rho);
        const double step = 1e-4;
        for (int j = 0; j < m; ++j) {
            const double t = grid_angle(j, m);
            const cplx fd = (evaluate_potential(h, rho, t + step) - evaluate_potential(h, rho, t - step)) / (2.0 * step * rho);
            CHECK(std::abs(tr.ds_u[j] - fd) < 1e-8);
            CHECK(std::abs(std::abs(tr.ds_u[j]) - modulus) < 1e-12);
        }
    }
    SECTION("radius out of range")
    {
        CHECK_THROWS_AS(trace_on_gamma0(HarmonicCoefficients(1, 0.5), 1.0, 8), DomainError);
    }
}

TEST_CASE("impedance system rows", "[impedance]")
{
    const auto pairs = mode_pairs(kBaseline);
    SECTION("energy relation holds on exact data")
    {
        const auto sys = assemble_impedance_system(pairs, 0.5, BasisSet::constant(), 256);
        for (Eigen::Index i = 0; i < sys.matrix.rows(); ++i) {
            const cplx model = kBaseline.eta * sys.matrix(i, 0) + kBaseline.gamma * sys.matrix(i, 1);
            CHECK(std::abs(sys.rhs(i) - model) / std::abs(sys.rhs(i)) < 1e-8);
        }
    }
    SECTION("zero pair is excluded with a warning")
    {
        auto with_zero = pairs;
        with_zero.push_back({FourierCoefficients(10), FourierCoefficients(10)});
        const auto sys = assemble_impedance_system(with_zero, 0.5, BasisSet::constant(), 64);
        CHECK(sys.matrix.rows() == 2);
        REQUIRE(sys.excluded.size() == 1);
        CHECK(sys.excluded[0] == 2);
        CHECK(sys.warnings.size() == 1);
    }
    SECTION("sesquilinear scaling")
    {
        const auto base = assemble_impedance_system(pairs, 0.5, BasisSet::constant(), 64);
        auto doubled = pairs;
        for (auto& p : doubled) {
            for (int n = -10; n <= 10; ++n) {
                p.f[n] *= 2.0;
                p.g[n] *= 2.0;
            }
        }
        const auto sys = assemble_impedance_system(doubled, 0.5, BasisSet::constant(), 64);
        CHECK((sys.matrix - 4.0 * base.matrix).norm() <= 1e-13 * sys.matrix.norm());
        CHECK((sys.rhs - 4.0 * base.rhs).norm() <= 1e-13 * sys.rhs.norm());
        const auto r1 = recover_constants(pairs, 0.5, 64);
        const auto r2 = recover_constants(doubled, 0.5, 64);
        CHECK(std::abs(r1.eta - r2.eta) < 1e-10);
        CHECK(std::abs(r1.gamma - r2.gamma) < 1e-10);
    }
}

TEST_CASE("recover_constants", "[impedance]")
{
    SECTION("property: exact data recovers the synthesis parameters")
    {
        for (const auto& imp : {kBaseline, ImpedancePair{{1.0, 1.0}, {1.0, 1.0}}, ImpedancePair{{0.3, 0.05}, {2.0, 4.0}}}) {
            for (double rho : {0.3, 0.5, 0.7}) {
                for (auto [n1, n2] : {std::pair{1, 2}, std::pair{1, 3}, std::pair{2, 5}}) {
                    const AnnulusConfig cfg{rho, 20, 64};
                    const std::vector<CauchyPair> pairs{synthetic_pair(FourierCoefficients::mode(10, n1), cfg, imp),
                                                        synthetic_pair(FourierCoefficients::mode(10, n2), cfg, imp)};
                    const auto r = recover_constants(pairs, rho);
                    CHECK(std::abs(r.eta - imp.eta) <= 1e-6 * std::abs(imp.eta));
                    CHECK(std::abs(r.gamma - imp.gamma) <= 1e-6 * std::abs(imp.gamma));
                    CHECK(r.residual_norm < 1e-8);
                }
            }
        }
    }
    SECTION("too few pairs")
    {
        CHECK_THROWS_AS(recover_constants({mode_pairs(kBaseline)[0]}, 0.5), DomainError);
    }
    SECTION("identical pairs are ill-posed")
    {
        const auto p = mode_pairs(kBaseline)[0];
        CHECK_THROWS_AS(recover_constants({p, p}, 0.5), IllPosedError);
    }
}

TEST_CASE("recover_varying", "[impedance]")
{
    const AnnulusConfig cfg{0.5, 20, 64};
    std::vector<CauchyPair> pairs;
    for (const auto& f : {modes(10, {{1, 1.0}}), modes(10, {{2, 1.0}}), modes(10, {{1, 1.0}, {2, 1.0}}),
                          modes(10, {{1, 1.0}, {2, kI}}), modes(10, {{0, 1.0}, {1, 1.0}}),
                          modes(10, {{-1, 1.0}, {3, 0.5}})}) {
        pairs.push_back(synthetic_pair(f, cfg, kBaseline));
    }

    SECTION("constant basis reduces to recover_constants")
    {
        const auto v = recover_varying(pairs, 0.5, BasisSet::constant());
        const auto c = recover_constants(pairs, 0.5);
        CHECK(std::abs(v.eta_coeffs(0) - c.eta) < 1e-12);
        CHECK(std::abs(v.gamma_coeffs(0) - c.gamma) < 1e-12);
    }
    SECTION("cosine coefficient vanishes for constant coefficients")
    {
        BasisSet basis = BasisSet::constant();
        basis.psi1.emplace_back([](double t) { return cplx{std::cos(t)}; });
        basis.psi2.emplace_back([](double t) { return cplx{std::cos(t)}; });
        const auto v = recover_varying(pairs, 0.5, basis);
        CHECK(std::abs(v.eta_coeffs(1)) < 1e-6);
        CHECK(std::abs(v.gamma_coeffs(1)) < 1e-6);
        CHECK(std::abs(v.eta_coeffs(0) - kBaseline.eta) < 1e-6);
        CHECK(std::abs(v.gamma_coeffs(0) - kBaseline.gamma) < 1e-6);

        const auto sys = assemble_impedance_system(pairs, 0.5, basis, 256);
        CVector x(4);
        x << v.eta_coeffs, v.gamma_coeffs;
        CHECK(v.residual_norm == Catch::Approx((sys.matrix * x - sys.rhs).norm()).margin(1e-14));
    }
    SECTION("linearly dependent basis rejected")
    {
        BasisSet basis = BasisSet::constant();
        basis.psi1.emplace_back([](double) { return cplx{2.0}; });
        CHECK_THROWS_AS(recover_varying(pairs, 0.5, basis), IllPosedError);
    }
    SECTION("too few pairs")
    {
        BasisSet basis = BasisSet::constant();
        basis.psi1.emplace_back([](double t) { return cplx{std::cos(t)}; });
        CHECK_THROWS_AS(recover_varying({pairs[0], pairs[1]}, 0.5, basis), DomainError);
    }
}

TEST_CASE("add_current_noise", "[impedance]")
{
    const auto g = trace_current_defective(FourierCoefficients::mode(10, 1), kCfg, kBaseline);
    const auto same = add_current_noise(g, 0.0, 1);
    for (int n = -10; n <= 10; ++n) CHECK(same[n] == g[n]);

    const auto noisy = add_current_noise(g, 0.01, 1);
    for (int n = -10; n <= 10; ++n) {
        if (n == 1) {
            CHECK(noisy[n] == g[n] + 0.01);
        } else {
            CHECK(noisy[n] == g[n]);
        }
    }

    FourierCoefficients diff(10);
    const auto noisy4 = add_current_noise(g, 0.04, 4);
    for (int n = -10; n <= 10; ++n) diff[n] = noisy4[n] - g[n];
    CHECK(boundary_l2_norm(synthesize_grid(diff, 64), 1.0) == Catch::Approx(0.04 * std::sqrt(kTwoPi)).epsilon(1e-12));

    CHECK_THROWS_AS(add_current_noise(g, 0.01, 0), DomainError);
    CHECK_THROWS_AS(add_current_noise(g, 0.01, 11), DomainError);
}
