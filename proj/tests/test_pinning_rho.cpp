#include <catch2/catch_amalgamated.hpp>

#include "pgl3/rho.hpp"

using namespace pgl3;

namespace {

GridSpec ball_grid(int n, double radius = 1.0, double half_box = 2.0) {
    GridSpec g;
    g.box_min = {-half_box, -half_box, -half_box};
    g.box_max = {half_box, half_box, half_box};
    g.n = {n, n, n};
    g.omega = OmegaDesc::ball({0, 0, 0}, radius);
    return g;
}

/// Slab geometry extruded along x: Omega is a box, a jumps at x = 0.
GridSpec slab_grid(int nx, int nyz = 6) {
    GridSpec g;
    g.box_min = {-1.2, -0.4, -0.4};
    g.box_max = {1.2, 0.4, 0.4};
    g.n = {nx, nyz, nyz};
    g.omega = OmegaDesc::box({-1.0, -0.3, -0.3}, {1.0, 0.3, 0.3});
    return g;
}

ScalarField slab_step(const GridSpec& g, double left_value) {
    ScalarField a(g, 1.0);
    for (int k = 0; k < g.n[2]; ++k)
        for (int j = 0; j < g.n[1]; ++j)
            for (int i = 0; i < g.n[0]; ++i)
                if (g.cell_center(i, j, k).x < 0.0) a.at(i, j, k) = left_value;
    return a;
}

/// Independent 1D two-point boundary-value oracle for the extruded slab:
/// -rho'' = rho (a - rho^2)/eps^2 on (-1,1), Neumann, solved by Newton on a
/// fine cell-centered mesh (tridiagonal Thomas solves).
std::vector<double> oracle_1d(int n, double eps, double left_value, double& h_out) {
    double L = 2.0;
    double h = L / n;
    h_out = h;
    auto aval = [&](int i) { return (-1.0 + (i + 0.5) * h) < 0.0 ? left_value : 1.0; };
    std::vector<double> rho(n);
    for (int i = 0; i < n; ++i) rho[i] = std::sqrt(aval(i));
    std::vector<double> lower(n), diag(n), upper(n), rhs(n);
    for (int it = 0; it < 80; ++it) {
        // residual
        double rn = 0.0;
        for (int i = 0; i < n; ++i) {
            double lap = 0.0;
            if (i > 0) lap += (rho[i] - rho[i - 1]) / (h * h);
            if (i < n - 1) lap -= (rho[i + 1] - rho[i]) / (h * h);
            double r = lap - rho[i] * (aval(i) - rho[i] * rho[i]) / (eps * eps);
            rhs[i] = -r;
            rn = std::max(rn, std::abs(r));
        }
        if (rn < 1e-12 / (eps * eps)) break;
        for (int i = 0; i < n; ++i) {
            double d = (3.0 * rho[i] * rho[i] - aval(i)) / (eps * eps);
            diag[i] = d;
            if (i > 0) {
                diag[i] += 1.0 / (h * h);
                lower[i] = -1.0 / (h * h);
            }
            if (i < n - 1) {
                diag[i] += 1.0 / (h * h);
                upper[i] = -1.0 / (h * h);
            }
        }
        // Thomas
        std::vector<double> c(n), dvec(n);
        c[0] = upper[0] / diag[0];
        dvec[0] = rhs[0] / diag[0];
        for (int i = 1; i < n; ++i) {
            double m = diag[i] - lower[i] * c[i - 1];
            c[i] = (i < n - 1 ? upper[i] : 0.0) / m;
            dvec[i] = (rhs[i] - lower[i] * dvec[i - 1]) / m;
        }
        std::vector<double> delta(n);
        delta[n - 1] = dvec[n - 1];
        for (int i = n - 2; i >= 0; --i) delta[i] = dvec[i] - c[i] * delta[i + 1];
        for (int i = 0; i < n; ++i) rho[i] += delta[i];
    }
    return rho;
}

}  // namespace

TEST_CASE("pinning profiles: constant, inclusion, determinism") {
    auto g = ball_grid(16);
    PinningProfile constant;
    constant.kind = PinningProfile::Kind::Constant;
    constant.floor_b = 1.0;
    constant.value = 1.0;
    auto a1 = make_pinning(constant, g);
    for (double v : a1.v) REQUIRE(v == 1.0);

    PinningProfile incl;
    incl.kind = PinningProfile::Kind::InclusionSet;
    incl.floor_b = 0.25;
    incl.value = 0.25;
    incl.centers = {{0, 0, 0}};
    incl.radii = {0.4};
    auto a2 = make_pinning(incl, g);
    auto mask = make_mask(g);
    double amin = 1.0;
    for (int k = 0; k < 16; ++k)
        for (int j = 0; j < 16; ++j)
            for (int i = 0; i < 16; ++i) {
                Vec3 p = g.cell_center(i, j, k);
                double want = norm(p) < 0.4 ? 0.25 : 1.0;
                REQUIRE(a2.at(i, j, k) == want);
                amin = std::min(amin, a2.at(i, j, k));
            }
    REQUIRE(amin == 0.25);

    PinningProfile cb;
    cb.kind = PinningProfile::Kind::RandomCheckerboard;
    cb.floor_b = 0.5;
    cb.value = 0.5;
    cb.period = 0.3;
    cb.seed = 7;
    auto c1 = make_pinning(cb, g);
    auto c2 = make_pinning(cb, g);
    REQUIRE(c1.v == c2.v);

    PinningProfile bad = incl;
    bad.floor_b = 1.5;
    REQUIRE_THROWS_AS(make_pinning(bad, g), ContractError);

    PinningProfile escaping = incl;
    escaping.boundary_margin = 0.2;
    escaping.centers = {{0.75, 0, 0}};
    escaping.radii = {0.2};
    REQUIRE_THROWS_AS(make_pinning(escaping, g), ContractError);
}

TEST_CASE("solve_rho: constant coefficients give exact constant solutions") {
    auto g = ball_grid(12);
    auto mask = make_mask(g);

    ScalarField a1(g, 1.0);
    auto s1 = solve_rho(a1, 0.1, mask);
    for (int k = 0; k < 12; ++k)
        for (int j = 0; j < 12; ++j)
            for (int i = 0; i < 12; ++i)
                if (mask.cell_at(i, j, k)) REQUIRE(s1.rho.at(i, j, k) == 1.0);
    REQUIRE(s1.energy == 0.0);
    REQUIRE(s1.newton_iterations == 0);

    ScalarField a2(g, 0.25);
    auto s2 = solve_rho(a2, 0.1, mask);
    for (int k = 0; k < 12; ++k)
        for (int j = 0; j < 12; ++j)
            for (int i = 0; i < 12; ++i)
                if (mask.cell_at(i, j, k))
                    REQUIRE(s2.rho.at(i, j, k) == Catch::Approx(0.5).margin(1e-10));
}

TEST_CASE("solve_rho: bounds, minimality, and the guard") {
    auto g = ball_grid(16);
    auto mask = make_mask(g);
    PinningProfile incl;
    incl.kind = PinningProfile::Kind::InclusionSet;
    incl.floor_b = 0.36;
    incl.value = 0.36;
    incl.centers = {{0.2, 0, 0}};
    incl.radii = {0.35};
    auto a = make_pinning(incl, g);
    auto sol = solve_rho(a, 0.08, mask);

    for (int k = 0; k < 16; ++k)
        for (int j = 0; j < 16; ++j)
            for (int i = 0; i < 16; ++i)
                if (mask.cell_at(i, j, k)) {
                    double r2 = sol.rho.at(i, j, k) * sol.rho.at(i, j, k);
                    REQUIRE(r2 >= 0.36 - 1e-9);
                    REQUIRE(r2 <= 1.0 + 1e-9);
                }

    // minimality witness: the smoothed sqrt(a) candidate cannot beat the solve
    std::vector<double> cand(a.v.size());
    for (std::size_t c = 0; c < cand.size(); ++c) cand[c] = std::sqrt(a.v[c]);
    REQUIRE(sol.energy <= density_energy(cand, a, mask, 0.08) + 1e-12);

    REQUIRE_THROWS_AS(solve_rho(a, 0.01, mask), ContractError);  // resolution guard
}

TEST_CASE("slab-step rho matches the fine 1D oracle within 1e-3") {
    double eps = 0.05;
    auto g = slab_grid(288, 4);
    REQUIRE(eps >= 0.25 * g.max_h());
    auto mask = make_mask(g);
    auto a = slab_step(g, 0.25);
    auto sol = solve_rho(a, eps, mask);

    double h1;
    auto oracle = oracle_1d(2880, eps, 0.25, h1);

    // compare along the center line: map x-cell centers into the oracle mesh
    int jmid = g.n[1] / 2, kmid = g.n[2] / 2;
    double worst = 0.0;
    for (int i = 0; i < g.n[0]; ++i) {
        if (!mask.cell_at(i, jmid, kmid)) continue;
        double x = g.cell_center(i, jmid, kmid).x;
        double f = (x + 1.0) / h1 - 0.5;
        int i0 = std::max(0, std::min(2878, int(std::floor(f))));
        double t = std::min(1.0, std::max(0.0, f - i0));
        double ref = (1 - t) * oracle[i0] + t * oracle[i0 + 1];
        worst = std::max(worst, std::abs(sol.rho.at(i, jmid, kmid) - ref));
    }
    REQUIRE(worst < 1e-3);
}

TEST_CASE("Lassoued-Mironescu decoupling is exact for 20 random complex u") {
    auto g = ball_grid(12);
    auto mask = make_mask(g);
    PinningProfile incl;
    incl.kind = PinningProfile::Kind::InclusionSet;
    incl.floor_b = 0.25;
    incl.value = 0.25;
    incl.centers = {{0, 0, 0}};
    incl.radii = {0.45};
    auto a = make_pinning(incl, g);
    double eps = 0.09;
    auto sol = solve_rho(a, eps, mask, 1e-13);
    const auto& rho = sol.rho;

    Rng rng(2024);
    const Vec3 h = g.spacing();
    const double vol = g.cell_volume();
    for (int trial = 0; trial < 20; ++trial) {
        ComplexField u(g);
        for (auto& z : u.v) z = cplx(rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2));

        // E_eps(rho u) by direct quadrature
        std::vector<cplx> prod(u.v.size());
        for (std::size_t c = 0; c < u.v.size(); ++c) prod[c] = rho.v[c] * u.v[c];
        double kin = 0.0;
        for (int d = 0; d < 3; ++d) {
            auto fd = g.face_dims(d);
            for (int k = 0; k < fd[2]; ++k)
                for (int j = 0; j < fd[1]; ++j)
                    for (int i = 0; i < fd[0]; ++i) {
                        if (!mask.face[d][idx3(fd, i, j, k)]) continue;
                        int im = i - (d == 0), jm = j - (d == 1), km = k - (d == 2);
                        kin += std::norm(prod[idx3(g.n, i, j, k)] - prod[idx3(g.n, im, jm, km)]) /
                               (h[d] * h[d]);
                    }
        }
        double pot = 0.0;
        for (std::size_t c = 0; c < u.v.size(); ++c)
            if (mask.cell[c]) {
                double dd = a.v[c] - std::norm(prod[c]);
                pot += dd * dd / (2.0 * eps * eps);
            }
        double lhs = 0.5 * (kin + pot) * vol - sol.energy;

        // decoupled form: (1/2) int rho0 rho1 |grad u|^2 + (rho^4 / 2eps^2)(1-|u|^2)^2
        double kin_w = 0.0;
        for (int d = 0; d < 3; ++d) {
            auto fd = g.face_dims(d);
            for (int k = 0; k < fd[2]; ++k)
                for (int j = 0; j < fd[1]; ++j)
                    for (int i = 0; i < fd[0]; ++i) {
                        if (!mask.face[d][idx3(fd, i, j, k)]) continue;
                        int im = i - (d == 0), jm = j - (d == 1), km = k - (d == 2);
                        std::size_t cp = idx3(g.n, i, j, k), cm = idx3(g.n, im, jm, km);
                        kin_w += rho.v[cp] * rho.v[cm] * std::norm(u.v[cp] - u.v[cm]) /
                                 (h[d] * h[d]);
                    }
        }
        double pot_w = 0.0;
        for (std::size_t c = 0; c < u.v.size(); ++c)
            if (mask.cell[c]) {
                double r2 = rho.v[c] * rho.v[c];
                double s = std::norm(u.v[c]);
                pot_w += r2 * r2 * (1 - s) * (1 - s) / (2.0 * eps * eps);
            }
        double rhs = 0.5 * (kin_w + pot_w) * vol;
        REQUIRE(lhs == Catch::Approx(rhs).epsilon(1e-8));
    }
}

TEST_CASE("exponential locking: deviation collapses when eps shrinks") {
    double radius = 1.0;
    PinningProfile incl;
    incl.kind = PinningProfile::Kind::InclusionSet;
    incl.floor_b = 0.25;
    incl.value = 0.25;
    incl.centers = {{0.55, 0, 0}};
    incl.radii = {0.25};

    // probe ball far from the inclusion, in the a == 1 region
    Vec3 probe{-0.45, 0, 0};
    double R = 0.5;

    auto g = ball_grid(32, radius, 1.6);
    auto mask = make_mask(g);
    auto a = make_pinning(incl, g);

    auto dev = [&](double eps) {
        auto sol = solve_rho(a, eps, mask);
        auto rep = check_exponential_locking(sol, a, mask, probe, R);
        REQUIRE(rep.precondition_ok);
        return rep.sup_deviation;
    };
    double d1 = dev(0.08), d2 = dev(0.04);
    REQUIRE(d2 < d1 / 5.0);

    // degenerate probe is flagged
    auto sol = solve_rho(a, 0.08, mask);
    auto repz = check_exponential_locking(sol, a, mask, probe, 0.0);
    REQUIRE_FALSE(repz.precondition_ok);
    // probe overlapping the jump is flagged as well
    auto repj = check_exponential_locking(sol, a, mask, {0.55, 0, 0}, 0.4);
    REQUIRE_FALSE(repj.precondition_ok);

    // a == 1 globally: zero deviation
    ScalarField ones(g, 1.0);
    auto s1 = solve_rho(ones, 0.08, mask);
    auto rep1 = check_exponential_locking(s1, ones, mask, {0, 0, 0}, 0.6);
    REQUIRE(rep1.precondition_ok);
    REQUIRE(rep1.sup_deviation == 0.0);
}
