#pragma once

#include "pgl3/elliptic.hpp"
#include "pgl3/pinning.hpp"

namespace pgl3 {

struct DensitySolution {
    ScalarField rho;
    double epsilon = 0.0;
    double residual_norm = 0.0;  // max-abs discrete PDE residual
    double energy = 0.0;         // E_eps(rho)
    int newton_iterations = 0;
};

/// E_eps(u) = (1/2) sum_Omega |grad u|^2 + (1/(2 eps^2)) (a - u^2)^2 for real u.
inline double density_energy(const std::vector<double>& rho, const ScalarField& a,
                             const OmegaMask& mask, double eps) {
    const GridSpec& g = mask.grid;
    const Vec3 h = g.spacing();
    const double vol = g.cell_volume();
    double kin = 0.0;
    for (int d = 0; d < 3; ++d) {
        auto fd = g.face_dims(d);
        for (int k = 0; k < fd[2]; ++k)
            for (int j = 0; j < fd[1]; ++j)
                for (int i = 0; i < fd[0]; ++i) {
                    if (!mask.face[d][idx3(fd, i, j, k)]) continue;
                    int im = i - (d == 0), jm = j - (d == 1), km = k - (d == 2);
                    double diff = rho[idx3(g.n, i, j, k)] - rho[idx3(g.n, im, jm, km)];
                    kin += diff * diff / (h[d] * h[d]);
                }
    }
    double pot = 0.0;
    const auto n = g.n;
    for (int k = 0; k < n[2]; ++k)
        for (int j = 0; j < n[1]; ++j)
            for (int i = 0; i < n[0]; ++i) {
                std::size_t c = idx3(n, i, j, k);
                if (!mask.cell[c]) continue;
                double d = a.v[c] - rho[c] * rho[c];
                pot += d * d / (2.0 * eps * eps);
            }
    return 0.5 * (kin + pot) * vol;
}

/// Strong residual of the discrete Euler-Lagrange system:
/// r = -L_N rho - rho (a - rho^2)/eps^2, with L_N the Neumann mask Laplacian.
inline void density_residual(const std::vector<double>& rho, const ScalarField& a,
                             const OmegaMask& mask, double eps, const MaskLaplacian& lap,
                             std::vector<double>& out) {
    lap.apply(rho, out);  // = -div grad rho
    const auto n = mask.grid.n;
    const double inv_eps2 = 1.0 / (eps * eps);
    for (int k = 0; k < n[2]; ++k)
        for (int j = 0; j < n[1]; ++j)
            for (int i = 0; i < n[0]; ++i) {
                std::size_t c = idx3(n, i, j, k);
                if (!mask.cell[c]) {
                    out[c] = 0.0;
                    continue;
                }
                out[c] -= rho[c] * (a.v[c] - rho[c] * rho[c]) * inv_eps2;
            }
}

/// Damped Newton with energy-decrease line search for the positive minimizer of
/// E_eps under Neumann boundary conditions on the Omega mask.
inline DensitySolution solve_rho(const ScalarField& a, double eps, const OmegaMask& mask,
                                 double tol_scale = 1e-11, int max_newton = 60) {
    require_same_grid(a.grid, mask.grid, "solve_rho");
    const GridSpec& g = mask.grid;
    if (!(eps > 0.0)) throw ContractError("solve_rho: eps must be positive");
    if (eps < 0.25 * g.max_h())
        throw ContractError("solve_rho: eps below the h/4 resolution guard");
    double amin = 1e300, amax = -1e300;
    const auto n = g.n;
    for (int k = 0; k < n[2]; ++k)
        for (int j = 0; j < n[1]; ++j)
            for (int i = 0; i < n[0]; ++i)
                if (mask.cell_at(i, j, k)) {
                    amin = std::min(amin, a.at(i, j, k));
                    amax = std::max(amax, a.at(i, j, k));
                }
    if (!(amin > 0.0 && amax <= 1.0 + 1e-14))
        throw ContractError("solve_rho: pinning values outside (0,1]");

    MaskLaplacian lap{mask, VectorField(g, 1.0)};

    // rho0 = sqrt(a) smoothed by one Jacobi sweep of the mask Laplacian
    std::vector<double> rho(g.num_cells(), 1.0);
    for (std::size_t c = 0; c < rho.size(); ++c) rho[c] = std::sqrt(std::max(a.v[c], amin));
    {
        std::vector<double> lr(rho.size());
        lap.apply(rho, lr);
        auto diag = lap.jacobi_diag();
        std::vector<double> sm = rho;
        for (std::size_t c = 0; c < rho.size(); ++c) sm[c] = rho[c] - lr[c] / diag[c];
        rho = sm;
    }

    const double tol = tol_scale / (eps * eps);
    const double inv_eps2 = 1.0 / (eps * eps);
    std::vector<double> res(rho.size()), delta, newton_rhs(rho.size());
    DensitySolution out;
    double energy = density_energy(rho, a, mask, eps);

    for (int it = 0; it < max_newton; ++it) {
        density_residual(rho, a, mask, eps, lap, res);
        double rn = max_abs(res);
        out.newton_iterations = it;
        if (rn <= tol) {
            out.residual_norm = rn;
            break;
        }

        // Jacobian: L_N + diag((3 rho^2 - a)/eps^2); shift keeps it SPD.
        std::vector<double> shift(rho.size(), 0.0);
        double worst = 0.0;
        for (std::size_t c = 0; c < rho.size(); ++c) {
            if (!mask.cell[c]) continue;
            shift[c] = (3.0 * rho[c] * rho[c] - a.v[c]) * inv_eps2;
            worst = std::min(worst, shift[c]);
        }
        double lift = worst < 0.0 ? -worst + 0.1 * inv_eps2 : 0.0;
        auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
            lap.apply(x, y);
            for (std::size_t c = 0; c < x.size(); ++c) {
                if (!mask.cell[c]) {
                    y[c] = x[c];  // identity off-mask keeps the system nonsingular
                    continue;
                }
                y[c] += (shift[c] + lift) * x[c];
            }
        };
        auto diag = lap.jacobi_diag();
        for (std::size_t c = 0; c < diag.size(); ++c)
            diag[c] += mask.cell[c] ? std::abs(shift[c]) + lift : 0.0;
        for (auto& r : res) r = -r;
        delta.assign(rho.size(), 0.0);
        auto cg = cg_solve(rho.size(), apply, res, delta, 1e-10, 4000, &diag);
        if (!cg.converged) throw SolverError("solve_rho: inner CG stagnation");

        // energy-decrease backtracking
        double t = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            std::vector<double> trial = rho;
            for (std::size_t c = 0; c < rho.size(); ++c)
                if (mask.cell[c]) trial[c] = rho[c] + t * delta[c];
            double e_trial = density_energy(trial, a, mask, eps);
            if (e_trial <= energy + 1e-14 * (1.0 + std::abs(energy))) {
                rho = std::move(trial);
                energy = e_trial;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) throw SolverError("solve_rho: line search failed to decrease energy");
    }

    density_residual(rho, a, mask, eps, lap, res);
    out.residual_norm = max_abs(res);
    if (out.residual_norm > tol)
        throw SolverError("solve_rho: Newton did not reach tolerance");

    // uniform bounds b <= rho^2 <= 1: safety check, never silent projection
    double sqrt_amin = std::sqrt(amin);
    for (std::size_t c = 0; c < rho.size(); ++c) {
        if (!mask.cell[c]) {
            rho[c] = 1.0;  // off-mask filler, never used by Omega-restricted sums
            continue;
        }
        if (rho[c] < sqrt_amin - 1e-8 || rho[c] > 1.0 + 1e-8)
            throw SolverError("solve_rho: maximum-principle bounds violated");
        rho[c] = std::min(1.0, std::max(sqrt_amin, rho[c]));
    }

    out.rho = ScalarField(g);
    out.rho.v = rho;
    out.epsilon = eps;
    out.energy = density_energy(rho, a, mask, eps);
    density_residual(rho, a, mask, eps, lap, res);
    out.residual_norm = max_abs(res);
    return out;
}

struct LockingReport {
    Vec3 probe_center;
    double probe_radius = 0.0;
    double sup_deviation = 0.0;  // sup over the probed ball of |sqrt(a) - rho|
    bool precondition_ok = false;
};

/// Deviation of rho from sqrt(a) on a ball where a is constant. The sup is
/// taken over the half-radius ball so every probed point keeps distance >= R/2
/// to the nearest coefficient jump.
inline LockingReport check_exponential_locking(const DensitySolution& sol, const ScalarField& a,
                                               const OmegaMask& mask, const Vec3& center,
                                               double R) {
    require_same_grid(a.grid, mask.grid, "check_exponential_locking");
    LockingReport rep;
    rep.probe_center = center;
    rep.probe_radius = R;
    if (R <= 0.0) return rep;  // degenerate probe: precondition flagged false

    const auto n = mask.grid.n;
    double aval = 0.0;
    bool found = false;
    bool constant = true;
    for (int k = 0; k < n[2]; ++k)
        for (int j = 0; j < n[1]; ++j)
            for (int i = 0; i < n[0]; ++i) {
                if (!mask.cell_at(i, j, k)) continue;
                Vec3 p = mask.grid.cell_center(i, j, k);
                if (norm(p - center) > R) continue;
                if (!found) {
                    aval = a.at(i, j, k);
                    found = true;
                } else if (std::abs(a.at(i, j, k) - aval) > 1e-12) {
                    constant = false;
                }
            }
    rep.precondition_ok = found && constant;
    if (!rep.precondition_ok) return rep;

    double sup = 0.0;
    for (int k = 0; k < n[2]; ++k)
        for (int j = 0; j < n[1]; ++j)
            for (int i = 0; i < n[0]; ++i) {
                if (!mask.cell_at(i, j, k)) continue;
                Vec3 p = mask.grid.cell_center(i, j, k);
                if (norm(p - center) > 0.5 * R) continue;
                sup = std::max(sup, std::abs(std::sqrt(aval) - sol.rho.at(i, j, k)));
            }
    rep.sup_deviation = sup;
    return rep;
}

/// Discrete Hoelder quotient max |f(x)-f(y)|/|x-y|^gamma over sampled dyadic
/// separations (diagnostic).
inline double holder_quotient(const ScalarField& f, const OmegaMask& mask, double gamma,
                              std::uint64_t seed = 17, int pairs = 4000) {
    Rng rng(seed);
    const auto n = mask.grid.n;
    std::vector<std::array<int, 3>> cells;
    for (int k = 0; k < n[2]; ++k)
        for (int j = 0; j < n[1]; ++j)
            for (int i = 0; i < n[0]; ++i)
                if (mask.cell_at(i, j, k)) cells.push_back({i, j, k});
    if (cells.size() < 2) return 0.0;
    double q = 0.0;
    for (int t = 0; t < pairs; ++t) {
        auto a = cells[rng.next_u64() % cells.size()];
        auto b = cells[rng.next_u64() % cells.size()];
        if (a == b) continue;
        Vec3 pa = mask.grid.cell_center(a[0], a[1], a[2]);
        Vec3 pb = mask.grid.cell_center(b[0], b[1], b[2]);
        double dist = norm(pa - pb);
        q = std::max(q, std::abs(f.at(a[0], a[1], a[2]) - f.at(b[0], b[1], b[2])) /
                            std::pow(dist, gamma));
    }
    return q;
}

}  // namespace pgl3
