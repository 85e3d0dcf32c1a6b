#pragma once

#include <functional>

#include "pgl3/ops.hpp"

namespace pgl3 {

struct CgResult {
    int iterations = 0;
    double rel_residual = 0.0;
    bool converged = false;
};

/// Preconditioned conjugate gradients on a flat vector of unknowns.
/// `apply` must be SPD on the subspace preserved by `project` (may be null).
inline CgResult cg_solve(std::size_t n,
                         const std::function<void(const std::vector<double>&,
                                                  std::vector<double>&)>& apply,
                         const std::vector<double>& rhs, std::vector<double>& x,
                         double rel_tol, int max_iter,
                         const std::vector<double>* jacobi = nullptr,
                         const std::function<void(std::vector<double>&)>& project = nullptr) {
    std::vector<double> r(n), z(n), p(n), Ap(n);
    if (x.size() != n) x.assign(n, 0.0);

    apply(x, Ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - Ap[i];
    if (project) project(r);

    double rhs_norm = std::sqrt(dot_cells(rhs, rhs));
    if (rhs_norm == 0.0) {
        x.assign(n, 0.0);
        return {0, 0.0, true};
    }

    auto precond = [&](const std::vector<double>& in, std::vector<double>& out) {
        if (jacobi)
            for (std::size_t i = 0; i < n; ++i) out[i] = in[i] / (*jacobi)[i];
        else
            out = in;
        if (project) project(out);
    };

    precond(r, z);
    p = z;
    double rz = dot_cells(r, z);
    CgResult res;
    for (int it = 0; it < max_iter; ++it) {
        apply(p, Ap);
        double pAp = dot_cells(p, Ap);
        if (pAp <= 0.0) break;  // lost positive-definiteness (roundoff)
        double alpha = rz / pAp;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        if (project) project(r);
        double rn = std::sqrt(dot_cells(r, r));
        res.iterations = it + 1;
        res.rel_residual = rn / rhs_norm;
        if (res.rel_residual < rel_tol) {
            res.converged = true;
            return res;
        }
        precond(r, z);
        double rz_new = dot_cells(r, z);
        double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    res.converged = res.rel_residual < rel_tol;
    return res;
}

/// Weighted Neumann Laplacian on the Omega mask:
/// (L phi)_c = -div( w grad phi ) restricted to interior faces; the weight w
/// is the per-face product of adjacent rho values when used for rho^2.
struct MaskLaplacian {
    const OmegaMask& mask;
    VectorField face_weight;  // on faces; only interior-face entries used

    void apply(const std::vector<double>& phi, std::vector<double>& out) const {
        const GridSpec& g = mask.grid;
        const Vec3 h = g.spacing();
        out.assign(phi.size(), 0.0);
        for (int d = 0; d < 3; ++d) {
            auto fd = g.face_dims(d);
            double inv_h2 = 1.0 / (h[d] * h[d]);
            for (int k = 0; k < fd[2]; ++k)
                for (int j = 0; j < fd[1]; ++j)
                    for (int i = 0; i < fd[0]; ++i) {
                        if (!mask.face[d][idx3(fd, i, j, k)]) continue;
                        int im = i - (d == 0), jm = j - (d == 1), km = k - (d == 2);
                        std::size_t cp = idx3(g.n, i, j, k), cm = idx3(g.n, im, jm, km);
                        double w = face_weight.at(d, i, j, k) * inv_h2;
                        double diff = phi[cp] - phi[cm];
                        out[cp] += w * diff;
                        out[cm] -= w * diff;
                    }
        }
    }

    std::vector<double> jacobi_diag() const {
        const GridSpec& g = mask.grid;
        const Vec3 h = g.spacing();
        std::vector<double> diag(g.num_cells(), 1.0);
        for (int d = 0; d < 3; ++d) {
            auto fd = g.face_dims(d);
            double inv_h2 = 1.0 / (h[d] * h[d]);
            for (int k = 0; k < fd[2]; ++k)
                for (int j = 0; j < fd[1]; ++j)
                    for (int i = 0; i < fd[0]; ++i) {
                        if (!mask.face[d][idx3(fd, i, j, k)]) continue;
                        int im = i - (d == 0), jm = j - (d == 1), km = k - (d == 2);
                        double w = face_weight.at(d, i, j, k) * inv_h2;
                        diag[idx3(g.n, i, j, k)] += w;
                        diag[idx3(g.n, im, jm, km)] += w;
                    }
        }
        return diag;
    }
};

/// Subtract the Omega-mean so iterates stay in the mean-zero subspace.
inline std::function<void(std::vector<double>&)> omega_mean_projector(const OmegaMask& mask) {
    std::vector<std::size_t> cells;
    const auto n = mask.grid.n;
    for (int k = 0; k < n[2]; ++k)
        for (int j = 0; j < n[1]; ++j)
            for (int i = 0; i < n[0]; ++i)
                if (mask.cell_at(i, j, k)) cells.push_back(idx3(n, i, j, k));
    return [cells](std::vector<double>& v) {
        double m = 0.0;
        for (auto c : cells) m += v[c];
        m /= double(cells.size());
        for (auto c : cells) v[c] -= m;
    };
}

/// Pure-Neumann Poisson solve on all box cells: -div grad p = rhs (zero-mean).
/// Used for the Coulomb projection of box vector fields.
inline ScalarField box_poisson(const ScalarField& rhs, double rel_tol = 1e-12,
                               int max_iter = 20000) {
    const GridSpec& g = rhs.grid;
    const Vec3 h = g.spacing();
    auto apply = [&](const std::vector<double>& p, std::vector<double>& out) {
        out.assign(p.size(), 0.0);
        const auto n = g.n;
        for (int d = 0; d < 3; ++d) {
            double inv_h2 = 1.0 / (h[d] * h[d]);
            for (int k = 0; k < n[2]; ++k)
                for (int j = 0; j < n[1]; ++j)
                    for (int i = 0; i < n[0]; ++i) {
                        int ip = i + (d == 0), jp = j + (d == 1), kp = k + (d == 2);
                        if (ip >= n[0] || jp >= n[1] || kp >= n[2]) continue;
                        std::size_t a = idx3(n, i, j, k), b = idx3(n, ip, jp, kp);
                        double diff = p[b] - p[a];
                        out[b] += inv_h2 * diff;
                        out[a] -= inv_h2 * diff;
                    }
        }
    };
    auto project = [&](std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m += x;
        m /= double(v.size());
        for (double& x : v) x -= m;
    };
    ScalarField p(g);
    std::vector<double> b = rhs.v;
    project(b);
    auto res = cg_solve(p.v.size(), apply, b, p.v, rel_tol, max_iter, nullptr, project);
    if (!res.converged) throw SolverError("box_poisson: CG stagnation");
    return p;
}

/// Gradient restricted to interior box faces (box-boundary faces stay zero),
/// the adjoint convention used by box_poisson.
inline VectorField neumann_gradient(const ScalarField& f) {
    VectorField g = gradient(f);
    for (int d = 0; d < 3; ++d) {
        auto fd = f.grid.face_dims(d);
        for (int k = 0; k < fd[2]; ++k)
            for (int j = 0; j < fd[1]; ++j)
                for (int i = 0; i < fd[0]; ++i) {
                    bool bdry = (d == 0 && (i == 0 || i == fd[0] - 1)) ||
                                (d == 1 && (j == 0 || j == fd[1] - 1)) ||
                                (d == 2 && (k == 0 || k == fd[2] - 1));
                    if (bdry) g.at(d, i, j, k) = 0.0;
                }
    }
    return g;
}

/// Coulomb projection on the box: V <- V - grad p with -div grad p = -div V,
/// so div V = 0 afterwards (up to the solve tolerance). Assumes V has zero
/// normal trace on the box boundary (the admissible perturbation class).
inline void coulomb_project(VectorField& V, double rel_tol = 1e-12) {
    ScalarField d = divergence(V);
    for (auto& x : d.v) x = -x;
    ScalarField p = box_poisson(d, rel_tol);
    auto gp = neumann_gradient(p);
    axpy(-1.0, gp, V);
}

}  // namespace pgl3
