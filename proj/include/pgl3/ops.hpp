#pragma once

#include "pgl3/field.hpp"

namespace pgl3 {

// Staggered (Yee-style) operators. Scalars live at cell centers, vector
// potentials and currents on faces, curls and magnetic fields on edges.
// Fields are extended by zero outside the box, which makes both composition
// identities curl(grad f) = 0 and div(curl V) = 0 hold exactly, including at
// the box boundary, and makes curl_fe / curl_ef mutual adjoints under the
// volume-weighted inner products.

/// centers -> faces
inline VectorField gradient(const ScalarField& f) {
    VectorField g(f.grid);
    const Vec3 h = f.grid.spacing();
    for (int d = 0; d < 3; ++d) {
        auto fd = f.grid.face_dims(d);
        for (int k = 0; k < fd[2]; ++k)
            for (int j = 0; j < fd[1]; ++j)
                for (int i = 0; i < fd[0]; ++i) {
                    int im = i - (d == 0), jm = j - (d == 1), km = k - (d == 2);
                    g.at(d, i, j, k) = (f.at0(i, j, k) - f.at0(im, jm, km)) / h[d];
                }
    }
    return g;
}

/// vertices -> edges
inline EdgeField gradient(const VertexField& f) {
    EdgeField g(f.grid);
    const Vec3 h = f.grid.spacing();
    for (int d = 0; d < 3; ++d) {
        auto ed = f.grid.edge_dims(d);
        for (int k = 0; k < ed[2]; ++k)
            for (int j = 0; j < ed[1]; ++j)
                for (int i = 0; i < ed[0]; ++i) {
                    int ip = i + (d == 0), jp = j + (d == 1), kp = k + (d == 2);
                    g.at(d, i, j, k) = (f.at(ip, jp, kp) - f.at(i, j, k)) / h[d];
                }
    }
    return g;
}

/// faces -> centers
inline ScalarField divergence(const VectorField& V) {
    ScalarField out(V.grid);
    const Vec3 h = V.grid.spacing();
    const auto n = V.grid.n;
    for (int k = 0; k < n[2]; ++k)
        for (int j = 0; j < n[1]; ++j)
            for (int i = 0; i < n[0]; ++i)
                out.at(i, j, k) = (V.at(0, i + 1, j, k) - V.at(0, i, j, k)) / h.x +
                                  (V.at(1, i, j + 1, k) - V.at(1, i, j, k)) / h.y +
                                  (V.at(2, i, j, k + 1) - V.at(2, i, j, k)) / h.z;
    return out;
}

/// edges -> vertices
inline VertexField divergence(const EdgeField& E) {
    VertexField out(E.grid);
    const Vec3 h = E.grid.spacing();
    auto vd = E.grid.vertex_dims();
    for (int k = 0; k < vd[2]; ++k)
        for (int j = 0; j < vd[1]; ++j)
            for (int i = 0; i < vd[0]; ++i)
                out.at(i, j, k) = (E.at0(0, i, j, k) - E.at0(0, i - 1, j, k)) / h.x +
                                  (E.at0(1, i, j, k) - E.at0(1, i, j - 1, k)) / h.y +
                                  (E.at0(2, i, j, k) - E.at0(2, i, j, k - 1)) / h.z;
    return out;
}

/// faces -> edges
inline EdgeField curl(const VectorField& V) {
    EdgeField out(V.grid);
    const Vec3 h = V.grid.spacing();
    for (int d = 0; d < 3; ++d) {
        int u = (d + 1) % 3, v = (d + 2) % 3;  // (curl V)_d = d_u V_v - d_v V_u
        auto ed = V.grid.edge_dims(d);
        for (int k = 0; k < ed[2]; ++k)
            for (int j = 0; j < ed[1]; ++j)
                for (int i = 0; i < ed[0]; ++i) {
                    std::array<int, 3> p{i, j, k};
                    auto pm_u = p, pm_v = p;
                    pm_u[u] -= 1;
                    pm_v[v] -= 1;
                    double dv = (V.at0(v, p[0], p[1], p[2]) -
                                 V.at0(v, pm_u[0], pm_u[1], pm_u[2])) / h[u];
                    double du = (V.at0(u, p[0], p[1], p[2]) -
                                 V.at0(u, pm_v[0], pm_v[1], pm_v[2])) / h[v];
                    out.at(d, i, j, k) = dv - du;
                }
    }
    return out;
}

/// edges -> faces
inline VectorField curl(const EdgeField& E) {
    VectorField out(E.grid);
    const Vec3 h = E.grid.spacing();
    for (int d = 0; d < 3; ++d) {
        int u = (d + 1) % 3, v = (d + 2) % 3;
        auto fd = E.grid.face_dims(d);
        for (int k = 0; k < fd[2]; ++k)
            for (int j = 0; j < fd[1]; ++j)
                for (int i = 0; i < fd[0]; ++i) {
                    std::array<int, 3> p{i, j, k};
                    auto pp_u = p, pp_v = p;
                    pp_u[u] += 1;
                    pp_v[v] += 1;
                    double dv = (E.at(v, pp_u[0], pp_u[1], pp_u[2]) -
                                 E.at(v, p[0], p[1], p[2])) / h[u];
                    double du = (E.at(u, pp_v[0], pp_v[1], pp_v[2]) -
                                 E.at(u, p[0], p[1], p[2])) / h[v];
                    out.at(d, i, j, k) = dv - du;
                }
    }
    return out;
}

enum class Region { Omega, Box, MaskOnly };

struct IntegrateResult {
    double value = 0.0;
    bool empty_region = false;
};

/// Midpoint rule over cells whose centers lie in the region; deterministic
/// summation order. Empty region integrates to 0 with a warning flag.
inline IntegrateResult integrate_checked(const ScalarField& density, const OmegaMask& mask,
                                         Region region = Region::Omega) {
    require_same_grid(density.grid, mask.grid, "integrate");
    const double vol = density.grid.cell_volume();
    double s = 0.0;
    std::size_t used = 0;
    const auto n = density.grid.n;
    for (int k = 0; k < n[2]; ++k)
        for (int j = 0; j < n[1]; ++j)
            for (int i = 0; i < n[0]; ++i) {
                bool take = region == Region::Box || mask.cell_at(i, j, k);
                if (region == Region::MaskOnly) take = mask.cell_at(i, j, k);
                if (take) {
                    s += density.at(i, j, k);
                    ++used;
                }
            }
    return {s * vol, used == 0};
}

inline double integrate(const ScalarField& density, const OmegaMask& mask,
                        Region region = Region::Omega) {
    return integrate_checked(density, mask, region).value;
}

// --- covariant structures -------------------------------------------------
//
// Per-face link quantities for u on centers and A on faces. The kinetic
// density on a link (c-, c+) with spacing l and potential value A is
//
//   kappa_A(u) = |u+ - u-|^2 / l^2 - 2 A Im(conj(u-) u+) / l + A^2 Re(conj(u-) u+)
//
// which is exactly quadratic in A and factorizes exactly under u -> rho u
// with real rho (the face weight becomes rho- rho+). Its A-derivative gives
// the face supercurrent  j = Im(conj(u-) u+)/l - A Re(conj(u-) u+).

/// nabla_A u as complex face samples: (u+ - u-)/l - i A (u- + u+)/2.
inline FaceComplex covariant_grad(const ComplexField& u, const VectorField& A) {
    require_same_grid(u.grid, A.grid, "covariant_grad");
    FaceComplex out(u.grid);
    const Vec3 h = u.grid.spacing();
    // Only faces with both adjacent cells carry a value; the order parameter is
    // not zero-extended.
    for (int d = 0; d < 3; ++d) {
        auto fd = u.grid.face_dims(d);
        for (int k = 0; k < fd[2]; ++k)
            for (int j = 0; j < fd[1]; ++j)
                for (int i = (d == 0); i < fd[0] - (d == 0); ++i) {
                    if ((d == 1 && (j == 0 || j == fd[1] - 1)) ||
                        (d == 2 && (k == 0 || k == fd[2] - 1)))
                        continue;
                    int im = i - (d == 0), jm = j - (d == 1), km = k - (d == 2);
                    cplx up = u.at(i, j, k), um = u.at(im, jm, km);
                    out.at(d, i, j, k) = (up - um) / h[d] -
                                         cplx(0, 1) * A.at(d, i, j, k) * (0.5 * (up + um));
                }
    }
    return out;
}

/// Link kinetic density kappa summed to cell centers (half of each adjacent
/// face per direction), ready for `integrate`. Only interior Omega faces
/// contribute, matching the Neumann mask convention.
inline ScalarField covariant_kinetic_density(const ComplexField& u, const VectorField& A,
                                             const OmegaMask& mask) {
    require_same_grid(u.grid, A.grid, "covariant_kinetic_density");
    require_same_grid(u.grid, mask.grid, "covariant_kinetic_density");
    ScalarField out(u.grid);
    const Vec3 h = u.grid.spacing();
    for (int d = 0; d < 3; ++d) {
        auto fd = u.grid.face_dims(d);
        for (int k = 0; k < fd[2]; ++k)
            for (int j = 0; j < fd[1]; ++j)
                for (int i = 0; i < fd[0]; ++i) {
                    if (!mask.face[d][idx3(fd, i, j, k)]) continue;
                    int im = i - (d == 0), jm = j - (d == 1), km = k - (d == 2);
                    cplx up = u.at(i, j, k), um = u.at(im, jm, km);
                    cplx z = std::conj(um) * up;
                    double a = A.at(d, i, j, k);
                    double kap = std::norm(up - um) / (h[d] * h[d]) -
                                 2.0 * a * z.imag() / h[d] + a * a * z.real();
                    out.at(im, jm, km) += 0.5 * kap;
                    out.at(i, j, k) += 0.5 * kap;
                }
    }
    return out;
}

/// |covariant_grad|^2 averaged back to centers (diagnostic density; the energy
/// path uses covariant_kinetic_density).
inline ScalarField covariant_sq_density(const FaceComplex& g) {
    ScalarField out(g.grid);
    for (int d = 0; d < 3; ++d) {
        auto fd = g.grid.face_dims(d);
        for (int k = 0; k < fd[2]; ++k)
            for (int j = 0; j < fd[1]; ++j)
                for (int i = 0; i < fd[0]; ++i) {
                    double m = std::norm(g.at(d, i, j, k));
                    int im = i - (d == 0), jm = j - (d == 1), km = k - (d == 2);
                    auto n = g.grid.n;
                    if (im >= 0 && jm >= 0 && km >= 0) out.at(im, jm, km) += 0.5 * m;
                    if (i < n[0] && j < n[1] && k < n[2]) out.at(i, j, k) += 0.5 * m;
                }
    }
    return out;
}

// --- trilinear samplers ----------------------------------------------------

namespace detail {
/// Trilinear interpolation on a lattice whose sample (i,j,k) sits at
/// origin + (i,j,k)*h, with clamped indices outside.
inline double trilinear(const std::vector<double>& data, const std::array<int, 3>& dims,
                        const Vec3& origin, const Vec3& h, const Vec3& p) {
    double fx = (p.x - origin.x) / h.x, fy = (p.y - origin.y) / h.y, fz = (p.z - origin.z) / h.z;
    int i = int(std::floor(fx)), j = int(std::floor(fy)), k = int(std::floor(fz));
    double ax = fx - i, ay = fy - j, az = fz - k;
    auto cl = [](int v, int n) { return std::min(std::max(v, 0), n - 1); };
    double s = 0.0;
    for (int dk = 0; dk < 2; ++dk)
        for (int dj = 0; dj < 2; ++dj)
            for (int di = 0; di < 2; ++di) {
                double w = (di ? ax : 1 - ax) * (dj ? ay : 1 - ay) * (dk ? az : 1 - az);
                s += w * data[idx3(dims, cl(i + di, dims[0]), cl(j + dj, dims[1]),
                                   cl(k + dk, dims[2]))];
            }
    return s;
}
}  // namespace detail

inline double sample(const ScalarField& f, const Vec3& p) {
    const Vec3 h = f.grid.spacing();
    Vec3 origin = f.grid.cell_center(0, 0, 0);
    return detail::trilinear(f.v, f.grid.n, origin, h, p);
}

inline cplx sample(const ComplexField& f, const Vec3& p) {
    const Vec3 h = f.grid.spacing();
    Vec3 origin = f.grid.cell_center(0, 0, 0);
    std::vector<double> re(f.v.size()), im(f.v.size());
    for (std::size_t i = 0; i < f.v.size(); ++i) {
        re[i] = f.v[i].real();
        im[i] = f.v[i].imag();
    }
    return {detail::trilinear(re, f.grid.n, origin, h, p),
            detail::trilinear(im, f.grid.n, origin, h, p)};
}

inline Vec3 sample(const EdgeField& B, const Vec3& p) {
    Vec3 out;
    for (int d = 0; d < 3; ++d)
        out[d] = detail::trilinear(B.c[d], B.grid.edge_dims(d), B.grid.edge_center(d, 0, 0, 0),
                                   B.grid.spacing(), p);
    return out;
}

inline Vec3 sample(const VectorField& V, const Vec3& p) {
    Vec3 out;
    for (int d = 0; d < 3; ++d)
        out[d] = detail::trilinear(V.c[d], V.grid.face_dims(d), V.grid.face_center(d, 0, 0, 0),
                                   V.grid.spacing(), p);
    return out;
}

/// Edge-component averages at a cell center (4 surrounding edges per
/// component).
inline Vec3 edge_to_center(const EdgeField& B, int i, int j, int k) {
    Vec3 out;
    for (int d = 0; d < 3; ++d) {
        int u = (d + 1) % 3, v = (d + 2) % 3;
        std::array<int, 3> p{i, j, k};
        double s = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                auto q = p;
                q[u] += a;
                q[v] += b;
                s += B.at(d, q[0], q[1], q[2]);
            }
        out[d] = 0.25 * s;
    }
    return out;
}

inline Vec3 face_to_center(const VectorField& V, int i, int j, int k) {
    return {0.5 * (V.at(0, i, j, k) + V.at(0, i + 1, j, k)),
            0.5 * (V.at(1, i, j, k) + V.at(1, i, j + 1, k)),
            0.5 * (V.at(2, i, j, k) + V.at(2, i, j, k + 1))};
}

}  // namespace pgl3
