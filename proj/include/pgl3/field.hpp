#pragma once

#include <algorithm>
#include <cmath>

#include "pgl3/grid.hpp"

namespace pgl3 {

namespace detail {
inline void check_finite(const double* v, std::size_t n, const char* what) {
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(v[i])) throw ContractError(std::string(what) + ": non-finite sample");
}
}  // namespace detail

/// Scalar samples at cell centers.
struct ScalarField {
    GridSpec grid;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const GridSpec& g, double fill = 0.0)
        : grid(g), v(g.num_cells(), fill) {}

    double& at(int i, int j, int k) { return v[idx3(grid.n, i, j, k)]; }
    double at(int i, int j, int k) const { return v[idx3(grid.n, i, j, k)]; }
    /// Zero-extension read.
    double at0(int i, int j, int k) const {
        if (i < 0 || j < 0 || k < 0 || i >= grid.n[0] || j >= grid.n[1] || k >= grid.n[2])
            return 0.0;
        return at(i, j, k);
    }
    std::size_t size() const { return v.size(); }
};

/// Complex samples at cell centers.
struct ComplexField {
    GridSpec grid;
    std::vector<cplx> v;

    ComplexField() = default;
    explicit ComplexField(const GridSpec& g, cplx fill = cplx(0, 0))
        : grid(g), v(g.num_cells(), fill) {}

    cplx& at(int i, int j, int k) { return v[idx3(grid.n, i, j, k)]; }
    cplx at(int i, int j, int k) const { return v[idx3(grid.n, i, j, k)]; }
    std::size_t size() const { return v.size(); }
};

/// Vector field with each component sampled on its own face lattice
/// (x-component on x-faces, etc).
struct VectorField {
    GridSpec grid;
    std::array<std::vector<double>, 3> c;

    VectorField() = default;
    explicit VectorField(const GridSpec& g, double fill = 0.0) : grid(g) {
        for (int d = 0; d < 3; ++d) c[d].assign(count3(g.face_dims(d)), fill);
    }

    double& at(int d, int i, int j, int k) { return c[d][idx3(grid.face_dims(d), i, j, k)]; }
    double at(int d, int i, int j, int k) const {
        return c[d][idx3(grid.face_dims(d), i, j, k)];
    }
    double at0(int d, int i, int j, int k) const {
        auto fd = grid.face_dims(d);
        if (i < 0 || j < 0 || k < 0 || i >= fd[0] || j >= fd[1] || k >= fd[2]) return 0.0;
        return at(d, i, j, k);
    }
};

/// Vector field with components on edge lattices (curl outputs, magnetic fields,
/// the potential B0).
struct EdgeField {
    GridSpec grid;
    std::array<std::vector<double>, 3> c;

    EdgeField() = default;
    explicit EdgeField(const GridSpec& g, double fill = 0.0) : grid(g) {
        for (int d = 0; d < 3; ++d) c[d].assign(count3(g.edge_dims(d)), fill);
    }

    double& at(int d, int i, int j, int k) { return c[d][idx3(grid.edge_dims(d), i, j, k)]; }
    double at(int d, int i, int j, int k) const {
        return c[d][idx3(grid.edge_dims(d), i, j, k)];
    }
    double at0(int d, int i, int j, int k) const {
        auto ed = grid.edge_dims(d);
        if (i < 0 || j < 0 || k < 0 || i >= ed[0] || j >= ed[1] || k >= ed[2]) return 0.0;
        return at(d, i, j, k);
    }
};

/// Scalar samples at vertices (divergence of edge fields, gauge potentials on
/// the edge complex).
struct VertexField {
    GridSpec grid;
    std::vector<double> v;

    VertexField() = default;
    explicit VertexField(const GridSpec& g, double fill = 0.0)
        : grid(g), v(count3(g.vertex_dims()), fill) {}

    double& at(int i, int j, int k) { return v[idx3(grid.vertex_dims(), i, j, k)]; }
    double at(int i, int j, int k) const { return v[idx3(grid.vertex_dims(), i, j, k)]; }
    double at0(int i, int j, int k) const {
        auto vd = grid.vertex_dims();
        if (i < 0 || j < 0 || k < 0 || i >= vd[0] || j >= vd[1] || k >= vd[2]) return 0.0;
        return at(i, j, k);
    }
};

/// Complex vector samples on the face lattices (covariant gradients).
struct FaceComplex {
    GridSpec grid;
    std::array<std::vector<cplx>, 3> c;

    FaceComplex() = default;
    explicit FaceComplex(const GridSpec& g) : grid(g) {
        for (int d = 0; d < 3; ++d) c[d].assign(count3(g.face_dims(d)), cplx(0, 0));
    }
    cplx& at(int d, int i, int j, int k) { return c[d][idx3(grid.face_dims(d), i, j, k)]; }
    cplx at(int d, int i, int j, int k) const {
        return c[d][idx3(grid.face_dims(d), i, j, k)];
    }
};

template <class F>
void require_same_grid(const F& a, const F& b, const char* what) {
    if (!a.grid.same_layout(b.grid)) throw ContractError(std::string(what) + ": grid mismatch");
}
inline void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
    if (!a.same_layout(b)) throw ContractError(std::string(what) + ": grid mismatch");
}

// Elementwise linear-algebra helpers used by the iterative solvers. All
// reductions run serially in index order for bitwise determinism.

inline double dot_cells(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double dot_all(const VectorField& a, const VectorField& b) {
    double s = 0.0;
    for (int d = 0; d < 3; ++d)
        for (std::size_t i = 0; i < a.c[d].size(); ++i) s += a.c[d][i] * b.c[d][i];
    return s;
}
inline double dot_all(const EdgeField& a, const EdgeField& b) {
    double s = 0.0;
    for (int d = 0; d < 3; ++d)
        for (std::size_t i = 0; i < a.c[d].size(); ++i) s += a.c[d][i] * b.c[d][i];
    return s;
}
template <class VF>
void axpy(double alpha, const VF& x, VF& y) {
    for (int d = 0; d < 3; ++d)
        for (std::size_t i = 0; i < x.c[d].size(); ++i) y.c[d][i] += alpha * x.c[d][i];
}
template <class VF>
void scale(VF& x, double s) {
    for (int d = 0; d < 3; ++d)
        for (auto& v : x.c[d]) v *= s;
}
inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}
template <class VF>
double max_abs_field(const VF& f) {
    double m = 0.0;
    for (int d = 0; d < 3; ++d) m = std::max(m, max_abs(f.c[d]));
    return m;
}

}  // namespace pgl3
