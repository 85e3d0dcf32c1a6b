#pragma once

#include <algorithm>
#include <memory>
#include <utility>

#include "pgl3/core.hpp"

namespace pgl3 {

/// Domain Omega sitting strictly inside the computational box.
struct OmegaDesc {
    enum class Kind { Ball, Box, Sdf };
    Kind kind = Kind::Ball;
    Vec3 center{0, 0, 0};
    double radius = 1.0;
    Vec3 lo{-1, -1, -1}, hi{1, 1, 1};
    // Sdf: cell-centered signed distance samples, set up lazily by the caller.
    std::shared_ptr<const std::vector<double>> sdf;

    static OmegaDesc ball(Vec3 c, double r) {
        OmegaDesc d;
        d.kind = Kind::Ball;
        d.center = c;
        d.radius = r;
        return d;
    }
    static OmegaDesc box(Vec3 lo, Vec3 hi) {
        OmegaDesc d;
        d.kind = Kind::Box;
        d.lo = lo;
        d.hi = hi;
        return d;
    }

    /// Negative inside Omega. For Kind::Sdf the caller indexes samples directly.
    double signed_distance(const Vec3& p) const {
        switch (kind) {
            case Kind::Ball:
                return norm(p - center) - radius;
            case Kind::Box: {
                double d = -1e300;
                for (int a = 0; a < 3; ++a) {
                    d = std::max(d, lo[a] - p[a]);
                    d = std::max(d, p[a] - hi[a]);
                }
                return d;
            }
            default:
                throw ContractError("signed_distance: sdf kind requires sampled access");
        }
    }
};

struct GridSpec {
    Vec3 box_min{-2, -2, -2};
    Vec3 box_max{2, 2, 2};
    std::array<int, 3> n{16, 16, 16};
    OmegaDesc omega = OmegaDesc::ball({0, 0, 0}, 1.0);

    double h(int axis) const { return (box_max[axis] - box_min[axis]) / n[axis]; }
    Vec3 spacing() const { return {h(0), h(1), h(2)}; }
    double cell_volume() const { return h(0) * h(1) * h(2); }
    double max_h() const { return std::max({h(0), h(1), h(2)}); }

    std::size_t num_cells() const { return std::size_t(n[0]) * n[1] * n[2]; }
    std::array<int, 3> face_dims(int d) const {
        std::array<int, 3> f = n;
        f[d] += 1;
        return f;
    }
    std::array<int, 3> edge_dims(int d) const {
        std::array<int, 3> e{n[0] + 1, n[1] + 1, n[2] + 1};
        e[d] = n[d];
        return e;
    }
    std::array<int, 3> vertex_dims() const { return {n[0] + 1, n[1] + 1, n[2] + 1}; }

    Vec3 cell_center(int i, int j, int k) const {
        return {box_min.x + (i + 0.5) * h(0), box_min.y + (j + 0.5) * h(1),
                box_min.z + (k + 0.5) * h(2)};
    }
    Vec3 vertex(int i, int j, int k) const {
        return {box_min.x + i * h(0), box_min.y + j * h(1), box_min.z + k * h(2)};
    }
    Vec3 face_center(int d, int i, int j, int k) const {
        Vec3 p{box_min.x + (i + 0.5) * h(0), box_min.y + (j + 0.5) * h(1),
               box_min.z + (k + 0.5) * h(2)};
        p[d] -= 0.5 * h(d);
        return p;
    }
    Vec3 edge_center(int d, int i, int j, int k) const {
        Vec3 p{box_min.x + i * h(0), box_min.y + j * h(1), box_min.z + k * h(2)};
        p[d] += 0.5 * h(d);
        return p;
    }

    bool cell_in_omega(int i, int j, int k) const {
        if (omega.kind == OmegaDesc::Kind::Sdf) {
            const auto& s = *omega.sdf;
            return s[(std::size_t(k) * n[1] + j) * n[0] + i] < 0.0;
        }
        return omega.signed_distance(cell_center(i, j, k)) < 0.0;
    }

    void validate() const {
        for (int a = 0; a < 3; ++a) {
            if (n[a] <= 0) throw ContractError("GridSpec: cell counts must be positive");
            if (!(box_max[a] > box_min[a])) throw ContractError("GridSpec: empty box");
        }
        if (omega.kind == OmegaDesc::Kind::Sdf &&
            (!omega.sdf || omega.sdf->size() != num_cells()))
            throw ContractError("GridSpec: sdf sample count does not match grid");
    }

    bool same_layout(const GridSpec& o) const {
        return n == o.n && norm(box_min - o.box_min) == 0.0 && norm(box_max - o.box_max) == 0.0;
    }
};

inline std::size_t idx3(const std::array<int, 3>& dims, int i, int j, int k) {
    return (std::size_t(k) * dims[1] + j) * dims[0] + i;
}
inline std::size_t count3(const std::array<int, 3>& dims) {
    return std::size_t(dims[0]) * dims[1] * dims[2];
}

/// Cached Omega membership for every mesh entity. Faces are "interior" when both
/// adjacent cells lie in Omega; edges when all four adjacent cells do. Boundary
/// conditions on the mask are enforced through these sets.
struct OmegaMask {
    GridSpec grid;
    std::vector<std::uint8_t> cell;                   // cell dims
    std::array<std::vector<std::uint8_t>, 3> face;    // interior faces per direction
    std::array<std::vector<std::uint8_t>, 3> edge;    // interior edges per direction
    std::size_t cell_count = 0;
    std::array<std::size_t, 3> face_count{0, 0, 0};

    bool cell_at(int i, int j, int k) const {
        if (i < 0 || j < 0 || k < 0 || i >= grid.n[0] || j >= grid.n[1] || k >= grid.n[2])
            return false;
        return cell[idx3(grid.n, i, j, k)] != 0;
    }
};

inline OmegaMask make_mask(const GridSpec& g) {
    g.validate();
    OmegaMask m;
    m.grid = g;
    m.cell.assign(g.num_cells(), 0);
    for (int k = 0; k < g.n[2]; ++k)
        for (int j = 0; j < g.n[1]; ++j)
            for (int i = 0; i < g.n[0]; ++i)
                if (g.cell_in_omega(i, j, k)) {
                    m.cell[idx3(g.n, i, j, k)] = 1;
                    ++m.cell_count;
                }
    if (m.cell_count == 0) throw ContractError("make_mask: Omega contains no cell centers");

    // Omega must keep a margin of exterior cells on every side of the box.
    for (int k = 0; k < g.n[2]; ++k)
        for (int j = 0; j < g.n[1]; ++j)
            for (int i = 0; i < g.n[0]; ++i)
                if (m.cell[idx3(g.n, i, j, k)] &&
                    (i == 0 || j == 0 || k == 0 || i == g.n[0] - 1 || j == g.n[1] - 1 ||
                     k == g.n[2] - 1))
                    throw ContractError("make_mask: Omega touches the computational box boundary");

    auto in = [&](int i, int j, int k) { return m.cell_at(i, j, k); };
    for (int d = 0; d < 3; ++d) {
        auto fd = g.face_dims(d);
        m.face[d].assign(count3(fd), 0);
        for (int k = 0; k < fd[2]; ++k)
            for (int j = 0; j < fd[1]; ++j)
                for (int i = 0; i < fd[0]; ++i) {
                    int im = i - (d == 0), jm = j - (d == 1), km = k - (d == 2);
                    if (in(i, j, k) && in(im, jm, km)) {
                        m.face[d][idx3(fd, i, j, k)] = 1;
                        ++m.face_count[d];
                    }
                }
        auto ed = g.edge_dims(d);
        m.edge[d].assign(count3(ed), 0);
        // the four cells around an edge of direction d are offset in the two
        // transverse directions
        int u = (d + 1) % 3, v = (d + 2) % 3;
        for (int k = 0; k < ed[2]; ++k)
            for (int j = 0; j < ed[1]; ++j)
                for (int i = 0; i < ed[0]; ++i) {
                    std::array<int, 3> c{i, j, k};
                    bool ok = true;
                    for (int a = 0; a < 2 && ok; ++a)
                        for (int b = 0; b < 2 && ok; ++b) {
                            auto cc = c;
                            cc[u] -= a;
                            cc[v] -= b;
                            ok = in(cc[0], cc[1], cc[2]);
                        }
                    if (ok) m.edge[d][idx3(ed, i, j, k)] = 1;
                }
    }
    return m;
}

}  // namespace pgl3
