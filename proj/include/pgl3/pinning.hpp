#pragma once

#include "pgl3/field.hpp"

namespace pgl3 {

/// Pinning coefficient a_eps: values in [b,1], constant within boundary_margin
/// of the domain boundary.
struct PinningProfile {
    enum class Kind { Constant, InclusionSet, Periodic, RandomCheckerboard };
    Kind kind = Kind::Constant;
    double floor_b = 0.5;          // lower bound b in (0,1]
    double value = 1.0;            // constant value / inclusion depth
    std::vector<Vec3> centers;     // inclusion centers
    std::vector<double> radii;     // inclusion radii
    double period = 0.5;           // periodic / checkerboard cell size
    std::uint64_t seed = 1;        // checkerboard seed
    double boundary_margin = 0.0;  // a constant within this distance of dOmega
};

namespace detail {
inline double dist_to_omega_boundary(const GridSpec& g, const Vec3& p) {
    // For ball/box Omega the signed distance is exact; Sdf uses the samples.
    return -g.omega.signed_distance(p);
}
}  // namespace detail

inline ScalarField make_pinning(const PinningProfile& prof, const GridSpec& grid) {
    if (!(prof.floor_b > 0.0 && prof.floor_b <= 1.0))
        throw ContractError("make_pinning: floor b must lie in (0,1]");
    if (prof.kind != PinningProfile::Kind::Constant &&
        !(prof.value >= prof.floor_b && prof.value <= 1.0))
        throw ContractError("make_pinning: inclusion value outside [b,1]");
    if (prof.centers.size() != prof.radii.size())
        throw ContractError("make_pinning: centers/radii size mismatch");

    const double b = prof.floor_b;
    ScalarField a(grid, 1.0);
    auto clamp01 = [&](double v) { return std::min(1.0, std::max(b, v)); };

    for (std::size_t q = 0; q < prof.centers.size(); ++q) {
        // inclusions must stay clear of the margin band
        if (prof.boundary_margin > 0.0 && grid.omega.kind != OmegaDesc::Kind::Sdf) {
            double clearance = detail::dist_to_omega_boundary(grid, prof.centers[q]) -
                               prof.radii[q];
            if (clearance < prof.boundary_margin)
                throw ContractError("make_pinning: inclusion escapes the constant margin");
        }
    }

    const auto n = grid.n;
    for (int k = 0; k < n[2]; ++k)
        for (int j = 0; j < n[1]; ++j)
            for (int i = 0; i < n[0]; ++i) {
                Vec3 p = grid.cell_center(i, j, k);
                double v = 1.0;
                switch (prof.kind) {
                    case PinningProfile::Kind::Constant:
                        v = prof.value;
                        break;
                    case PinningProfile::Kind::InclusionSet: {
                        for (std::size_t q = 0; q < prof.centers.size(); ++q)
                            if (norm(p - prof.centers[q]) < prof.radii[q]) v = prof.value;
                        break;
                    }
                    case PinningProfile::Kind::Periodic: {
                        double s = 1.0;
                        for (int dax = 0; dax < 3; ++dax)
                            s *= 0.5 * (1.0 + std::cos(6.283185307179586 * p[dax] / prof.period));
                        v = 1.0 - (1.0 - prof.value) * s;
                        break;
                    }
                    case PinningProfile::Kind::RandomCheckerboard: {
                        auto cellof = [&](double x, double lo) {
                            return std::int64_t(std::floor((x - lo) / prof.period));
                        };
                        std::uint64_t hx = std::uint64_t(cellof(p.x, grid.box_min.x)) * 0x9E3779B1u;
                        std::uint64_t hy = std::uint64_t(cellof(p.y, grid.box_min.y)) * 0x85EBCA77u;
                        std::uint64_t hz = std::uint64_t(cellof(p.z, grid.box_min.z)) * 0xC2B2AE3Du;
                        std::uint64_t hsh = (hx ^ hy ^ hz) + prof.seed * 0x27D4EB2Fu;
                        hsh ^= hsh >> 33;
                        hsh *= 0xFF51AFD7ED558CCDull;
                        hsh ^= hsh >> 33;
                        v = (hsh & 1) ? prof.value : 1.0;
                        break;
                    }
                }
                if (prof.boundary_margin > 0.0 && grid.omega.kind != OmegaDesc::Kind::Sdf &&
                    detail::dist_to_omega_boundary(grid, p) <= prof.boundary_margin)
                    v = 1.0;
                a.at(i, j, k) = clamp01(v);
            }
    return a;
}

}  // namespace pgl3
