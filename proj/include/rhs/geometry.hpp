#pragma once

// Network-level geometry: Poisson-distributed BS sites on a disk, each
// carrying a vertical surface panel with a random azimuth, and the mapping of
// ground-plane UE positions into a panel's local frame.
//
// Local frame convention (one panel): x runs along the panel horizontally,
// y runs up the panel, z points along the horizontal normal. Element centers
// sit at (x_n, y_n, 0); the feed sits on the normal through the origin at
// (0, 0, -d0); a ground UE lands at y = -H. UEs behind the panel are folded
// into the front half-space (|normal component|), which matches treating the
// panel as front-illuminated.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace rhs {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

struct Region {
    double radius = 0.0;  // disk radius, meters
    double area() const { return 3.141592653589793238462643383279502884 * radius * radius; }
};

struct BsSite {
    Vec2 center;         // ground coordinates, meters
    double height = 0.0;  // panel center height H, meters
    double azimuth = 0.0; // panel horizontal-axis direction, radians in [0, pi)
};

struct NetworkRealization {
    std::vector<BsSite> sites;
    Region region;
    double density = 0.0;  // BS per square meter
    std::size_t count() const { return sites.size(); }
};

struct UeLayout {
    std::vector<Vec2> positions;  // ground coordinates
    std::size_t count() const { return positions.size(); }
};

struct LocalUePosition {
    double x = 0.0;       // panel-frame coordinates of the UE
    double y = 0.0;
    double z = 0.0;
    double range = 0.0;   // ||q||
    double sin_psi = 0.0; // elevation of q above the panel plane, in [0, 1]
    double omega = 0.0;   // folded azimuth offset, in [0, pi]
};

// Draw one network: BS count Poisson with mean density*area, centers i.i.d.
// uniform on the disk, azimuths i.i.d. uniform on [0, pi). Draw order is
// fixed (count, then all centers, then all azimuths) so substreams replay.
// A zero-count draw is returned as an empty realization.
NetworkRealization sample_ppp(const Region& region, double density, double height,
                              std::mt19937_64& rng);

// Map a ground UE into the site's panel frame. Throws on zero range (UE at
// the panel center with H = 0).
LocalUePosition local_frame_position(const BsSite& site, Vec2 ue);

// Partition the BSs by nearest UE (3-D distance). Ties go to the lowest UE
// index. Entry k lists the BS indices focused on UE k; sets may be empty.
std::vector<std::vector<std::size_t>> serving_sets(const NetworkRealization& network,
                                                   const UeLayout& ues);

} // namespace rhs
