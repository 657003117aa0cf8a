#include "rhs/geometry.hpp"

#include <numbers>
#include <stdexcept>

namespace rhs {

NetworkRealization sample_ppp(const Region& region, double density, double height,
                              std::mt19937_64& rng) {
    if (!(region.radius > 0.0)) throw std::invalid_argument("region radius must be positive");
    if (!(density > 0.0)) throw std::invalid_argument("density must be positive");

    std::poisson_distribution<int> count(density * region.area());
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    NetworkRealization net;
    net.region = region;
    net.density = density;
    const int n = count(rng);
    net.sites.resize(n);
    for (auto& site : net.sites) {
        const double r = region.radius * std::sqrt(unif(rng));
        const double phi = 2.0 * std::numbers::pi * unif(rng);
        site.center = {r * std::cos(phi), r * std::sin(phi)};
        site.height = height;
    }
    for (auto& site : net.sites) {
        site.azimuth = std::numbers::pi * unif(rng);
    }
    return net;
}

LocalUePosition local_frame_position(const BsSite& site, Vec2 ue) {
    const Vec2 c{ue.x - site.center.x, ue.y - site.center.y};
    // Components of c along the panel's horizontal axis and its normal.
    const double cos_az = std::cos(site.azimuth);
    const double sin_az = std::sin(site.azimuth);
    const double along = c.x * cos_az + c.y * sin_az;
    const double across = std::abs(-c.x * sin_az + c.y * cos_az);  // fold to front side

    LocalUePosition q;
    q.x = along;
    q.y = -site.height;
    q.z = across;
    q.range = std::sqrt(along * along + across * across + site.height * site.height);
    if (!(q.range > 0.0)) throw std::invalid_argument("degenerate geometry: UE at panel center");
    q.sin_psi = across / q.range;
    q.omega = std::atan2(across, along);  // in [0, pi] since across >= 0
    return q;
}

std::vector<std::vector<std::size_t>> serving_sets(const NetworkRealization& network,
                                                   const UeLayout& ues) {
    const std::size_t K = ues.count();
    std::vector<std::vector<std::size_t>> sets(K);
    if (K == 0) return sets;
    for (std::size_t l = 0; l < network.count(); ++l) {
        const BsSite& site = network.sites[l];
        std::size_t best = 0;
        double best_d2 = -1.0;
        for (std::size_t k = 0; k < K; ++k) {
            const double dx = ues.positions[k].x - site.center.x;
            const double dy = ues.positions[k].y - site.center.y;
            const double d2 = dx * dx + dy * dy + site.height * site.height;
            if (best_d2 < 0.0 || d2 < best_d2) {
                best_d2 = d2;
                best = k;
            }
        }
        sets[best].push_back(l);
    }
    return sets;
}

} // namespace rhs
