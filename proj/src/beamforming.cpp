#include "rhs/beamforming.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rhs {

namespace {

void check_inputs(const ChannelStats& stats, const Eigen::VectorXd& rho,
                  const HardwareQuality& quality, double xi, double noise_power) {
    if (stats.h.rows() != stats.q.rows() || stats.h.cols() != stats.q.cols())
        throw std::invalid_argument("channel stats: mean and power shapes differ");
    if (stats.num_bs() < 1 || stats.num_ues() < 1)
        throw std::invalid_argument("channel stats: need at least one BS and one UE");
    if (rho.size() != stats.num_ues())
        throw std::invalid_argument("transmit power vector length differs from UE count");
    if ((rho.array() < 0.0).any())
        throw std::invalid_argument("transmit powers must be nonnegative");
    if (quality.eps_u < 0.0 || quality.eps_u > 1.0 || quality.eps_v < 0.0 || quality.eps_v > 1.0)
        throw std::invalid_argument("hardware quality factors must lie in [0, 1]");
    if (xi < 0.0 || xi > 1.0)
        throw std::invalid_argument("mean resultant length must lie in [0, 1]");
    if (noise_power < 0.0) throw std::invalid_argument("noise power must be nonnegative");
}

} // namespace

std::vector<double> holographic_phases(const SurfaceGeometry& geom, const LocalUePosition& q,
                                       double wavelength, Wavefront wavefront) {
    std::vector<double> phases = propagation_phases(geom, q, wavelength, wavefront);
    for (double& p : phases) p = -p;
    return phases;
}

Eigen::MatrixXcd covariance(const Eigen::VectorXcd& h_mean, const Eigen::VectorXd& q,
                            double xi) {
    if (h_mean.size() != q.size())
        throw std::invalid_argument("covariance: mean and power lengths differ");
    const double x2 = xi * xi;
    Eigen::MatrixXcd c = x2 * (h_mean * h_mean.adjoint());
    c.diagonal() += ((1.0 - x2) * q).cast<std::complex<double>>();
    return c;
}

Eigen::MatrixXcd mmse_matrix(const ChannelStats& stats, const Eigen::VectorXd& rho,
                             const HardwareQuality& quality, double xi, double noise_power) {
    check_inputs(stats, rho, quality, xi, noise_power);
    const int num_bs = stats.num_bs();
    const double x2 = xi * xi;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(num_bs, num_bs);
    Eigen::VectorXd diag = Eigen::VectorXd::Constant(num_bs, noise_power);
    for (int k = 0; k < stats.num_ues(); ++k) {
        m.noalias() += (rho[k] * quality.eps_v * x2) * (stats.h.col(k) * stats.h.col(k).adjoint());
        diag += rho[k] * ((1.0 - quality.eps_v) * x2 * stats.h.col(k).cwiseAbs2() +
                          (1.0 - x2) * stats.q.col(k));
    }
    m.diagonal() += diag.cast<std::complex<double>>();
    return m;
}

Eigen::MatrixXcd mmse_combiner(const ChannelStats& stats, const Eigen::VectorXd& rho,
                               const HardwareQuality& quality, double xi, double noise_power) {
    const Eigen::MatrixXcd m = mmse_matrix(stats, rho, quality, xi, noise_power);
    Eigen::LLT<Eigen::MatrixXcd> llt(m);
    if (llt.info() != Eigen::Success) throw std::runtime_error("singular MMSE matrix");
    Eigen::MatrixXcd b = llt.solve(stats.h);
    for (int k = 0; k < stats.num_ues(); ++k)
        b.col(k) *= rho[k] * quality.eps_u * quality.eps_v;
    return b;
}

SinrReport sinr_general(const ChannelStats& stats, const Eigen::VectorXcd& b, int k,
                        const Eigen::VectorXd& rho, const HardwareQuality& quality, double xi,
                        double noise_power) {
    check_inputs(stats, rho, quality, xi, noise_power);
    if (k < 0 || k >= stats.num_ues()) throw std::invalid_argument("user index out of range");
    if (b.size() != stats.num_bs())
        throw std::invalid_argument("combiner length differs from BS count");

    const double x2 = xi * xi;
    const Eigen::VectorXd b2 = b.cwiseAbs2();
    const double eu = quality.eps_u;
    const double ev = quality.eps_v;

    SinrReport rep;
    rep.noise = noise_power * b2.sum();
    for (int j = 0; j < stats.num_ues(); ++j) {
        const double coh = std::norm(b.dot(stats.h.col(j)));  // |b^H h_j|^2
        const double qpart = b2.dot(stats.q.col(j));
        const double full = x2 * coh + (1.0 - x2) * qpart;            // b^H C_j b
        const double diag = x2 * b2.dot(stats.h.col(j).cwiseAbs2()) +  // b^H (C_j o I) b
                            (1.0 - x2) * qpart;
        if (j == k) {
            rep.desired = rho[k] * eu * ev * x2 * coh;
            rep.phase_noise = rho[k] * eu * ev * (1.0 - x2) * qpart;
            rep.ue_distortion = rho[k] * (1.0 - eu) * ev * full;
            rep.bs_distortion = rho[k] * (1.0 - ev) * diag;
        } else {
            rep.inter_user += rho[j] * (ev * full + (1.0 - ev) * diag);
        }
    }
    const double denom =
        rep.phase_noise + rep.ue_distortion + rep.bs_distortion + rep.inter_user + rep.noise;
    if (denom > 0.0)
        rep.sinr = rep.desired / denom;
    else
        rep.sinr = rep.desired > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    rep.rate = std::log2(1.0 + rep.sinr);
    return rep;
}

std::vector<double> sinr_mmse(const ChannelStats& stats, const Eigen::VectorXd& rho,
                              const HardwareQuality& quality, double xi, double noise_power) {
    const Eigen::MatrixXcd m = mmse_matrix(stats, rho, quality, xi, noise_power);
    Eigen::LLT<Eigen::MatrixXcd> llt(m);
    if (llt.info() != Eigen::Success) throw std::runtime_error("singular MMSE matrix");
    const Eigen::MatrixXcd x = llt.solve(stats.h);

    std::vector<double> out(static_cast<size_t>(stats.num_ues()));
    const double x2 = xi * xi;
    for (int k = 0; k < stats.num_ues(); ++k) {
        // s = h_k^H M^{-1} h_k; removing user k's own coherent part from M by a
        // rank-one downdate turns the SINR into c s / (1 - c s).
        const double s = x.col(k).dot(stats.h.col(k)).real();
        const double c = rho[k] * quality.eps_u * quality.eps_v * x2;
        const double den = 1.0 - c * s;
        out[static_cast<size_t>(k)] =
            den > 0.0 ? c * s / den : std::numeric_limits<double>::infinity();
    }
    return out;
}

double sinr_single_user(const Eigen::VectorXcd& h_mean, const Eigen::VectorXd& q, double rho,
                        const HardwareQuality& quality, double xi, double noise_power) {
    if (h_mean.size() != q.size())
        throw std::invalid_argument("channel stats: mean and power lengths differ");
    const double x2 = xi * xi;
    const double eu = quality.eps_u;
    const double ev = quality.eps_v;
    double s = 0.0;
    for (Eigen::Index l = 0; l < h_mean.size(); ++l) {
        const double p = std::norm(h_mean[l]);
        const double den = rho * (1.0 - ev) * x2 * p + rho * (1.0 - x2) * q[l] + noise_power;
        if (den > 0.0) s += p / den;
    }
    const double c = rho * eu * ev * x2;
    const double growth = 1.0 + rho * (1.0 - eu) * ev * x2 * s;
    return c * s / growth;
}

} // namespace rhs
