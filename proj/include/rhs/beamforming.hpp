#pragma once

// CPU-side combining and SINR evaluation. Channels enter through their
// second-order statistics: the deterministic mean profile (per BS, per UE)
// and the per-BS sum of squared element amplitudes. With phase errors of
// mean resultant xi, user k's channel covariance at the CPU is
//   C_k = xi^2 * h_k h_k^H + (1 - xi^2) * diag(q_k),
// and every quantity below is an explicit function of (h, q, xi).

#include <Eigen/Dense>
#include <vector>

#include "rhs/channel.hpp"
#include "rhs/geometry.hpp"
#include "rhs/impairments.hpp"

namespace rhs {

struct ChannelStats {
    Eigen::MatrixXcd h;  // L x K mean channel, column k for user k
    Eigen::MatrixXd q;   // L x K per-BS sums of squared element amplitudes

    int num_bs() const { return static_cast<int>(h.rows()); }
    int num_ues() const { return static_cast<int>(h.cols()); }
};

// Element configuration that cophases the surface toward a UE: the negated
// propagation phase, so the aggregate collapses to the plain amplitude sum.
std::vector<double> holographic_phases(const SurfaceGeometry& geom, const LocalUePosition& q,
                                       double wavelength,
                                       Wavefront wavefront = Wavefront::spherical);

Eigen::MatrixXcd covariance(const Eigen::VectorXcd& h_mean, const Eigen::VectorXd& q,
                            double xi);

// Interference-plus-noise Gram matrix shared by all users:
//   M = sum_k rho_k (eps_v C_k + (1 - eps_v) C_k o I) + noise_power I.
Eigen::MatrixXcd mmse_matrix(const ChannelStats& stats, const Eigen::VectorXd& rho,
                             const HardwareQuality& quality, double xi, double noise_power);

// Columns are the MMSE combiners b_k = rho_k eps_u eps_v M^{-1} h_k.
Eigen::MatrixXcd mmse_combiner(const ChannelStats& stats, const Eigen::VectorXd& rho,
                               const HardwareQuality& quality, double xi, double noise_power);

struct SinrReport {
    double sinr = 0.0;
    double rate = 0.0;           // log2(1 + sinr)
    double desired = 0.0;        // rho_k eps_u eps_v xi^2 |b^H h_k|^2
    double phase_noise = 0.0;    // power scattered off the mean by phase errors
    double ue_distortion = 0.0;  // transmit-side hardware distortion
    double bs_distortion = 0.0;  // receive-side hardware distortion
    double inter_user = 0.0;     // other users, both signal and distortion parts
    double noise = 0.0;          // noise_power * |b|^2
};

// SINR of user k under an arbitrary combiner b, with the denominator split
// into its physical contributions (the five non-desired terms plus noise sum
// exactly to the denominator).
SinrReport sinr_general(const ChannelStats& stats, const Eigen::VectorXcd& b, int k,
                        const Eigen::VectorXd& rho, const HardwareQuality& quality, double xi,
                        double noise_power);

// Closed-form per-user SINR under MMSE combining, evaluated from one Cholesky
// factorization of M. Equals sinr_general at the MMSE combiner.
std::vector<double> sinr_mmse(const ChannelStats& stats, const Eigen::VectorXd& rho,
                              const HardwareQuality& quality, double xi, double noise_power);

// Single-user MMSE SINR as an explicit per-BS sum. With one UE every
// off-diagonal of M except the coherent rank-one part vanishes, so
//   s = sum_l |h_l|^2 / (rho (1-ev) xi^2 |h_l|^2 + rho (1-xi^2) q_l + noise),
//   sinr = rho eu ev xi^2 s / (1 + rho (1-eu) ev xi^2 s).
// Agrees with sinr_mmse for K = 1 to rounding error.
double sinr_single_user(const Eigen::VectorXcd& h_mean, const Eigen::VectorXd& q, double rho,
                        const HardwareQuality& quality, double xi, double noise_power);

} // namespace rhs
