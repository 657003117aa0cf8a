#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "rhs/beamforming.hpp"
#include "rhs/rng.hpp"

namespace {

using Catch::Approx;

struct Instance {
    rhs::ChannelStats stats;
    Eigen::VectorXd rho;
    rhs::HardwareQuality quality;
    double xi = 1.0;
    double noise = 1e-9;
};

// Channel statistics with amplitudes spread over several decades, so the
// identities are exercised far from friendly unit scales.
Instance random_instance(std::mt19937_64& rng, int num_bs, int num_ues) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Instance in;
    in.stats.h.resize(num_bs, num_ues);
    in.stats.q.resize(num_bs, num_ues);
    for (int l = 0; l < num_bs; ++l)
        for (int k = 0; k < num_ues; ++k) {
            const double scale = std::pow(10.0, -3.0 * unif(rng));
            const double phase = 2.0 * 3.141592653589793 * unif(rng);
            in.stats.h(l, k) = std::polar(scale, phase);
            in.stats.q(l, k) = scale * scale * (0.1 + 4.0 * unif(rng));
        }
    in.rho.resize(num_ues);
    for (int k = 0; k < num_ues; ++k) in.rho[k] = std::pow(10.0, 4.0 * unif(rng) - 2.0);
    in.quality = {0.5 + 0.5 * unif(rng), 0.5 + 0.5 * unif(rng)};
    in.xi = 0.3 + 0.7 * unif(rng);
    in.noise = std::pow(10.0, -2.0 * unif(rng));
    return in;
}

} // namespace

TEST_CASE("covariance splits between coherent and diffuse parts", "[beamforming]") {
    std::mt19937_64 rng = rhs::substream(21, 0);
    const Instance in = random_instance(rng, 4, 1);
    const Eigen::VectorXcd h = in.stats.h.col(0);
    const Eigen::VectorXd q = in.stats.q.col(0);

    const Eigen::MatrixXcd full = rhs::covariance(h, q, 1.0);
    CHECK((full - h * h.adjoint()).norm() < 1e-14 * full.norm());

    const Eigen::MatrixXcd diffuse = rhs::covariance(h, q, 0.0);
    CHECK((diffuse - Eigen::MatrixXcd(q.asDiagonal().toDenseMatrix().cast<std::complex<double>>()))
              .norm() < 1e-14 * diffuse.norm());

    const double x = 0.8;
    const Eigen::MatrixXcd c = rhs::covariance(h, q, x);
    CHECK((c - c.adjoint()).norm() < 1e-14 * c.norm());
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            std::complex<double> want = x * x * h[i] * std::conj(h[j]);
            if (i == j) want += (1.0 - x * x) * q[i];
            CHECK(std::abs(c(i, j) - want) < 1e-13 * std::abs(want) + 1e-280);
        }

    CHECK_THROWS_AS(rhs::covariance(h, q.head(3), 0.5), std::invalid_argument);
}

TEST_CASE("the combining matrix is the covariance mixture plus noise", "[beamforming]") {
    std::mt19937_64 rng = rhs::substream(21, 1);
    for (int rep = 0; rep < 10; ++rep) {
        const Instance in = random_instance(rng, 6, 3);
        const Eigen::MatrixXcd m =
            rhs::mmse_matrix(in.stats, in.rho, in.quality, in.xi, in.noise);

        Eigen::MatrixXcd want = Eigen::MatrixXcd::Zero(6, 6);
        for (int k = 0; k < 3; ++k) {
            const Eigen::MatrixXcd c =
                rhs::covariance(in.stats.h.col(k), in.stats.q.col(k), in.xi);
            want += in.rho[k] * (in.quality.eps_v * c +
                                 (1.0 - in.quality.eps_v) *
                                     Eigen::MatrixXcd(c.diagonal().asDiagonal()));
        }
        want += in.noise * Eigen::MatrixXcd::Identity(6, 6);
        CHECK((m - want).norm() < 1e-12 * want.norm());
    }
}

TEST_CASE("MMSE combiner solves against the channel means", "[beamforming]") {
    std::mt19937_64 rng = rhs::substream(21, 2);
    const Instance in = random_instance(rng, 8, 3);
    const Eigen::MatrixXcd m = rhs::mmse_matrix(in.stats, in.rho, in.quality, in.xi, in.noise);
    const Eigen::MatrixXcd b =
        rhs::mmse_combiner(in.stats, in.rho, in.quality, in.xi, in.noise);
    for (int k = 0; k < 3; ++k) {
        const double scale = in.rho[k] * in.quality.eps_u * in.quality.eps_v;
        const Eigen::VectorXcd residual = m * b.col(k) - scale * in.stats.h.col(k);
        CHECK(residual.norm() < 1e-9 * (scale * in.stats.h.col(k).norm()));
    }
}

TEST_CASE("an all-zero network has no MMSE solution", "[beamforming]") {
    rhs::ChannelStats stats;
    stats.h = Eigen::MatrixXcd::Zero(3, 1);
    stats.q = Eigen::MatrixXd::Zero(3, 1);
    const Eigen::VectorXd rho = Eigen::VectorXd::Constant(1, 1.0);
    CHECK_THROWS_AS(rhs::mmse_combiner(stats, rho, {}, 1.0, 0.0), std::runtime_error);
}

TEST_CASE("SINR ignores the combiner's scale and global phase", "[beamforming]") {
    std::mt19937_64 rng = rhs::substream(21, 3);
    const Instance in = random_instance(rng, 5, 2);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::VectorXcd b(5);
    for (int l = 0; l < 5; ++l) b[l] = std::complex<double>(unif(rng) - 0.5, unif(rng) - 0.5);

    const auto a = rhs::sinr_general(in.stats, b, 0, in.rho, in.quality, in.xi, in.noise);
    const auto c = rhs::sinr_general(in.stats, std::polar(2.5, 1.1) * b, 0, in.rho, in.quality,
                                     in.xi, in.noise);
    CHECK(a.sinr == Approx(c.sinr).epsilon(1e-12));
    CHECK(a.rate == Approx(c.rate).epsilon(1e-12));
}

TEST_CASE("the six denominator pieces add up exactly", "[beamforming]") {
    std::mt19937_64 rng = rhs::substream(21, 4);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        const Instance in = random_instance(rng, 6, 3);
        Eigen::VectorXcd b(6);
        for (int l = 0; l < 6; ++l) b[l] = std::complex<double>(unif(rng) - 0.5, unif(rng) - 0.5);
        const auto rep0 = rhs::sinr_general(in.stats, b, 1, in.rho, in.quality, in.xi, in.noise);

        CHECK(rep0.desired >= 0.0);
        CHECK(rep0.phase_noise >= 0.0);
        CHECK(rep0.ue_distortion >= 0.0);
        CHECK(rep0.bs_distortion >= 0.0);
        CHECK(rep0.inter_user >= 0.0);
        CHECK(rep0.noise == Approx(in.noise * b.squaredNorm()).epsilon(1e-12));

        const double denom = rep0.phase_noise + rep0.ue_distortion + rep0.bs_distortion +
                             rep0.inter_user + rep0.noise;
        CHECK(rep0.sinr == Approx(rep0.desired / denom).epsilon(1e-12));
        CHECK(rep0.rate == Approx(std::log2(1.0 + rep0.sinr)).epsilon(1e-12));
    }
}

TEST_CASE("no combiner beats the MMSE one", "[beamforming]") {
    std::mt19937_64 rng = rhs::substream(21, 5);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        const Instance in = random_instance(rng, 6, 2);
        const auto best = rhs::sinr_mmse(in.stats, in.rho, in.quality, in.xi, in.noise);
        for (int trial = 0; trial < 30; ++trial) {
            Eigen::VectorXcd b(6);
            for (int l = 0; l < 6; ++l)
                b[l] = std::complex<double>(unif(rng) - 0.5, unif(rng) - 0.5);
            for (int k = 0; k < 2; ++k) {
                const auto got =
                    rhs::sinr_general(in.stats, b, k, in.rho, in.quality, in.xi, in.noise);
                CHECK(got.sinr <= best[static_cast<std::size_t>(k)] * (1.0 + 1e-10));
            }
        }
    }
}

TEST_CASE("ideal single-user combining is matched filtering", "[beamforming]") {
    std::mt19937_64 rng = rhs::substream(21, 6);
    const Instance in = random_instance(rng, 4, 1);
    const double rho = 2.5, noise = 1e-5;
    const double want = rho * in.stats.h.col(0).squaredNorm() / noise;

    const double direct =
        rhs::sinr_single_user(in.stats.h.col(0), in.stats.q.col(0), rho, {}, 1.0, noise);
    CHECK(direct == Approx(want).epsilon(1e-12));

    const Eigen::VectorXd rho_vec = Eigen::VectorXd::Constant(1, rho);
    const auto via_mmse = rhs::sinr_mmse(in.stats, rho_vec, {}, 1.0, noise);
    CHECK(via_mmse[0] == Approx(want).epsilon(1e-9));
}

TEST_CASE("the explicit single-user sum matches the general machinery", "[beamforming]") {
    std::mt19937_64 rng = rhs::substream(21, 7);
    for (int rep = 0; rep < 25; ++rep) {
        const Instance in = random_instance(rng, 7, 1);
        const double a = rhs::sinr_single_user(in.stats.h.col(0), in.stats.q.col(0), in.rho[0],
                                               in.quality, in.xi, in.noise);
        const auto b = rhs::sinr_mmse(in.stats, in.rho, in.quality, in.xi, in.noise);
        CHECK(a == Approx(b[0]).epsilon(1e-10));
    }
}

TEST_CASE("MMSE SINR coincides with the report at the MMSE combiner", "[beamforming]") {
    std::mt19937_64 rng = rhs::substream(21, 8);
    for (int rep = 0; rep < 25; ++rep) {
        const Instance in = random_instance(rng, 6, 3);
        const auto closed = rhs::sinr_mmse(in.stats, in.rho, in.quality, in.xi, in.noise);
        const Eigen::MatrixXcd b =
            rhs::mmse_combiner(in.stats, in.rho, in.quality, in.xi, in.noise);
        for (int k = 0; k < 3; ++k) {
            const auto got =
                rhs::sinr_general(in.stats, b.col(k), k, in.rho, in.quality, in.xi, in.noise);
            CHECK(got.sinr == Approx(closed[static_cast<std::size_t>(k)]).epsilon(1e-10));
        }
    }
}

TEST_CASE("rank-one update identity", "[beamforming]") {
    std::mt19937_64 rng = rhs::substream(21, 9);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int rep = 0; rep < 25; ++rep) {
        const int n = 6;
        Eigen::MatrixXcd g(n, n);
        Eigen::VectorXcd h(n);
        for (int i = 0; i < n; ++i) {
            h[i] = std::complex<double>(unif(rng) - 0.5, unif(rng) - 0.5);
            for (int j = 0; j < n; ++j)
                g(i, j) = std::complex<double>(unif(rng) - 0.5, unif(rng) - 0.5);
        }
        const Eigen::MatrixXcd a =
            g * g.adjoint() + 0.1 * Eigen::MatrixXcd::Identity(n, n);
        const double c = 0.01 + 10.0 * unif(rng);

        const double s = h.dot(a.llt().solve(h)).real();
        const Eigen::MatrixXcd updated = a + c * (h * h.adjoint());
        const double lhs = h.dot(updated.llt().solve(h)).real();
        CHECK(lhs == Approx(s / (1.0 + c * s)).epsilon(1e-10));
    }
}

TEST_CASE("single-user SINR improves with hardware and phase fidelity", "[beamforming]") {
    std::mt19937_64 rng = rhs::substream(21, 10);
    const Instance in = random_instance(rng, 5, 1);
    const Eigen::VectorXcd h = in.stats.h.col(0);
    const Eigen::VectorXd q = in.stats.q.col(0);
    const double rho = 10.0, noise = 1e-8;

    double prev = -1.0;
    for (double x : {0.3, 0.6, 0.9, 1.0}) {
        const double s = rhs::sinr_single_user(h, q, rho, {0.9, 0.9}, x, noise);
        CHECK(s > prev);
        prev = s;
    }
    prev = -1.0;
    for (double eu : {0.5, 0.8, 0.95, 1.0}) {
        const double s = rhs::sinr_single_user(h, q, rho, {eu, 0.9}, 0.8, noise);
        CHECK(s > prev);
        prev = s;
    }
    prev = -1.0;
    for (double ev : {0.5, 0.8, 0.95, 1.0}) {
        const double s = rhs::sinr_single_user(h, q, rho, {0.9, ev}, 0.8, noise);
        CHECK(s > prev);
        prev = s;
    }
}

TEST_CASE("multi-user MMSE SINR is monotone in the UE quality", "[beamforming]") {
    // eps_u enters only the desired power, so the ordering is exact per user.
    std::mt19937_64 rng = rhs::substream(21, 11);
    const Instance in = random_instance(rng, 6, 3);
    std::vector<double> prev(3, -1.0);
    for (double eu : {0.4, 0.7, 0.9, 1.0}) {
        const auto s = rhs::sinr_mmse(in.stats, in.rho, {eu, in.quality.eps_v}, in.xi, in.noise);
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(s[k] > prev[k]);
            prev[k] = s[k];
        }
    }
}

TEST_CASE("degenerate SINRs are handled explicitly", "[beamforming]") {
    rhs::ChannelStats stats;
    stats.h = Eigen::MatrixXcd::Constant(2, 1, std::complex<double>(1.0, 0.0));
    stats.q = Eigen::MatrixXd::Zero(2, 1);
    const Eigen::VectorXd rho = Eigen::VectorXd::Constant(1, 1.0);
    const Eigen::VectorXcd b = Eigen::VectorXcd::Constant(2, std::complex<double>(1.0, 0.0));

    // Nonzero desired power over an exactly zero denominator.
    const auto inf_rep = rhs::sinr_general(stats, b, 0, rho, {}, 1.0, 0.0);
    CHECK(std::isinf(inf_rep.sinr));
    CHECK(std::isinf(inf_rep.rate));

    // Zero over zero reads as zero rate.
    stats.h.setZero();
    const auto zero_rep = rhs::sinr_general(stats, b, 0, rho, {}, 1.0, 0.0);
    CHECK(zero_rep.sinr == 0.0);
    CHECK(zero_rep.rate == 0.0);
}

TEST_CASE("input validation names the broken quantity", "[beamforming]") {
    std::mt19937_64 rng = rhs::substream(21, 12);
    const Instance in = random_instance(rng, 4, 2);
    const Eigen::VectorXcd b = Eigen::VectorXcd::Ones(4);

    Eigen::VectorXd bad_rho = Eigen::VectorXd::Ones(3);
    CHECK_THROWS_AS(rhs::mmse_matrix(in.stats, bad_rho, in.quality, in.xi, in.noise),
                    std::invalid_argument);
    CHECK_THROWS_AS(rhs::mmse_matrix(in.stats, in.rho, {1.5, 1.0}, in.xi, in.noise),
                    std::invalid_argument);
    CHECK_THROWS_AS(rhs::mmse_matrix(in.stats, in.rho, in.quality, 1.5, in.noise),
                    std::invalid_argument);
    CHECK_THROWS_AS(rhs::mmse_matrix(in.stats, in.rho, in.quality, in.xi, -1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(rhs::sinr_general(in.stats, b, 2, in.rho, in.quality, in.xi, in.noise),
                    std::invalid_argument);
    CHECK_THROWS_AS(rhs::sinr_general(in.stats, b.head(3), 0, in.rho, in.quality, in.xi,
                                      in.noise),
                    std::invalid_argument);

    rhs::ChannelStats mismatched = in.stats;
    mismatched.q = Eigen::MatrixXd::Ones(3, 2);
    CHECK_THROWS_AS(rhs::mmse_matrix(mismatched, in.rho, in.quality, in.xi, in.noise),
                    std::invalid_argument);
}
