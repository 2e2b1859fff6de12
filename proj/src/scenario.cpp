#include "radmc/scenario.hpp"

#include <cmath>
#include <stdexcept>

#include "radmc/beampattern.hpp"

namespace radmc {

void SystemParams::validate() const {
    if (antenna_count < 2) throw std::invalid_argument("SystemParams: N >= 2 required");
    if (p_max <= 0.0) throw std::invalid_argument("SystemParams: P_max must be positive");
    if (sigma2_r <= 0.0 || sigma2_c <= 0.0) {
        throw std::invalid_argument("SystemParams: noise powers must be positive");
    }
    if (rate_multicast_min < 0.0) {
        throw std::invalid_argument("SystemParams: multicast rate requirement < 0");
    }
    if (mismatch_max < 0.0) {
        throw std::invalid_argument("SystemParams: mismatch tolerance < 0");
    }
    if (dist_r <= 0.0 || dist_c <= 0.0) {
        throw std::invalid_argument("SystemParams: distances must be positive");
    }
    for (double t : theta_targets) {
        if (t <= -M_PI / 2 || t >= M_PI / 2) {
            throw std::invalid_argument("SystemParams: target angle outside (-pi/2, pi/2)");
        }
    }
}

double Rng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // Box-Muller on in-house uniforms keeps the stream reproducible across
    // standard libraries.
    double u1 = uniform();
    while (u1 <= 0.0) {
        u1 = uniform();
    }
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
}

Complex Rng::cgaussian(double var) {
    const double s = std::sqrt(var / 2.0);
    return {s * gaussian(), s * gaussian()};
}

ChannelPair generate_channels(const SystemParams& params, Rng& rng) {
    params.validate();
    if (params.theta_targets.empty()) {
        throw std::invalid_argument("generate_channels: no target angle configured");
    }
    const int n = params.antenna_count;

    // LoS toward the first detection angle, L_R = L0 + 20 log10(d_R)
    const double loss_r_db = params.l0_db + 20.0 * std::log10(params.dist_r);
    ChannelPair ch;
    ch.h_r = std::sqrt(std::pow(10.0, -loss_r_db / 10.0)) *
             steering_vector(params.theta_targets.front(), n, params.d_over_lambda);

    // Rayleigh with L_C = L0 + 30 log10(d_C)
    const double loss_c_db = params.l0_db + 30.0 * std::log10(params.dist_c);
    const double var_c = std::pow(10.0, -loss_c_db / 10.0);
    ch.h_c = ComplexVector(n);
    for (int i = 0; i < n; ++i) {
        ch.h_c(i) = rng.cgaussian(var_c);
    }

    ch.H_r = HermitianMatrix::Outer(ch.h_r);
    ch.H_c = HermitianMatrix::Outer(ch.h_c);
    return ch;
}

namespace {
double received_power(const ComplexVector& h, const ComplexVector& w) {
    return std::norm((h.adjoint() * w).value());
}
}  // namespace

double rate_multicast_at_c(const BeamformerPair& bf, const ChannelPair& ch,
                           const SystemParams& params) {
    const double sig = received_power(ch.h_c, bf.w_m);
    const double interf = received_power(ch.h_c, bf.w_u);
    return std::log2(1.0 + sig / (interf + params.sigma2_c));
}

double rate_unicast(const BeamformerPair& bf, const ChannelPair& ch,
                    const SystemParams& params) {
    return std::log2(1.0 + received_power(ch.h_c, bf.w_u) / params.sigma2_c);
}

double rate_multicast_at_r(const BeamformerPair& bf, const ChannelPair& ch,
                           const SystemParams& params) {
    const double sig = received_power(ch.h_r, bf.w_m);
    const double interf = received_power(ch.h_r, bf.w_u);
    return std::log2(1.0 + sig / (interf + params.sigma2_r));
}

double rate_multicast(const BeamformerPair& bf, const ChannelPair& ch,
                      const SystemParams& params) {
    return std::min(rate_multicast_at_c(bf, ch, params),
                    rate_multicast_at_r(bf, ch, params));
}

}  // namespace radmc
