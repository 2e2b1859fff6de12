// Physical parameters and channel generation for a single problem instance,
// plus the achievable-rate expressions evaluated from beamformers.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "radmc/complex_linalg.hpp"

namespace radmc {

struct SystemParams {
    int antenna_count = 6;            // N
    double d_over_lambda = 0.5;       // half-wavelength array spacing
    double p_max = 1e-2;              // transmit power budget [W]
    double sigma2_r = 1e-13;          // R-user noise power [W] (-100 dBm)
    double sigma2_c = 1e-13;          // C-user noise power [W]
    double rate_multicast_min = 0.5;  // multicast rate requirement [bit/s/Hz]
    double mismatch_max = 0.1;        // beampattern mismatch tolerance, linear
    double l0_db = 40.0;              // path loss at 1 m reference [dB]
    double dist_r = 1000.0;           // BS to R-user distance [m]
    double dist_c = 100.0;            // BS to C-user distance [m]
    std::vector<double> theta_targets = {0.0};  // detection angles [rad]
    double beam_width = 10.0 * M_PI / 180.0;    // desired beam width [rad]
    std::uint64_t seed = 1;

    /// Throws std::invalid_argument when outside the documented domain.
    void validate() const;

    /// Multicast SINR threshold 2^Rmin - 1.
    double gamma_multicast() const { return std::exp2(rate_multicast_min) - 1.0; }
};

struct ChannelPair {
    ComplexVector h_r;  // BS -> R-user, LoS with path loss
    ComplexVector h_c;  // BS -> C-user, Rayleigh with path loss
    HermitianMatrix H_r{ComplexMatrix::Zero(1, 1)};  // h_r h_r^H
    HermitianMatrix H_c{ComplexMatrix::Zero(1, 1)};  // h_c h_c^H
};

struct BeamformerPair {
    ComplexVector w_m;
    ComplexVector w_u;
};

/// Deterministic, cross-platform random stream: raw mt19937_64 output mapped
/// to doubles in-house (standard-library distributions are not portable).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() {  // [0, 1)
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }
    double gaussian();
    /// Circularly symmetric complex gaussian CN(0, var).
    Complex cgaussian(double var);

  private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

ChannelPair generate_channels(const SystemParams& params, Rng& rng);

/// log2(1 + |h_c^H w_m|^2 / (|h_c^H w_u|^2 + sigma_c^2))
double rate_multicast_at_c(const BeamformerPair& bf, const ChannelPair& ch,
                           const SystemParams& params);
/// log2(1 + |h_c^H w_u|^2 / sigma_c^2), after SIC removed the multicast part
double rate_unicast(const BeamformerPair& bf, const ChannelPair& ch,
                    const SystemParams& params);
/// log2(1 + |h_r^H w_m|^2 / (|h_r^H w_u|^2 + sigma_r^2))
double rate_multicast_at_r(const BeamformerPair& bf, const ChannelPair& ch,
                           const SystemParams& params);
/// min of the two multicast rates
double rate_multicast(const BeamformerPair& bf, const ChannelPair& ch,
                      const SystemParams& params);

}  // namespace radmc
