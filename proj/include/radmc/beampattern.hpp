// Steering vectors, desired/ideal beampattern construction and the
// beampattern error functional used by the radar accuracy constraint.
#pragma once

#include <vector>

#include "radmc/complex_linalg.hpp"

namespace radmc {

/// Uniform angular grid over [-pi/2, pi/2] with precomputed steering vectors.
class AngularGrid {
  public:
    /// Uniform grid of `points` angles spanning [lo, hi] inclusive.
    AngularGrid(int antenna_count, double d_over_lambda, int points = 181,
                double lo = -M_PI / 2, double hi = M_PI / 2);

    int size() const { return static_cast<int>(angles_.size()); }
    double angle(int i) const { return angles_[i]; }
    const std::vector<double>& angles() const { return angles_; }
    const ComplexVector& steering(int i) const { return steering_[i]; }

  private:
    std::vector<double> angles_;
    std::vector<ComplexVector> steering_;
};

/// Desired gains on the grid (1 inside detection beams, 0 elsewhere).
struct DesiredPattern {
    std::vector<double> gains;
};

struct IdealPatternSolution {
    HermitianMatrix R0;       // radar-only covariance, diag = P_max/N
    double delta_star = 0.0;  // optimal pattern scaling
    double delta0 = 0.0;      // minimum pattern error achieved by R0
};

/// Steering vector entry k = exp(j 2 pi d/lambda k sin(theta)), k = 0..N-1.
ComplexVector steering_vector(double theta, int antenna_count, double d_over_lambda);

/// alpha(theta)^H R alpha(theta) (real for Hermitian R).
double pattern_gain(const HermitianMatrix& r, const ComplexVector& steering);

/// Gain 1 on every grid angle within +-beam_width/2 of a target, else 0.
DesiredPattern desired_pattern(const AngularGrid& grid,
                               const std::vector<double>& theta_targets,
                               double beam_width);

/// sum_m | delta P*(theta_m) - alpha_m^H R alpha_m |^2
double pattern_error(const HermitianMatrix& r, double delta, const AngularGrid& grid,
                     const DesiredPattern& desired);

/// Jointly optimal (R0, delta) of the convex least-squares matching problem
/// with fixed per-antenna power diag(R0) = P_max/N, R0 PSD, delta >= 0.
/// Throws std::runtime_error if the conic solver fails.
IdealPatternSolution solve_ideal_pattern(int antenna_count, double p_max,
                                         const AngularGrid& grid,
                                         const DesiredPattern& desired);

}  // namespace radmc
