#include "radmc/beampattern.hpp"

#include <cmath>
#include <stdexcept>

#include "radmc/herm_param.hpp"

namespace radmc {

AngularGrid::AngularGrid(int antenna_count, double d_over_lambda, int points,
                         double lo, double hi) {
    if (points < 2 || lo >= hi || lo < -M_PI / 2 - 1e-12 || hi > M_PI / 2 + 1e-12) {
        throw std::invalid_argument("AngularGrid: need >= 2 points within [-pi/2, pi/2]");
    }
    angles_.resize(points);
    steering_.resize(points);
    for (int i = 0; i < points; ++i) {
        angles_[i] = lo + (hi - lo) * i / (points - 1);
        steering_[i] = steering_vector(angles_[i], antenna_count, d_over_lambda);
    }
}

ComplexVector steering_vector(double theta, int antenna_count, double d_over_lambda) {
    if (theta < -M_PI / 2 - 1e-12 || theta > M_PI / 2 + 1e-12) {
        throw std::invalid_argument("steering_vector: angle outside [-pi/2, pi/2]");
    }
    ComplexVector a(antenna_count);
    const double phase = 2.0 * M_PI * d_over_lambda * std::sin(theta);
    for (int k = 0; k < antenna_count; ++k) {
        a(k) = std::polar(1.0, phase * k);
    }
    return a;
}

double pattern_gain(const HermitianMatrix& r, const ComplexVector& steering) {
    return r.quad_form(steering);
}

DesiredPattern desired_pattern(const AngularGrid& grid,
                               const std::vector<double>& theta_targets,
                               double beam_width) {
    DesiredPattern p;
    p.gains.assign(grid.size(), 0.0);
    for (int m = 0; m < grid.size(); ++m) {
        for (double t : theta_targets) {
            if (std::abs(grid.angle(m) - t) <= beam_width / 2.0 + 1e-12) {
                p.gains[m] = 1.0;
                break;
            }
        }
    }
    return p;
}

double pattern_error(const HermitianMatrix& r, double delta, const AngularGrid& grid,
                     const DesiredPattern& desired) {
    double err = 0.0;
    for (int m = 0; m < grid.size(); ++m) {
        const double e = delta * desired.gains[m] - pattern_gain(r, grid.steering(m));
        err += e * e;
    }
    return err;
}

IdealPatternSolution solve_ideal_pattern(int antenna_count, double p_max,
                                         const AngularGrid& grid,
                                         const DesiredPattern& desired) {
    const int n = antenna_count;
    const int np = herm_param_dim(n);
    const int nv = np + 2;  // [R0 params, delta, epigraph t], power-normalized
    const int id_delta = np;
    const int id_t = np + 1;
    const int m = grid.size();

    conic::ConicProblem pr;
    pr.c = RealVector::Zero(nv);
    pr.c(id_t) = 1.0;

    // fixed per-antenna power: diag(R0) = 1/N
    pr.A = RealMatrix::Zero(n, nv);
    pr.b = RealVector::Constant(n, 1.0 / n);
    for (int i = 0; i < n; ++i) {
        pr.A(i, i) = 1.0;
    }

    // delta >= 0
    pr.D = RealMatrix::Zero(1, nv);
    pr.D(0, id_delta) = 1.0;
    pr.d = RealVector::Zero(1);

    // || delta P* - pattern(R0) || <= t
    conic::SocConstraint soc;
    soc.U = RealMatrix::Zero(m, nv);
    soc.u0 = RealVector::Zero(m);
    soc.t = RealVector::Zero(nv);
    soc.t(id_t) = 1.0;
    soc.t0 = 0.0;
    for (int i = 0; i < m; ++i) {
        const RealVector gain = herm_trace_coeffs(HermitianMatrix::Outer(grid.steering(i)));
        soc.U.block(i, 0, 1, np) = -gain.transpose();
        soc.U(i, id_delta) = desired.gains[i];
    }
    pr.socs.push_back(soc);

    pr.psds.push_back(herm_psd_constraint(n, 0, nv));

    conic::SolveOptions opt;
    const conic::ConicSolution s = conic::solve(pr, opt);
    if (s.status != conic::SolveStatus::kOptimal) {
        throw std::runtime_error("solve_ideal_pattern: conic solver returned " +
                                 conic::status_name(s.status) + " after " +
                                 std::to_string(s.iterations) + " iterations");
    }

    IdealPatternSolution out{herm_from_params(s.x, 0, n) * p_max,
                             s.x(id_delta) * p_max, 0.0};
    out.delta0 = pattern_error(out.R0, out.delta_star, grid, desired);
    return out;
}

}  // namespace radmc
