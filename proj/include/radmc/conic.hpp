// Canonical mixed-cone convex program (linear objective; affine equality and
// inequality constraints, second-order-cone and PSD constraints over real
// variables) and a dense primal-dual interior-point solver for it.
#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace radmc::conic {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// || U x + u0 ||_2 <= t . x + t0
struct SocConstraint {
    MatrixXd U;
    VectorXd u0;
    VectorXd t;
    double t0 = 0.0;
};

/// F0 + sum_i x_i F[i] required positive semidefinite (all F symmetric).
struct PsdConstraint {
    int dim = 0;
    MatrixXd F0;
    std::vector<MatrixXd> F;
};

struct ConicProblem {
    VectorXd c;   // minimize c . x
    MatrixXd A;   // A x = b
    VectorXd b;
    MatrixXd D;   // D x + d >= 0 elementwise
    VectorXd d;
    std::vector<SocConstraint> socs;
    std::vector<PsdConstraint> psds;

    int num_vars() const { return static_cast<int>(c.size()); }
    /// Throws std::invalid_argument on dimension mismatch or non-finite data.
    void validate() const;
};

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kMaxIterations };

std::string status_name(SolveStatus s);

struct Residuals {
    double eq = 0.0;
    double ineq = 0.0;
    double soc = 0.0;
    double psd = 0.0;
    double max() const;
};

struct ConicSolution {
    VectorXd x;
    SolveStatus status = SolveStatus::kMaxIterations;
    double objective = 0.0;
    Residuals residuals;      // primal feasibility violations of x
    double duality_gap = 0.0;
    int iterations = 0;
    /// Residual of the Farkas-type certificate backing an infeasible (or
    /// unbounded) verdict; meaningful only for those statuses.
    double certificate_residual = 0.0;
};

struct SolveOptions {
    double abs_tol = 1e-8;
    double rel_tol = 1e-7;
    double feas_tol = 1e-8;
    int max_iterations = 200;
    bool verbose = false;
};

/// Solves the problem with a Nesterov-Todd scaled primal-dual interior-point
/// method on the homogeneous self-dual embedding. Pure function; safe to run
/// concurrently on independent problems.
ConicSolution solve(const ConicProblem& problem, const SolveOptions& options = {});

/// Plain-text dump (one constraint per line, dense coefficients) for
/// cross-checking small instances against external solvers.
void dump(const ConicProblem& problem, std::ostream& os);

}  // namespace radmc::conic
