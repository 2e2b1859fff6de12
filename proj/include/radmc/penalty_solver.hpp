// Double-layer penalty method with an inner successive-convex-approximation
// loop that drives a pair of lifted beamformer matrices to rank one, plus the
// NOMA transmission scheme built on it. The engine is generic over the linear
// constraint set so the benchmark schemes reuse it.
//
// The engine works in normalized units: matrix variables carry trace budgets
// of order one (physical covariances are P_max times the engine matrices) and
// channel quadratic forms are expressed in SNR units (scaled by P_max/sigma^2).
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "radmc/beampattern.hpp"
#include "radmc/complex_linalg.hpp"
#include "radmc/conic.hpp"
#include "radmc/scenario.hpp"

namespace radmc {

struct PenaltyConfig {
    double eta0 = 1e4;           // initial penalty factor
    double epsilon_scale = 0.5;  // outer-layer penalty shrink, in (0,1)
    double eps_inner = 1e-2;     // inner fractional-reduction threshold
    double eps_outer = 1e-5;     // rank-residual termination threshold
    int max_inner = 100;
    int max_outer = 80;

    void validate() const;
};

enum class SolveOutcome { kConverged, kMaxIterations, kInfeasibleInit };

/// Affine upper bound of -||W||_2 around an expansion point, tight there:
/// W -> -||W_at||_2 - <v v^H, W - W_at> with v the top eigenvector.
struct ScaLinearization {
    ComplexVector top_eigvec;
    double spectral_at_point = 0.0;  // ||W_at||_2
    double offset = 0.0;             // constant term of the affine map

    double evaluate(const HermitianMatrix& w) const {
        return offset - w.quad_form(top_eigvec);
    }
};

/// Requires W_at PSD (within tolerance). Degenerate top eigenvalues resolve
/// deterministically to the first eigenvector of the sorted decomposition.
ScaLinearization sca_linearize(const HermitianMatrix& w_at);

/// One Algorithm iterate, normalized units.
struct IterateState {
    HermitianMatrix W_m{ComplexMatrix::Zero(1, 1)};
    HermitianMatrix W_u{ComplexMatrix::Zero(1, 1)};
    HermitianMatrix R_1{ComplexMatrix::Zero(1, 1)};  // W_m + W_u (or the radar combination)
    double eta = 0.0;
    double inner_objective = 0.0;  // penalized objective at this iterate
    double rank_residual_m = 0.0;
    double rank_residual_u = 0.0;
};

struct OuterTraceEntry {
    double eta = 0.0;
    int inner_iterations = 0;
    double objective = 0.0;
    double rank_residual_m = 0.0;
    double rank_residual_u = 0.0;
    bool inner_stalled = false;
};

// ---- generic penalized rank-one SDP -------------------------------------

/// Tr(coeff_m W_m) + Tr(coeff_u W_u) >= rhs
struct LinearInequality {
    HermitianMatrix coeff_m;
    HermitianMatrix coeff_u;
    double rhs = 0.0;
};

/// coeff_m tr(W_m) + coeff_u tr(W_u) = rhs
struct TraceEquality {
    double coeff_m = 0.0;
    double coeff_u = 0.0;
    double rhs = 1.0;
};

/// || target - pattern(coeff_m W_m + coeff_u W_u) ||_2 <= bound on the grid.
struct RadarAccuracy {
    double coeff_m = 1.0;
    double coeff_u = 1.0;
    std::vector<double> target;  // delta* P*(theta_m), normalized
    const AngularGrid* grid = nullptr;
    double bound = 0.0;
};

struct RankOneSdpSpec {
    int antenna_count = 0;
    HermitianMatrix obj_m{ComplexMatrix::Zero(1, 1)};  // minimized linear part
    HermitianMatrix obj_u{ComplexMatrix::Zero(1, 1)};
    std::vector<LinearInequality> ineqs;
    std::vector<TraceEquality> eqs;
    std::optional<RadarAccuracy> radar;
};

class PenaltyEngine {
  public:
    PenaltyEngine(RankOneSdpSpec spec, PenaltyConfig config);

    /// Semidefinite relaxation (rank constraints dropped) under the true
    /// objective. nullopt when the constraint set is infeasible; throws on
    /// solver breakdown.
    std::optional<IterateState> initialize() const;

    struct InnerResult {
        IterateState state;
        int iterations = 0;
        bool stalled = false;  // hit max_inner before the threshold
    };
    /// Full inner SCA loop at state.eta, starting from state.
    InnerResult inner_pass(const IterateState& state) const;

    struct Result {
        SolveOutcome status = SolveOutcome::kMaxIterations;
        IterateState final_state;
        std::vector<OuterTraceEntry> trace;
        bool any_inner_stall = false;
    };
    /// The double-layer algorithm: relaxation start, alternate inner passes
    /// with eta <- epsilon * eta until both rank residuals fall below
    /// eps_outer.
    Result run() const;

    /// Feasibility probe: relaxation only, no penalty refinement.
    bool relaxation_feasible() const;

    /// True penalized objective at a point (linear part + rank penalty / eta).
    double penalized_objective(const HermitianMatrix& w_m, const HermitianMatrix& w_u,
                               double eta) const;

    const RankOneSdpSpec& spec() const { return spec_; }
    const PenaltyConfig& config() const { return config_; }

  private:
    conic::ConicSolution solve_subproblem(const RealVector& cost) const;
    RealVector objective_coeffs(const HermitianMatrix& cost_m,
                                const HermitianMatrix& cost_u) const;
    IterateState state_from(const RealVector& x, double eta) const;

    RankOneSdpSpec spec_;
    PenaltyConfig config_;
    conic::ConicProblem base_;  // all constraints; objective filled per solve
};

/// Rank-one factor w with W ~ w w^H. Requires the rank residual of W to be
/// below tol * max(1, trace(W)); throws std::domain_error otherwise.
ComplexVector extract(const HermitianMatrix& w, double tol);

// ---- NOMA scheme ---------------------------------------------------------

struct SolveReport {
    SolveOutcome status = SolveOutcome::kInfeasibleInit;
    BeamformerPair beamformers;      // physical units
    double rate_unicast = 0.0;       // bit/s/Hz
    double rate_multicast = 0.0;     // bit/s/Hz
    double mismatch_ratio = 0.0;     // (Delta(R1, delta*) - Delta0) / Delta0
    HermitianMatrix covariance{ComplexMatrix::Zero(1, 1)};  // physical R_1
    std::vector<OuterTraceEntry> trace;
    bool any_inner_stall = false;
};

/// Unicast-rate maximization with SIC at the C-user, multicast rate and
/// beampattern-accuracy constraints. mismatch_max = infinity drops the radar
/// constraint.
RankOneSdpSpec make_noma_spec(const SystemParams& params, const ChannelPair& ch,
                              const IdealPatternSolution& ideal, const AngularGrid& grid,
                              const DesiredPattern& desired);

SolveReport solve_noma(const SystemParams& params, const ChannelPair& ch,
                       const IdealPatternSolution& ideal, const AngularGrid& grid,
                       const DesiredPattern& desired, const PenaltyConfig& config);

}  // namespace radmc
