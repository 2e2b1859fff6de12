#include "radmc/conic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace radmc::conic {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kSqrt2 = std::sqrt(2.0);

int svec_dim(int p) { return p * (p + 1) / 2; }

// Symmetric matrix <-> scaled vector (off-diagonals times sqrt(2)) so that
// the Euclidean inner product of svecs equals the trace inner product.
void svec_into(const MatrixXd& x, double* out) {
    const int p = static_cast<int>(x.rows());
    int k = 0;
    for (int j = 0; j < p; ++j) {
        for (int i = 0; i <= j; ++i) {
            out[k++] = (i == j) ? x(i, i) : kSqrt2 * 0.5 * (x(i, j) + x(j, i));
        }
    }
}

MatrixXd unsvec(const double* v, int p) {
    MatrixXd x(p, p);
    int k = 0;
    for (int j = 0; j < p; ++j) {
        for (int i = 0; i <= j; ++i) {
            if (i == j) {
                x(i, i) = v[k];
            } else {
                x(i, j) = v[k] / kSqrt2;
                x(j, i) = x(i, j);
            }
            ++k;
        }
    }
    return x;
}

// Cone layout of the slack vector: [nonneg orthant | SOC blocks | PSD blocks].
struct ConeLayout {
    int lp = 0;
    std::vector<int> soc;       // block dimensions
    std::vector<int> psd;       // matrix dimensions
    std::vector<int> soc_off;   // offsets into the slack vector
    std::vector<int> psd_off;
    int m = 0;
    double degree = 0.0;

    void finalize() {
        int off = lp;
        degree = lp;
        for (int q : soc) {
            soc_off.push_back(off);
            off += q;
            degree += 1.0;
        }
        for (int p : psd) {
            psd_off.push_back(off);
            off += svec_dim(p);
            degree += p;
        }
        m = off;
    }
};

struct SocScale {
    double eta = 1.0;
    VectorXd wbar;  // wbar' J wbar = 1
};

struct PsdScale {
    MatrixXd R;
    MatrixXd Rinv;
    VectorXd sigma;
};

// Nesterov-Todd scaling W with lambda = W z = W^{-T} s.
struct Scaling {
    VectorXd w_lp;
    std::vector<SocScale> socs;
    std::vector<PsdScale> psds;
    VectorXd lambda;
};

Scaling identity_scaling(const ConeLayout& cl) {
    Scaling sc;
    sc.w_lp = VectorXd::Ones(cl.lp);
    for (int q : cl.soc) {
        SocScale s;
        s.wbar = VectorXd::Zero(q);
        s.wbar(0) = 1.0;
        sc.socs.push_back(std::move(s));
    }
    for (int p : cl.psd) {
        PsdScale s;
        s.R = MatrixXd::Identity(p, p);
        s.Rinv = MatrixXd::Identity(p, p);
        s.sigma = VectorXd::Ones(p);
        sc.psds.push_back(std::move(s));
    }
    sc.lambda = VectorXd::Ones(cl.m);  // placeholder, unused for init solves
    return sc;
}

Scaling compute_scaling(const ConeLayout& cl, const VectorXd& s, const VectorXd& z) {
    Scaling sc;
    sc.lambda = VectorXd::Zero(cl.m);
    sc.w_lp = VectorXd(cl.lp);
    for (int i = 0; i < cl.lp; ++i) {
        sc.w_lp(i) = std::sqrt(s(i) / z(i));
        sc.lambda(i) = std::sqrt(s(i) * z(i));
    }
    for (size_t k = 0; k < cl.soc.size(); ++k) {
        const int q = cl.soc[k];
        const int o = cl.soc_off[k];
        const VectorXd sb = s.segment(o, q);
        const VectorXd zb = z.segment(o, q);
        const double res_s = sb(0) * sb(0) - sb.tail(q - 1).squaredNorm();
        const double res_z = zb(0) * zb(0) - zb.tail(q - 1).squaredNorm();
        const VectorXd sn = sb / std::sqrt(res_s);
        const VectorXd zn = zb / std::sqrt(res_z);
        const double gamma = std::sqrt((1.0 + sn.dot(zn)) / 2.0);
        SocScale ss;
        ss.eta = std::pow(res_s / res_z, 0.25);
        ss.wbar = VectorXd(q);
        ss.wbar(0) = (sn(0) + zn(0)) / (2.0 * gamma);
        ss.wbar.tail(q - 1) = (sn.tail(q - 1) - zn.tail(q - 1)) / (2.0 * gamma);
        // lambda = W z
        const double wz0 = ss.wbar(0) * zb(0) + ss.wbar.tail(q - 1).dot(zb.tail(q - 1));
        sc.lambda(o) = ss.eta * wz0;
        sc.lambda.segment(o + 1, q - 1) =
            ss.eta * (zb(0) * ss.wbar.tail(q - 1) + zb.tail(q - 1) +
                      (ss.wbar.tail(q - 1).dot(zb.tail(q - 1)) / (1.0 + ss.wbar(0))) *
                          ss.wbar.tail(q - 1));
        sc.socs.push_back(std::move(ss));
    }
    for (size_t k = 0; k < cl.psd.size(); ++k) {
        const int p = cl.psd[k];
        const int o = cl.psd_off[k];
        const MatrixXd S = unsvec(s.data() + o, p);
        const MatrixXd Z = unsvec(z.data() + o, p);
        Eigen::LLT<MatrixXd> llt_s(S), llt_z(Z);
        if (llt_s.info() != Eigen::Success || llt_z.info() != Eigen::Success) {
            throw std::runtime_error("conic: PSD iterate left the cone interior");
        }
        const MatrixXd Ls = llt_s.matrixL();
        const MatrixXd Lz = llt_z.matrixL();
        Eigen::JacobiSVD<MatrixXd> svd(Lz.transpose() * Ls,
                                       Eigen::ComputeThinU | Eigen::ComputeThinV);
        PsdScale ps;
        ps.sigma = svd.singularValues();
        const VectorXd sig_isqrt = ps.sigma.cwiseSqrt().cwiseInverse();
        ps.R = Ls * svd.matrixV() * sig_isqrt.asDiagonal();
        ps.Rinv = sig_isqrt.asDiagonal() * svd.matrixU().transpose() * Lz.transpose();
        svec_into(MatrixXd(ps.sigma.asDiagonal()), sc.lambda.data() + o);
        sc.psds.push_back(std::move(ps));
    }
    return sc;
}

enum class ScaleOp { kW, kWt, kWinv, kWinvt };

// Applies the NT scaling operator (or its transpose / inverse) blockwise.
VectorXd apply_scaling(const ConeLayout& cl, const Scaling& sc, ScaleOp op, const VectorXd& v) {
    VectorXd r(cl.m);
    const bool inv = (op == ScaleOp::kWinv || op == ScaleOp::kWinvt);
    for (int i = 0; i < cl.lp; ++i) {
        r(i) = inv ? v(i) / sc.w_lp(i) : v(i) * sc.w_lp(i);
    }
    for (size_t k = 0; k < cl.soc.size(); ++k) {
        const int q = cl.soc[k];
        const int o = cl.soc_off[k];
        const SocScale& ss = sc.socs[k];
        const double sgn = inv ? -1.0 : 1.0;  // W^{-1} flips the off-diagonal sign
        const double scale = inv ? 1.0 / ss.eta : ss.eta;
        const VectorXd wb = ss.wbar.tail(q - 1);
        const double v0 = v(o);
        const VectorXd vb = v.segment(o + 1, q - 1);
        const double wv = wb.dot(vb);
        r(o) = scale * (ss.wbar(0) * v0 + sgn * wv);
        r.segment(o + 1, q - 1) =
            scale * (sgn * v0 * wb + vb + (wv / (1.0 + ss.wbar(0))) * wb);
    }
    for (size_t k = 0; k < cl.psd.size(); ++k) {
        const int p = cl.psd[k];
        const int o = cl.psd_off[k];
        const PsdScale& ps = sc.psds[k];
        const MatrixXd X = unsvec(v.data() + o, p);
        MatrixXd y;
        switch (op) {
            case ScaleOp::kW: y = ps.R.transpose() * X * ps.R; break;
            case ScaleOp::kWt: y = ps.R * X * ps.R.transpose(); break;
            case ScaleOp::kWinv: y = ps.Rinv.transpose() * X * ps.Rinv; break;
            case ScaleOp::kWinvt: y = ps.Rinv * X * ps.Rinv.transpose(); break;
        }
        svec_into(0.5 * (y + y.transpose()), r.data() + o);
    }
    return r;
}

// Jordan product u o v per cone block.
VectorXd jordan_mul(const ConeLayout& cl, const VectorXd& u, const VectorXd& v) {
    VectorXd r(cl.m);
    r.head(cl.lp) = u.head(cl.lp).cwiseProduct(v.head(cl.lp));
    for (size_t k = 0; k < cl.soc.size(); ++k) {
        const int q = cl.soc[k];
        const int o = cl.soc_off[k];
        r(o) = u.segment(o, q).dot(v.segment(o, q));
        r.segment(o + 1, q - 1) =
            u(o) * v.segment(o + 1, q - 1) + v(o) * u.segment(o + 1, q - 1);
    }
    for (size_t k = 0; k < cl.psd.size(); ++k) {
        const int p = cl.psd[k];
        const int o = cl.psd_off[k];
        const MatrixXd U = unsvec(u.data() + o, p);
        const MatrixXd V = unsvec(v.data() + o, p);
        const MatrixXd W = 0.5 * (U * V + V * U);
        svec_into(W, r.data() + o);
    }
    return r;
}

// Solves lambda o x = v for x, using the spectral structure of lambda.
VectorXd lambda_solve(const ConeLayout& cl, const Scaling& sc, const VectorXd& v) {
    VectorXd r(cl.m);
    r.head(cl.lp) = v.head(cl.lp).cwiseQuotient(sc.lambda.head(cl.lp));
    for (size_t k = 0; k < cl.soc.size(); ++k) {
        const int q = cl.soc[k];
        const int o = cl.soc_off[k];
        const double l0 = sc.lambda(o);
        const VectorXd lb = sc.lambda.segment(o + 1, q - 1);
        const double det = l0 * l0 - lb.squaredNorm();
        const double x0 = (l0 * v(o) - lb.dot(v.segment(o + 1, q - 1))) / det;
        r(o) = x0;
        r.segment(o + 1, q - 1) = (v.segment(o + 1, q - 1) - x0 * lb) / l0;
    }
    for (size_t k = 0; k < cl.psd.size(); ++k) {
        const int p = cl.psd[k];
        const int o = cl.psd_off[k];
        const VectorXd& sig = sc.psds[k].sigma;
        const MatrixXd V = unsvec(v.data() + o, p);
        MatrixXd X(p, p);
        for (int j = 0; j < p; ++j) {
            for (int i = 0; i < p; ++i) {
                X(i, j) = 2.0 * V(i, j) / (sig(i) + sig(j));
            }
        }
        svec_into(X, r.data() + o);
    }
    return r;
}

VectorXd cone_identity(const ConeLayout& cl) {
    VectorXd e = VectorXd::Zero(cl.m);
    e.head(cl.lp).setOnes();
    for (size_t k = 0; k < cl.soc.size(); ++k) {
        e(cl.soc_off[k]) = 1.0;
    }
    for (size_t k = 0; k < cl.psd.size(); ++k) {
        svec_into(MatrixXd::Identity(cl.psd[k], cl.psd[k]), e.data() + cl.psd_off[k]);
    }
    return e;
}

// Smallest cone-wise "interior margin": positive iff v is in the cone interior.
double cone_margin(const ConeLayout& cl, const VectorXd& v) {
    double mg = kInf;
    for (int i = 0; i < cl.lp; ++i) {
        mg = std::min(mg, v(i));
    }
    for (size_t k = 0; k < cl.soc.size(); ++k) {
        const int q = cl.soc[k];
        const int o = cl.soc_off[k];
        mg = std::min(mg, v(o) - v.segment(o + 1, q - 1).norm());
    }
    for (size_t k = 0; k < cl.psd.size(); ++k) {
        const MatrixXd X = unsvec(v.data() + cl.psd_off[k], cl.psd[k]);
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(X, Eigen::EigenvaluesOnly);
        mg = std::min(mg, es.eigenvalues().minCoeff());
    }
    return mg;
}

// sup { alpha >= 0 : v + alpha dv in cone }, capped at kInf.
double max_step(const ConeLayout& cl, const VectorXd& v, const VectorXd& dv) {
    double alpha = kInf;
    for (int i = 0; i < cl.lp; ++i) {
        if (dv(i) < 0.0) {
            alpha = std::min(alpha, -v(i) / dv(i));
        }
    }
    for (size_t k = 0; k < cl.soc.size(); ++k) {
        const int q = cl.soc[k];
        const int o = cl.soc_off[k];
        const double t = v(o), dt = dv(o);
        const VectorXd u = v.segment(o + 1, q - 1);
        const VectorXd du = dv.segment(o + 1, q - 1);
        // f(a) = (t+a dt)^2 - ||u+a du||^2, f(0) > 0 in the interior
        const double a = dt * dt - du.squaredNorm();
        const double b = 2.0 * (t * dt - u.dot(du));
        const double c = t * t - u.squaredNorm();
        const double disc = b * b - 4.0 * a * c;
        double root = kInf;
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            // numerically stable smallest positive root
            for (double r : {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a),
                             (a == 0.0 && b != 0.0) ? -c / b : kInf}) {
                if (std::isfinite(r) && r > 0.0) {
                    root = std::min(root, r);
                }
            }
        }
        if (dt < 0.0) {
            root = std::min(root, kInf);  // t crossing handled by f's root first
        }
        alpha = std::min(alpha, root);
    }
    for (size_t k = 0; k < cl.psd.size(); ++k) {
        const int p = cl.psd[k];
        const int o = cl.psd_off[k];
        const MatrixXd S = unsvec(v.data() + o, p);
        const MatrixXd dS = unsvec(dv.data() + o, p);
        Eigen::LLT<MatrixXd> llt(S);
        if (llt.info() != Eigen::Success) {
            return 0.0;
        }
        const MatrixXd L = llt.matrixL();
        MatrixXd M = L.template triangularView<Eigen::Lower>().solve(dS);
        M = L.template triangularView<Eigen::Lower>().solve(M.transpose().eval());
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (M + M.transpose()),
                                                   Eigen::EigenvaluesOnly);
        const double lmin = es.eigenvalues().minCoeff();
        if (lmin < 0.0) {
            alpha = std::min(alpha, -1.0 / lmin);
        }
    }
    return alpha;
}

// KKT system solved twice per iteration:
//   [ 0   A'   G'  ] [dx]   [rx]
//   [ A   0    0   ] [dy] = [ry]
//   [ G   0  -W'W  ] [dz]   [rz]
// via elimination of dz and a dense LU of the (n+p) saddle matrix.
class KktSolver {
  public:
    KktSolver(const MatrixXd& G, const MatrixXd& A, const ConeLayout& cl)
        : G_(G), A_(A), cl_(cl), n_(static_cast<int>(G.cols())),
          p_(static_cast<int>(A.rows())) {}

    void factor(const Scaling& sc) {
        scaling_ = &sc;
        Ghat_.resize(G_.rows(), n_);
        for (int j = 0; j < n_; ++j) {
            Ghat_.col(j) = apply_scaling(cl_, sc, ScaleOp::kWinvt, G_.col(j));
        }
        saddle_ = MatrixXd::Zero(n_ + p_, n_ + p_);
        saddle_.topLeftCorner(n_, n_) = Ghat_.transpose() * Ghat_;
        if (p_ > 0) {
            saddle_.topRightCorner(n_, p_) = A_.transpose();
            saddle_.bottomLeftCorner(p_, n_) = A_;
        }
        lu_.compute(saddle_);
        // fall back to full pivoting when partial pivoting hits a (near)
        // singular saddle matrix
        const VectorXd probe = VectorXd::Ones(n_ + p_);
        const VectorXd sol = lu_.solve(probe);
        use_full_ = !sol.allFinite();
        if (use_full_) {
            full_lu_.compute(saddle_);
        }
    }

    void solve(const VectorXd& rx, const VectorXd& ry, const VectorXd& rz,
               VectorXd& dx, VectorXd& dy, VectorXd& dz) const {
        const VectorXd rzh = apply_scaling(cl_, *scaling_, ScaleOp::kWinvt, rz);
        VectorXd rhs(n_ + p_);
        rhs.head(n_) = rx + Ghat_.transpose() * rzh;
        rhs.tail(p_) = ry;
        VectorXd sol = use_full_ ? full_lu_.solve(rhs).eval() : lu_.solve(rhs).eval();
        // two steps of iterative refinement; the saddle matrix gets badly
        // conditioned as the barrier parameter approaches zero
        for (int r = 0; r < 2; ++r) {
            const VectorXd resid = rhs - saddle_ * sol;
            sol += use_full_ ? full_lu_.solve(resid).eval() : lu_.solve(resid).eval();
        }
        dx = sol.head(n_);
        dy = sol.tail(p_);
        dz = apply_scaling(cl_, *scaling_, ScaleOp::kWinv, Ghat_ * dx - rzh);
    }

  private:
    const MatrixXd& G_;
    const MatrixXd& A_;
    const ConeLayout& cl_;
    int n_, p_;
    const Scaling* scaling_ = nullptr;
    MatrixXd Ghat_;
    MatrixXd saddle_;
    Eigen::PartialPivLU<MatrixXd> lu_;
    Eigen::FullPivLU<MatrixXd> full_lu_;
    bool use_full_ = false;
};

Residuals primal_residuals(const ConicProblem& pr, const VectorXd& x) {
    Residuals r;
    if (pr.A.rows() > 0) {
        r.eq = (pr.A * x - pr.b).cwiseAbs().maxCoeff();
    }
    if (pr.D.rows() > 0) {
        r.ineq = std::max(0.0, -(pr.D * x + pr.d).minCoeff());
    }
    for (const auto& s : pr.socs) {
        r.soc = std::max(r.soc, (s.U * x + s.u0).norm() - (s.t.dot(x) + s.t0));
    }
    r.soc = std::max(r.soc, 0.0);
    for (const auto& s : pr.psds) {
        MatrixXd f = s.F0;
        for (int i = 0; i < static_cast<int>(s.F.size()); ++i) {
            f += x(i) * s.F[i];
        }
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(f, Eigen::EigenvaluesOnly);
        r.psd = std::max(r.psd, -es.eigenvalues().minCoeff());
    }
    r.psd = std::max(r.psd, 0.0);
    return r;
}

}  // namespace

double Residuals::max() const { return std::max({eq, ineq, soc, psd}); }

std::string status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::kOptimal: return "optimal";
        case SolveStatus::kInfeasible: return "infeasible";
        case SolveStatus::kUnbounded: return "unbounded";
        case SolveStatus::kMaxIterations: return "max-iterations";
    }
    return "unknown";
}

void ConicProblem::validate() const {
    const int n = num_vars();
    if (n < 1 || !c.allFinite()) {
        throw std::invalid_argument("conic: objective missing or non-finite");
    }
    auto check = [&](bool ok, const char* what) {
        if (!ok) {
            throw std::invalid_argument(std::string("conic: bad constraint data: ") + what);
        }
    };
    check(A.rows() == b.size() && (A.rows() == 0 || A.cols() == n), "equalities");
    check(A.allFinite() && b.allFinite(), "equalities finite");
    check(D.rows() == d.size() && (D.rows() == 0 || D.cols() == n), "inequalities");
    check(D.allFinite() && d.allFinite(), "inequalities finite");
    for (const auto& s : socs) {
        check(s.U.cols() == n && s.U.rows() == s.u0.size() && s.t.size() == n, "soc dims");
        check(s.U.allFinite() && s.u0.allFinite() && s.t.allFinite() &&
                  std::isfinite(s.t0), "soc finite");
    }
    for (const auto& s : psds) {
        check(s.dim > 0 && s.F0.rows() == s.dim && s.F0.cols() == s.dim, "psd dims");
        check(static_cast<int>(s.F.size()) == n, "psd coefficient count");
        check(s.F0.allFinite(), "psd finite");
        for (const auto& f : s.F) {
            check(f.rows() == s.dim && f.cols() == s.dim && f.allFinite(), "psd coeff");
        }
    }
    if (D.rows() == 0 && socs.empty() && psds.empty()) {
        throw std::invalid_argument("conic: at least one cone constraint is required");
    }
}

ConicSolution solve(const ConicProblem& pr, const SolveOptions& opt) {
    pr.validate();
    const int n = pr.num_vars();
    const int p = static_cast<int>(pr.A.rows());

    ConeLayout cl;
    cl.lp = static_cast<int>(pr.D.rows());
    for (const auto& s : pr.socs) {
        cl.soc.push_back(1 + static_cast<int>(s.U.rows()));
    }
    for (const auto& s : pr.psds) {
        cl.psd.push_back(s.dim);
    }
    cl.finalize();
    const int m = cl.m;

    // Standard form: min c'x  s.t.  A x = b,  G x + s = h,  s in K.
    MatrixXd G = MatrixXd::Zero(m, n);
    VectorXd h = VectorXd::Zero(m);
    G.topRows(cl.lp) = -pr.D;
    h.head(cl.lp) = pr.d;
    for (size_t k = 0; k < pr.socs.size(); ++k) {
        const auto& s = pr.socs[k];
        const int o = cl.soc_off[k];
        G.row(o) = -s.t.transpose();
        h(o) = s.t0;
        G.block(o + 1, 0, s.U.rows(), n) = -s.U;
        h.segment(o + 1, s.U.rows()) = s.u0;
    }
    for (size_t k = 0; k < pr.psds.size(); ++k) {
        const auto& s = pr.psds[k];
        const int o = cl.psd_off[k];
        const int sd = svec_dim(s.dim);
        VectorXd tmp(sd);
        for (int j = 0; j < n; ++j) {
            svec_into(s.F[j], tmp.data());
            G.col(j).segment(o, sd) = -tmp;
        }
        svec_into(s.F0, tmp.data());
        h.segment(o, sd) = tmp;
    }

    const double nb = 1.0 + (p > 0 ? pr.b.norm() : 0.0);
    const double nh = 1.0 + h.norm();
    const double nc = 1.0 + pr.c.norm();
    const VectorXd e = cone_identity(cl);

    KktSolver kkt(G, pr.A, cl);

    // Initial point from two solves with identity scaling, shifted into the
    // cone interior.
    VectorXd x(n), y(p), s(m), z(m);
    {
        const Scaling id = identity_scaling(cl);
        kkt.factor(id);
        VectorXd dx, dy, dz;
        kkt.solve(VectorXd::Zero(n), pr.b, h, dx, dy, dz);
        x = dx;
        s = -dz;
        const double ms = cone_margin(cl, s);
        if (ms < 1e-8 * std::max(1.0, s.norm())) {
            s += (1.0 - std::min(ms, 0.0)) * e;
        }
        kkt.solve(-pr.c, VectorXd::Zero(p), VectorXd::Zero(m), dx, dy, dz);
        y = dy;
        z = dz;
        const double mz = cone_margin(cl, z);
        if (mz < 1e-8 * std::max(1.0, z.norm())) {
            z += (1.0 - std::min(mz, 0.0)) * e;
        }
    }
    double tau = 1.0, kappa = 1.0;

    ConicSolution sol;
    sol.x = VectorXd::Zero(n);
    int stall = 0;
    double prev_mu = kInf;

    // Best iterate seen so far, by worst-case optimality metric; returned if
    // the final iterations degrade numerically instead of converging further.
    VectorXd best_x = VectorXd::Zero(n);
    double best_score = kInf, best_pres = kInf, best_dres = kInf;
    double best_gap = kInf, best_relgap = kInf, best_pcost = 0.0;

    for (int it = 0; it < opt.max_iterations; ++it) {
        sol.iterations = it;
        const VectorXd rx = -pr.A.transpose() * y - G.transpose() * z - pr.c * tau;
        const VectorXd ry = (p > 0) ? VectorXd(pr.A * x - pr.b * tau) : VectorXd(0);
        const VectorXd rz = G * x + s - h * tau;
        const double rtau = pr.c.dot(x) + (p > 0 ? pr.b.dot(y) : 0.0) + h.dot(z) + kappa;

        // Convergence metrics on the de-homogenized iterate.
        const VectorXd xs = x / tau;
        const VectorXd ss = s / tau;
        const double pcost = pr.c.dot(xs);
        const double dcost = -((p > 0 ? pr.b.dot(y) : 0.0) + h.dot(z)) / tau;
        const double gap = ss.dot(z / tau);
        const double pres = std::max(
            (p > 0 ? (pr.A * xs - pr.b).norm() / nb : 0.0), (G * xs + ss - h).norm() / nh);
        const double dres =
            (pr.A.transpose() * (y / tau) + G.transpose() * (z / tau) + pr.c).norm() / nc;
        const double relgap = gap / std::max({1.0, std::abs(pcost), std::abs(dcost)});

        if (opt.verbose) {
            // one line per iteration keeps failed runs diagnosable
            std::fprintf(stderr, "it %3d  pcost % .6e  gap %.3e  pres %.3e  dres %.3e  tau %.3e\n",
                         it, pcost, gap, pres, dres, tau);
        }

        const double score = std::max({pres, dres, std::min(gap, relgap)});
        if (score < best_score) {
            best_score = score;
            best_x = xs;
            best_pres = pres;
            best_dres = dres;
            best_gap = gap;
            best_relgap = relgap;
            best_pcost = pcost;
        }

        if (pres <= opt.feas_tol && dres <= opt.feas_tol &&
            (gap <= opt.abs_tol || relgap <= opt.rel_tol)) {
            sol.x = xs;
            sol.status = SolveStatus::kOptimal;
            sol.objective = pcost;
            sol.duality_gap = gap;
            sol.residuals = primal_residuals(pr, xs);
            return sol;
        }

        // Infeasibility certificates of the homogeneous model.
        const double hz = (p > 0 ? pr.b.dot(y) : 0.0) + h.dot(z);
        if (hz < 0.0) {
            const double certres =
                (pr.A.transpose() * y + G.transpose() * z).norm() / (-hz) / nc;
            if (certres <= opt.feas_tol) {
                sol.status = SolveStatus::kInfeasible;
                sol.certificate_residual = certres;
                sol.x = xs;
                sol.residuals = primal_residuals(pr, xs);
                return sol;
            }
        }
        const double cx = pr.c.dot(x);
        if (cx < 0.0) {
            const double certres = std::max(
                (p > 0 ? (pr.A * x).norm() / (-cx) / nb : 0.0),
                (G * x + s).norm() / (-cx) / nh);
            if (certres <= opt.feas_tol) {
                sol.status = SolveStatus::kUnbounded;
                sol.certificate_residual = certres;
                sol.x = x / (-cx);
                return sol;
            }
        }

        // numerical degradation: feasibility deteriorating while the gap is
        // already closed; the best stored iterate is the answer
        if (pres > 1e3 * (best_pres + opt.feas_tol) && gap <= opt.abs_tol) {
            break;
        }

        const double mu = (s.dot(z) + tau * kappa) / (cl.degree + 1.0);
        if (mu < 1e-300) {
            break;
        }

        Scaling sc;
        try {
            sc = compute_scaling(cl, s, z);
            kkt.factor(sc);
        } catch (const std::runtime_error&) {
            break;  // numerical breakdown; report max-iterations below
        }

        VectorXd x1, y1, z1;
        kkt.solve(-pr.c, pr.b, h, x1, y1, z1);
        const double denom = pr.c.dot(x1) + (p > 0 ? pr.b.dot(y1) : 0.0) + h.dot(z1) -
                             kappa / tau;

        auto direction = [&](const VectorXd& ds_rhs, double dk_rhs, double rfac,
                             VectorXd& dx, VectorXd& dy, VectorXd& dz, VectorXd& ds,
                             double& dtau, double& dkappa) {
            const VectorXd lam_ds = lambda_solve(cl, sc, ds_rhs);
            const VectorXd wt_lam = apply_scaling(cl, sc, ScaleOp::kWt, lam_ds);
            VectorXd x2, y2, z2;
            kkt.solve(rfac * rx, -rfac * ry, -rfac * rz - wt_lam, x2, y2, z2);
            dtau = (-rfac * rtau - dk_rhs / tau -
                    (pr.c.dot(x2) + (p > 0 ? pr.b.dot(y2) : 0.0) + h.dot(z2))) /
                   denom;
            dx = x2 + dtau * x1;
            dy = (p > 0) ? VectorXd(y2 + dtau * y1) : VectorXd(0);
            dz = z2 + dtau * z1;
            ds = wt_lam - apply_scaling(cl, sc, ScaleOp::kWt,
                                        apply_scaling(cl, sc, ScaleOp::kW, dz));
            dkappa = (dk_rhs - kappa * dtau) / tau;
        };

        // Mehrotra predictor
        const VectorXd lam_sq = jordan_mul(cl, sc.lambda, sc.lambda);
        VectorXd dxa, dya, dza, dsa;
        double dtaua, dkappaa;
        direction(-lam_sq, -tau * kappa, 1.0, dxa, dya, dza, dsa, dtaua, dkappaa);

        double alpha_aff = std::min(max_step(cl, s, dsa), max_step(cl, z, dza));
        if (dtaua < 0.0) alpha_aff = std::min(alpha_aff, -tau / dtaua);
        if (dkappaa < 0.0) alpha_aff = std::min(alpha_aff, -kappa / dkappaa);
        alpha_aff = std::min(alpha_aff, 1.0);
        const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3.0), 0.0, 1.0);

        // corrector
        const VectorXd shat = apply_scaling(cl, sc, ScaleOp::kWinvt, dsa);
        const VectorXd zhat = apply_scaling(cl, sc, ScaleOp::kW, dza);
        const VectorXd ds_rhs = -lam_sq - jordan_mul(cl, shat, zhat) + sigma * mu * e;
        const double dk_rhs = -tau * kappa - dtaua * dkappaa + sigma * mu;

        VectorXd dx, dy, dz, ds;
        double dtau, dkappa;
        direction(ds_rhs, dk_rhs, 1.0 - sigma, dx, dy, dz, ds, dtau, dkappa);

        double alpha = std::min(max_step(cl, s, ds), max_step(cl, z, dz));
        if (dtau < 0.0) alpha = std::min(alpha, -tau / dtau);
        if (dkappa < 0.0) alpha = std::min(alpha, -kappa / dkappa);
        alpha = std::min(1.0, 0.99 * alpha);

        if (alpha <= 1e-10 || mu > 0.99 * prev_mu) {
            if (++stall >= 5) {
                break;
            }
        } else {
            stall = 0;
        }
        prev_mu = mu;

        x += alpha * dx;
        if (p > 0) y += alpha * dy;
        z += alpha * dz;
        s += alpha * ds;
        tau += alpha * dtau;
        kappa += alpha * dkappa;
    }

    // Not converged to full tolerance: accept the best iterate when it is
    // near-optimal, otherwise report max-iterations honestly.
    sol.x = best_x;
    sol.objective = best_pcost;
    sol.duality_gap = best_gap;
    sol.residuals = primal_residuals(pr, best_x);
    if (best_pres <= 10.0 * opt.feas_tol && best_dres <= 10.0 * opt.feas_tol &&
        (best_gap <= 10.0 * opt.abs_tol || best_relgap <= 10.0 * opt.rel_tol)) {
        sol.status = SolveStatus::kOptimal;
    } else {
        sol.status = SolveStatus::kMaxIterations;
    }
    return sol;
}

void dump(const ConicProblem& pr, std::ostream& os) {
    Eigen::IOFormat fmt(17, Eigen::DontAlignCols, " ", " ");
    os << "minimize " << pr.c.transpose().format(fmt) << "\n";
    for (int i = 0; i < pr.A.rows(); ++i) {
        os << "eq " << pr.A.row(i).format(fmt) << " = " << pr.b(i) << "\n";
    }
    for (int i = 0; i < pr.D.rows(); ++i) {
        os << "ineq " << pr.D.row(i).format(fmt) << " + " << pr.d(i) << " >= 0\n";
    }
    for (const auto& s : pr.socs) {
        os << "soc t " << s.t.transpose().format(fmt) << " + " << s.t0 << "\n";
        for (int i = 0; i < s.U.rows(); ++i) {
            os << "soc u " << s.U.row(i).format(fmt) << " + " << s.u0(i) << "\n";
        }
    }
    for (const auto& s : pr.psds) {
        os << "psd dim " << s.dim << "\n";
        os << "psd F0 " << s.F0.format(fmt) << "\n";
        for (size_t j = 0; j < s.F.size(); ++j) {
            os << "psd F" << j << " " << s.F[j].format(fmt) << "\n";
        }
    }
}

}  // namespace radmc::conic
