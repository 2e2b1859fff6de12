#include "radmc/complex_linalg.hpp"

#include <stdexcept>

namespace radmc {

HermitianMatrix::HermitianMatrix(const ComplexMatrix& a) {
    if (a.rows() != a.cols() || a.rows() < 1) {
        throw std::invalid_argument("HermitianMatrix: input must be square and non-empty");
    }
    if (!a.allFinite()) {
        throw std::invalid_argument("HermitianMatrix: non-finite entries");
    }
    mat_ = 0.5 * (a + a.adjoint().eval());
    // Force an exactly real diagonal; the symmetrization above leaves
    // roundoff-level imaginary residue there.
    for (Eigen::Index i = 0; i < mat_.rows(); ++i) {
        mat_(i, i) = Complex(mat_(i, i).real(), 0.0);
    }
}

HermitianMatrix HermitianMatrix::Identity(int n) {
    return HermitianMatrix(ComplexMatrix::Identity(n, n));
}

HermitianMatrix HermitianMatrix::Zero(int n) {
    return HermitianMatrix(ComplexMatrix::Zero(n, n));
}

HermitianMatrix HermitianMatrix::Outer(const ComplexVector& h) {
    if (h.size() < 1) {
        throw std::invalid_argument("HermitianMatrix::Outer: empty vector");
    }
    return HermitianMatrix(h * h.adjoint());
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& other) const {
    return HermitianMatrix(mat_ + other.mat_);
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& other) const {
    return HermitianMatrix(mat_ - other.mat_);
}

HermitianMatrix HermitianMatrix::operator*(double c) const {
    return HermitianMatrix(mat_ * c);
}

double HermitianMatrix::quad_form(const ComplexVector& v) const {
    return (v.adjoint() * mat_ * v).value().real();
}

EigenDecomposition eig(const HermitianMatrix& a) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a.mat());
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("eig: eigendecomposition failed to converge");
    }
    // Eigen returns ascending order; flip to descending.
    const int n = a.size();
    EigenDecomposition d;
    d.eigenvalues = es.eigenvalues().reverse();
    d.eigenvectors = ComplexMatrix(n, n);
    for (int i = 0; i < n; ++i) {
        d.eigenvectors.col(i) = es.eigenvectors().col(n - 1 - i);
    }
    return d;
}

double nuclear_norm(const HermitianMatrix& a) {
    return eig(a).eigenvalues.cwiseAbs().sum();
}

double spectral_norm(const HermitianMatrix& a) {
    return eig(a).eigenvalues.cwiseAbs().maxCoeff();
}

double rank_one_residual(const HermitianMatrix& a) {
    const EigenDecomposition d = eig(a);
    const double tr = a.trace();
    if (d.eigenvalues.minCoeff() < -1e-8 * std::max(tr, 0.0) - 1e-300) {
        throw std::domain_error("rank_one_residual: matrix is significantly indefinite");
    }
    const double nuc = d.eigenvalues.cwiseAbs().sum();
    const double spec = d.eigenvalues.cwiseAbs().maxCoeff();
    return std::max(nuc - spec, 0.0);
}

RealMatrix real_embedding(const HermitianMatrix& a) {
    const int n = a.size();
    RealMatrix t(2 * n, 2 * n);
    const RealMatrix re = a.mat().real();
    const RealMatrix im = a.mat().imag();
    t.topLeftCorner(n, n) = re;
    t.topRightCorner(n, n) = -im;
    t.bottomLeftCorner(n, n) = im;
    t.bottomRightCorner(n, n) = re;
    return t;
}

double trace_product(const HermitianMatrix& a, const HermitianMatrix& b) {
    return (a.mat().cwiseProduct(b.mat().conjugate())).sum().real();
}

}  // namespace radmc
