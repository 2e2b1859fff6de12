// Complex Hermitian matrix type and the spectral operations shared by the
// beampattern, penalty and benchmark modules, plus the complex-to-real cone
// embedding consumed by the conic solver.
#pragma once

#include <Eigen/Dense>
#include <complex>

namespace radmc {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Dense N x N complex Hermitian matrix. Construction symmetrizes the input
/// as (A + A^H)/2 and rejects non-finite entries; the stored matrix satisfies
/// A == A.adjoint() exactly and has purely real diagonal.
class HermitianMatrix {
  public:
    explicit HermitianMatrix(const ComplexMatrix& a);

    static HermitianMatrix Identity(int n);
    static HermitianMatrix Zero(int n);
    /// Rank-one outer product h * h^H.
    static HermitianMatrix Outer(const ComplexVector& h);

    int size() const { return static_cast<int>(mat_.rows()); }
    const ComplexMatrix& mat() const { return mat_; }
    double trace() const { return mat_.trace().real(); }
    double frobenius_norm() const { return mat_.norm(); }

    HermitianMatrix operator+(const HermitianMatrix& other) const;
    HermitianMatrix operator-(const HermitianMatrix& other) const;
    HermitianMatrix operator*(double c) const;

    /// Real quadratic form v^H A v (imaginary part discarded; it is zero up
    /// to roundoff for Hermitian A).
    double quad_form(const ComplexVector& v) const;

  private:
    ComplexMatrix mat_;
};

/// Full spectral decomposition, eigenvalues sorted descending, eigenvectors
/// orthonormal (column i pairs with eigenvalue i).
struct EigenDecomposition {
    RealVector eigenvalues;
    ComplexMatrix eigenvectors;
};

/// Dense Hermitian eigendecomposition. Throws std::invalid_argument on
/// non-finite input.
EigenDecomposition eig(const HermitianMatrix& a);

/// Sum of singular values; equals trace(A) for PSD input.
double nuclear_norm(const HermitianMatrix& a);

/// Largest singular value, max_i |lambda_i|.
double spectral_norm(const HermitianMatrix& a);

/// ||A||_* - ||A||_2 >= 0 for PSD A; zero iff rank(A) <= 1. Requires A PSD
/// within tolerance (min eigenvalue >= -1e-8 * trace); throws
/// std::domain_error otherwise.
double rank_one_residual(const HermitianMatrix& a);

/// T(A) = [[Re A, -Im A], [Im A, Re A]]; real symmetric 2N x 2N. T(A) is PSD
/// iff A is PSD, trace(T(A)) = 2 trace(A), and every eigenvalue of A appears
/// twice in T(A).
RealMatrix real_embedding(const HermitianMatrix& a);

/// Tr(A B) for Hermitian A, B (real by symmetry).
double trace_product(const HermitianMatrix& a, const HermitianMatrix& b);

}  // namespace radmc
