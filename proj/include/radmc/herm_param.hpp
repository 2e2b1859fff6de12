// Real parametrization of Hermitian matrix variables for the conic solver:
// x = [diag(0..N-1), (Re W_01, Im W_01), (Re W_02, Im W_02), ...] with the
// off-diagonal pairs ordered column-major over i < j. The complex PSD
// constraint W >= 0 enters as the real embedding [[Re W, -Im W],[Im W, Re W]].
#pragma once

#include <vector>

#include "radmc/complex_linalg.hpp"
#include "radmc/conic.hpp"

namespace radmc {

inline int herm_param_dim(int n) { return n * n; }

/// Reassembles the Hermitian matrix from its real parameter block.
inline HermitianMatrix herm_from_params(const RealVector& x, int offset, int n) {
    ComplexMatrix w = ComplexMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        w(i, i) = x(offset + i);
    }
    int k = offset + n;
    for (int j = 1; j < n; ++j) {
        for (int i = 0; i < j; ++i) {
            w(i, j) = Complex(x(k), x(k + 1));
            w(j, i) = std::conj(w(i, j));
            k += 2;
        }
    }
    return HermitianMatrix(w);
}

/// Coefficient vector c with Tr(H W(x)) = c . x_block for Hermitian H.
inline RealVector herm_trace_coeffs(const HermitianMatrix& h) {
    const int n = h.size();
    RealVector c(herm_param_dim(n));
    for (int i = 0; i < n; ++i) {
        c(i) = h.mat()(i, i).real();
    }
    int k = n;
    for (int j = 1; j < n; ++j) {
        for (int i = 0; i < j; ++i) {
            c(k) = 2.0 * h.mat()(i, j).real();
            c(k + 1) = 2.0 * h.mat()(i, j).imag();
            k += 2;
        }
    }
    return c;
}

/// PSD constraint T(W(x)) >= 0 on the real embedding of a Hermitian variable
/// block living at [offset, offset + n^2) of an x of length num_vars.
inline conic::PsdConstraint herm_psd_constraint(int n, int offset, int num_vars) {
    conic::PsdConstraint psd;
    psd.dim = 2 * n;
    psd.F0 = RealMatrix::Zero(2 * n, 2 * n);
    psd.F.assign(num_vars, RealMatrix::Zero(2 * n, 2 * n));
    for (int i = 0; i < n; ++i) {
        RealMatrix& f = psd.F[offset + i];
        f(i, i) = 1.0;
        f(n + i, n + i) = 1.0;
    }
    int k = offset + n;
    for (int j = 1; j < n; ++j) {
        for (int i = 0; i < j; ++i) {
            RealMatrix& fr = psd.F[k];
            fr(i, j) = fr(j, i) = 1.0;
            fr(n + i, n + j) = fr(n + j, n + i) = 1.0;
            RealMatrix& fi = psd.F[k + 1];
            fi(i, n + j) = fi(n + j, i) = -1.0;
            fi(j, n + i) = fi(n + i, j) = 1.0;
            k += 2;
        }
    }
    return psd;
}

}  // namespace radmc
