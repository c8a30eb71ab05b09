#pragma once

#include <Eigen/Dense>
#include <utility>

#include "utc/errors.hpp"

namespace utc {

/// Dense real matrix / vector types used throughout the library.
/// Dimensions here are small (tens at most); everything is dense double.
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Margin below 1 that the spectral radius must respect before a discrete
/// Lyapunov solve is attempted. Near-unit radius produces numerically
/// meaningless solutions.
inline constexpr double kSchurMargin = 1e-9;

/// Default condition-number cap for solve_linear.
inline constexpr double kDefaultCondTol = 1e12;

/// Scale-aware default tolerance for symmetry / PSD checks:
/// 1e-9 * max(1, ||M||_inf).
double default_sym_tol(const Mat& M);

/// True when every entry is finite (no NaN / Inf).
bool is_finite(const Mat& M);

/// Throws Error when M contains a non-finite entry. `name` labels the
/// offending argument in the message.
void require_finite(const Mat& M, const char* name);

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Deterministic for identical inputs. Eigenvalues are returned in
/// ascending order, eigenvectors as the matching columns of `vectors`.
/// The input is symmetrized internally; callers are expected to have
/// checked symmetry to their own tolerance first.
void eig_sym(const Mat& M, Vec& values, Mat& vectors);

/// Minimum and maximum eigenvalue of a symmetric matrix.
/// Throws NotSymmetricError when max|M - M^T| exceeds the default tolerance.
std::pair<double, double> eig_extrema_sym(const Mat& M);

/// Symmetric PSD square root: returns symmetric S with S*S = M.
/// Eigenvalues of M in [-tol, 0) are clamped to zero before rooting.
/// Throws NotSymmetricError when max|M - M^T| > tol, NotPsdError when the
/// minimum eigenvalue is below -tol.
Mat psd_sqrt(const Mat& M, double tol);
Mat psd_sqrt(const Mat& M);  // tol = default_sym_tol(M)

/// Largest singular value (induced 2-norm).
double spectral_norm(const Mat& M);

/// Largest eigenvalue magnitude of a (generally nonsymmetric) square matrix.
double spectral_radius(const Mat& M);

/// Solves A*X = B by partial-pivot LU. Throws SingularError when the
/// reciprocal condition estimate indicates cond(A) > cond_tol.
Mat solve_linear(const Mat& A, const Mat& B, double cond_tol);
Mat solve_linear(const Mat& A, const Mat& B);  // cond_tol = kDefaultCondTol

/// Solves the discrete Lyapunov (Stein) equation Z^T P Z - P = -Q for
/// symmetric Q, by vectorizing into a Kronecker-structured linear system.
/// The O(d^6) cost is irrelevant at the dimensions this library targets.
/// Throws NotSchurError unless the spectral radius of Z is < 1 - kSchurMargin.
Mat solve_stein(const Mat& Z, const Mat& Q);

}  // namespace utc
