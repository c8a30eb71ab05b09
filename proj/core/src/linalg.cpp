#include "utc/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace utc {

double default_sym_tol(const Mat& M) {
    const double scale = M.size() > 0 ? M.cwiseAbs().rowwise().sum().maxCoeff() : 0.0;
    return 1e-9 * std::max(1.0, scale);
}

bool is_finite(const Mat& M) { return M.allFinite(); }

void require_finite(const Mat& M, const char* name) {
    if (!M.allFinite()) {
        throw Error(std::string(name) + " contains a non-finite entry");
    }
}

namespace {

void require_square(const Mat& M, const char* name) {
    if (M.rows() != M.cols()) {
        throw Error(std::string(name) + " must be square, got " +
                    std::to_string(M.rows()) + "x" + std::to_string(M.cols()));
    }
}

void require_symmetric(const Mat& M, double tol, const char* name) {
    require_square(M, name);
    const double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
    if (asym > tol) {
        throw NotSymmetricError(std::string(name) + ": max|M - M^T| = " +
                                std::to_string(asym) + " exceeds tolerance " +
                                std::to_string(tol));
    }
}

}  // namespace

void eig_sym(const Mat& M, Vec& values, Mat& vectors) {
    require_finite(M, "eig_sym input");
    const Eigen::Index d = M.rows();
    Mat A = 0.5 * (M + M.transpose());
    Mat V = Mat::Identity(d, d);

    if (d == 1) {
        values = Vec::Constant(1, A(0, 0));
        vectors = V;
        return;
    }

    // Cyclic Jacobi sweeps: rotate away each off-diagonal entry in turn
    // until the off-diagonal mass is negligible against the diagonal scale.
    const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    const double stop = 1e-15 * scale;
    const int max_sweeps = 64;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < d; ++p)
            for (Eigen::Index q = p + 1; q < d; ++q) off = std::max(off, std::abs(A(p, q)));
        if (off <= stop) break;

        for (Eigen::Index p = 0; p < d; ++p) {
            for (Eigen::Index q = p + 1; q < d; ++q) {
                const double apq = A(p, q);
                if (std::abs(apq) <= stop * 1e-2) continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (Eigen::Index k = 0; k < d; ++k) {
                    const double akp = A(k, p);
                    const double akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < d; ++k) {
                    const double apk = A(p, k);
                    const double aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                for (Eigen::Index k = 0; k < d; ++k) {
                    const double vkp = V(k, p);
                    const double vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    // Sort eigenpairs ascending for a deterministic ordering.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&A](Eigen::Index a, Eigen::Index b) { return A(a, a) < A(b, b); });

    values.resize(d);
    vectors.resize(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        values(i) = A(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
        vectors.col(i) = V.col(order[static_cast<std::size_t>(i)]);
    }
}

std::pair<double, double> eig_extrema_sym(const Mat& M) {
    require_finite(M, "eig_extrema_sym input");
    require_symmetric(M, default_sym_tol(M), "eig_extrema_sym input");
    Vec values;
    Mat vectors;
    eig_sym(M, values, vectors);
    return {values(0), values(values.size() - 1)};
}

Mat psd_sqrt(const Mat& M, double tol) {
    require_finite(M, "psd_sqrt input");
    require_symmetric(M, tol, "psd_sqrt input");

    Vec values;
    Mat vectors;
    eig_sym(M, values, vectors);

    if (values(0) < -tol) {
        throw NotPsdError("psd_sqrt: minimum eigenvalue " + std::to_string(values(0)) +
                          " below -tolerance " + std::to_string(-tol));
    }
    Vec roots = values.cwiseMax(0.0).cwiseSqrt();
    Mat S = vectors * roots.asDiagonal() * vectors.transpose();
    return 0.5 * (S + S.transpose());
}

Mat psd_sqrt(const Mat& M) { return psd_sqrt(M, default_sym_tol(M)); }

double spectral_norm(const Mat& M) {
    require_finite(M, "spectral_norm input");
    // Largest singular value via the symmetric Gram matrix; the smaller
    // Gram side keeps the Jacobi iteration cheap.
    Mat G;
    if (M.cols() <= M.rows()) {
        G = M.transpose() * M;
    } else {
        G = M * M.transpose();
    }
    Vec values;
    Mat vectors;
    eig_sym(G, values, vectors);
    return std::sqrt(std::max(0.0, values(values.size() - 1)));
}

double spectral_radius(const Mat& M) {
    require_finite(M, "spectral_radius input");
    require_square(M, "spectral_radius input");
    Eigen::EigenSolver<Mat> es(M, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
        throw Error("spectral_radius: eigenvalue iteration failed to converge");
    }
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

Mat solve_linear(const Mat& A, const Mat& B, double cond_tol) {
    require_finite(A, "solve_linear A");
    require_finite(B, "solve_linear B");
    require_square(A, "solve_linear A");
    if (A.rows() != B.rows()) {
        throw Error("solve_linear: dimension mismatch between A and B");
    }
    Eigen::PartialPivLU<Mat> lu(A);
    const double rcond = lu.rcond();
    if (!(rcond > 1.0 / cond_tol)) {
        throw SingularError("solve_linear: reciprocal condition estimate " +
                            std::to_string(rcond) + " below 1/cond_tol");
    }
    return lu.solve(B);
}

Mat solve_linear(const Mat& A, const Mat& B) { return solve_linear(A, B, kDefaultCondTol); }

Mat solve_stein(const Mat& Z, const Mat& Q) {
    require_finite(Z, "solve_stein Z");
    require_square(Z, "solve_stein Z");
    require_symmetric(Q, default_sym_tol(Q), "solve_stein Q");
    if (Q.rows() != Z.rows()) {
        throw Error("solve_stein: Q must match the dimension of Z");
    }

    const double rho = spectral_radius(Z);
    if (rho >= 1.0 - kSchurMargin) {
        throw NotSchurError("solve_stein: spectral radius " + std::to_string(rho) +
                            " is not strictly inside the unit circle");
    }

    // Vectorize Z^T P Z - P = -Q into (Z^T (x) Z^T - I) vec(P) = -vec(Q),
    // column-stacking order.
    const Eigen::Index d = Z.rows();
    const Eigen::Index dd = d * d;
    const Mat Zt = Z.transpose();
    Mat system(dd, dd);
    for (Eigen::Index bc = 0; bc < d; ++bc)
        for (Eigen::Index br = 0; br < d; ++br)
            system.block(br * d, bc * d, d, d) = Zt(br, bc) * Zt;
    system -= Mat::Identity(dd, dd);

    Mat rhs(dd, 1);
    for (Eigen::Index c = 0; c < d; ++c) rhs.block(c * d, 0, d, 1) = -Q.col(c);

    const Mat vec_p = solve_linear(system, rhs);
    Mat P(d, d);
    for (Eigen::Index c = 0; c < d; ++c) P.col(c) = vec_p.block(c * d, 0, d, 1);
    return 0.5 * (P + P.transpose());
}

}  // namespace utc
