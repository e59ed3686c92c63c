#include "fmcw/eig.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace fmcw {

namespace {

using cplx = std::complex<double>;

double off_diagonal_norm2(const Eigen::MatrixXcd& A) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
            if (i != j) s += std::norm(A(i, j));
        }
    }
    return s;
}

}  // namespace

HermitianEigen hermitian_eig(const Eigen::MatrixXcd& R) {
    if (R.rows() != R.cols()) throw std::invalid_argument("hermitian_eig: matrix must be square");
    const Eigen::Index n = R.rows();
    const double scale = n > 0 ? R.cwiseAbs().maxCoeff() : 0.0;
    const double asym = n > 0 ? (R - R.adjoint()).cwiseAbs().maxCoeff() : 0.0;
    if (asym > 1e-9 * std::max(scale, 1e-300) && asym > 0.0) {
        throw std::invalid_argument("hermitian_eig: matrix is not Hermitian");
    }

    // Work on the exactly Hermitian part.
    Eigen::MatrixXcd A = 0.5 * (R + R.adjoint());
    Eigen::MatrixXcd V = Eigen::MatrixXcd::Identity(n, n);

    const double total = A.squaredNorm();
    const double stop = total * 1e-32;
    int sweep = 0;
    for (; sweep < 100 && off_diagonal_norm2(A) > stop; ++sweep) {
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const cplx apq = A(p, q);
                const double mag = std::abs(apq);
                if (mag == 0.0) continue;

                // Remove the phase of A(p,q), then apply a real Jacobi rotation.
                const cplx phase = apq / mag;
                const double app = A(p, p).real(), aqq = A(q, q).real();
                const double theta = (aqq - app) / (2.0 * mag);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                // U restricted to (p, q): [[c, s], [-s·conj(phase), c·conj(phase)]].
                const cplx upp = c, upq = s, uqp = -s * std::conj(phase), uqq = c * std::conj(phase);

                for (Eigen::Index k = 0; k < n; ++k) {
                    const cplx akp = A(k, p), akq = A(k, q);
                    A(k, p) = akp * upp + akq * uqp;
                    A(k, q) = akp * upq + akq * uqq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const cplx apk = A(p, k), aqk = A(q, k);
                    A(p, k) = std::conj(upp) * apk + std::conj(uqp) * aqk;
                    A(q, k) = std::conj(upq) * apk + std::conj(uqq) * aqk;
                }
                A(p, q) = 0.0;
                A(q, p) = 0.0;
                A(p, p) = A(p, p).real();
                A(q, q) = A(q, q).real();

                for (Eigen::Index k = 0; k < n; ++k) {
                    const cplx vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = vkp * upp + vkq * uqp;
                    V(k, q) = vkp * upq + vkq * uqq;
                }
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return A(a, a).real() > A(b, b).real(); });

    HermitianEigen out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    out.sweeps = sweep;
    for (Eigen::Index i = 0; i < n; ++i) {
        out.values(i) = A(order[i], order[i]).real();
        out.vectors.col(i) = V.col(order[i]);
    }
    return out;
}

}  // namespace fmcw
