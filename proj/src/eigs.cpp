#include "gaussray/eigs.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <stdexcept>

namespace gaussray {

namespace {

Vec deterministicStart(Eigen::Index n) {
    // Fixed pseudo-random start; avoids accidental M-orthogonality to the
    // target eigenvector without platform-dependent RNG.
    Vec x(n);
    std::uint64_t s = 0x9e3779b97f4a7c15ull;
    for (Eigen::Index i = 0; i < n; ++i) {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        x[i] = 0.5 + static_cast<double>(s % 1000003) / 1000003.0;
    }
    return x;
}

}  // namespace

EigenResult smallestPencilEigenvalue(const SpMat& A, const SpMat& M, double lowerBound,
                                     EigenContext* ctx, const Vec* deflate, double tol,
                                     int maxIter) {
    const Eigen::Index n = A.rows();
    if (M.rows() != n || A.cols() != n) throw std::invalid_argument("pencil size mismatch");

    auto mdot = [&M](const Vec& x, const Vec& y) { return x.dot(M * y); };

    Vec defl;
    double deflNorm2 = 0.0;
    if (deflate) {
        defl = *deflate;
        deflNorm2 = mdot(defl, defl);
    }
    auto project = [&](Vec& x) {
        if (deflate) x -= (mdot(defl, x) / deflNorm2) * defl;
    };

    double shift = (ctx && ctx->valid) ? ctx->shift : lowerBound - 0.5;
    Eigen::SimplicialLLT<SpMat> llt;
    auto factor = [&](double s) {
        SpMat B = A - s * M;
        llt.compute(B);
        return llt.info() == Eigen::Success;
    };
    if (!factor(shift)) {
        shift = lowerBound - 0.5;
        if (!factor(shift))
            throw std::runtime_error("smallestPencilEigenvalue: shifted matrix not positive definite");
    }

    Vec x = (ctx && ctx->valid && ctx->vector.size() == n) ? ctx->vector : deterministicStart(n);
    project(x);
    x /= std::sqrt(mdot(x, x));

    double rho = x.dot(A * x);
    EigenResult res;
    int reshifts = 0;
    for (int it = 0; it < maxIter; ++it) {
        Vec y = llt.solve(M * x);
        project(y);
        const double norm = std::sqrt(mdot(y, y));
        if (!(norm > 0) || !std::isfinite(norm))
            throw std::runtime_error("smallestPencilEigenvalue: iteration broke down");
        x = y / norm;
        const double rhoNew = x.dot(A * x);
        const double change = std::abs(rhoNew - rho);
        rho = rhoNew;
        res.iterations = it + 1;
        if (change <= tol * std::max(1.0, std::abs(rho))) {
            // One shift update sharpens slow convergence when the gap to the
            // next eigenvalue is small relative to the distance to the shift.
            if (reshifts < 2 && rho - shift > 1e-3 * std::max(1.0, std::abs(rho))) {
                const double candidate = rho - 1e-3 * std::max(1.0, std::abs(rho));
                if (candidate > shift && factor(candidate)) {
                    shift = candidate;
                    ++reshifts;
                    continue;
                }
                factor(shift);
            }
            break;
        }
    }

    res.value = rho;
    res.vector = x;
    if (ctx) {
        ctx->vector = x;
        ctx->shift = shift;
        ctx->valid = true;
    }
    return res;
}

}  // namespace gaussray
