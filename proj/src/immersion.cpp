#include "gaussray/immersion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gaussray {

CurvatureReport curvatureReport(const Solution& sol, const SurfaceMesh& mesh, const Vec& w0) {
    if (!sol.converged) throw std::invalid_argument("curvatureReport: solution not converged");
    CurvatureReport rep;
    rep.t = sol.t;
    rep.lambda = Vec(mesh.numCanonical());
    rep.K = Vec(mesh.numCanonical());
    for (Eigen::Index i = 0; i < rep.lambda.size(); ++i) {
        const double l = sol.t * std::sqrt(w0[i]) * std::exp(-2.0 * sol.u[i]);
        rep.lambda[i] = l;
        rep.K[i] = -1.0 - l * l;
    }
    rep.lambdaMax = rep.lambda.maxCoeff();
    rep.almostFuchsian = rep.lambdaMax < 1.0;

    // integral of K e^{2u} dA = -(integral of e^{2u} + t^2 w0 e^{-2u} dA) = -4*pi.
    rep.gaussBonnetDefect = gaussIdentityDefect(mesh, sol.u, sol.t, w0);
    return rep;
}

AmbientMetricSample ambientMetric(const Solution& sol, const SurfaceMesh& mesh, const Vec& w0,
                                  int canonicalVertex, double r,
                                  const QuadraticDifferential* qd) {
    if (!sol.converged) throw std::invalid_argument("ambientMetric: solution not converged");
    if (canonicalVertex < 0 || canonicalVertex >= mesh.numCanonical())
        throw std::invalid_argument("ambientMetric: vertex out of range");

    AmbientMetricSample s;
    s.z = mesh.canonicalPoint(canonicalVertex);
    s.r = r;

    const double e2v = std::exp(2.0 * sol.u[canonicalVertex]) * metricDensity(s.z);
    const double lambda = sol.t * std::sqrt(w0[canonicalVertex]) *
                          std::exp(-2.0 * sol.u[canonicalVertex]);

    // Shape matrix A = [[h11, h12], [h12, -h11]] with h = Re(t alpha dz^2);
    // eigenvalues +-lambda e^{2v}. Without the phase of alpha only the
    // principal frame is determined, which fixes every scalar invariant.
    Eigen::Matrix2d A;
    if (qd) {
        const Complex a = sol.t * evaluateQD(*qd, s.z);
        A << a.real(), -a.imag(), -a.imag(), -a.real();
    } else {
        const double h = lambda * e2v;
        A << h, 0.0, 0.0, -h;
    }

    const Eigen::Matrix2d bracket =
        std::cosh(r) * Eigen::Matrix2d::Identity() + (std::sinh(r) / e2v) * A;
    s.g = e2v * (bracket * bracket);

    // Bracket eigenvalues are cosh(r) +- lambda sinh(r).
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(bracket);
    s.degenerate = es.eigenvalues().minCoeff() <= 0.0;
    return s;
}

double degenerationRadius(const CurvatureReport& report) {
    if (report.lambdaMax < 1.0) return std::numeric_limits<double>::infinity();
    double rStar = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < report.lambda.size(); ++i)
        if (report.lambda[i] > 1.0) rStar = std::min(rStar, std::atanh(1.0 / report.lambda[i]));
    return rStar;
}

BlowupTrend blowupTrend(const Branch& branch, const std::vector<double>& tSequence,
                        const SurfaceMesh& mesh, const Vec& w0) {
    BlowupTrend trend;
    for (double t : tSequence) {
        const Solution s = solutionAt(branch, mesh, w0, t, BranchSide::PostFold);
        const CurvatureReport rep = curvatureReport(s, mesh, w0);
        TrendRow row;
        row.t = t;
        row.uInf = s.u.lpNorm<Eigen::Infinity>();
        row.lambdaMax = rep.lambdaMax;
        row.maxAbsK = rep.K.cwiseAbs().maxCoeff();
        row.stabilized = row.uInf + std::log(t);
        trend.rows.push_back(row);
    }
    trend.uInfStrictlyIncreasing = true;
    trend.maxKStrictlyIncreasing = true;
    for (std::size_t i = 1; i < trend.rows.size(); ++i) {
        if (!(trend.rows[i].uInf > trend.rows[i - 1].uInf)) trend.uInfStrictlyIncreasing = false;
        if (!(trend.rows[i].maxAbsK > trend.rows[i - 1].maxAbsK))
            trend.maxKStrictlyIncreasing = false;
    }
    return trend;
}

}  // namespace gaussray
