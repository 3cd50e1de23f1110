#pragma once

#include <Eigen/Dense>

#include "gaussray/quad_diff.hpp"
#include "gaussray/solver.hpp"

namespace gaussray {

// Pointwise curvature data of the immersion described by a solution:
// principal curvature lambda = t sqrt(w0) e^{-2u} and intrinsic curvature
// K = -1 - lambda^2.
struct CurvatureReport {
    Vec lambda;
    Vec K;
    double t = 0.0;
    double lambdaMax = 0.0;
    bool almostFuchsian = false;  // lambdaMax < 1: complete normal bundle
    double gaussBonnetDefect = 0.0;
};

CurvatureReport curvatureReport(const Solution& sol, const SurfaceMesh& mesh, const Vec& w0);

struct AmbientMetricSample {
    Complex z;
    double r = 0.0;
    Eigen::Matrix2d g;
    bool degenerate = false;
};

// Explicit normal-bundle metric g(z,r) = e^{2v} [cosh(r) I + sinh(r) e^{-2v} A]^2
// at a canonical mesh vertex, with e^{2v} the induced metric density. The
// shape matrix A has eigenvalues +-lambda e^{2v}; its frame comes from the
// phase of alpha when a quadratic differential is supplied and is
// principal-frame-diagonal otherwise.
AmbientMetricSample ambientMetric(const Solution& sol, const SurfaceMesh& mesh, const Vec& w0,
                                  int canonicalVertex, double r,
                                  const QuadraticDifferential* qd = nullptr);

// Normal radius at which the metric degenerates: infinity when lambda < 1
// everywhere, otherwise min over vertices with lambda > 1 of atanh(1/lambda).
double degenerationRadius(const CurvatureReport& report);

struct TrendRow {
    double t = 0.0;
    double uInf = 0.0;        // max |u|
    double lambdaMax = 0.0;
    double maxAbsK = 0.0;
    double stabilized = 0.0;  // uInf + ln t
};

struct BlowupTrend {
    std::vector<TrendRow> rows;       // ordered by decreasing t
    bool uInfStrictlyIncreasing = false;
    bool maxKStrictlyIncreasing = false;
};

// Post-fold solutions interpolated (and Newton-polished) at each requested t;
// tracks the divergence of the conformal factor and intrinsic curvature as
// t decreases. Throws when the branch does not bracket a requested value.
BlowupTrend blowupTrend(const Branch& branch, const std::vector<double>& tSequence,
                        const SurfaceMesh& mesh, const Vec& w0);

}  // namespace gaussray
