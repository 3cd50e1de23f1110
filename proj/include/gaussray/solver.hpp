#pragma once

#include <optional>
#include <stdexcept>

#include "gaussray/eigs.hpp"
#include "gaussray/mesh.hpp"

namespace gaussray {

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One state of the Gauss equation Delta u + 1 - e^{2u} - t^2 w0 e^{-2u} = 0.
struct Solution {
    Vec u;                      // canonical vertex field (log conformal factor)
    double t = 0.0;             // ray parameter
    double residualNorm = 0.0;  // discrete L2 norm of the vertex residual
    double mu1 = 0.0;           // first eigenvalue of the linearized operator
    bool converged = false;
};

struct BranchPoint {
    Solution sol;
    double s = 0.0;  // arclength coordinate
};

struct Branch {
    std::vector<BranchPoint> points;
    std::optional<double> foldParameter;
    std::optional<Solution> foldSolution;
    int foldIndex = -1;  // index of the located fold point in `points`
    bool aborted = false;
    std::string abortReason;
};

struct StepControl {
    double dtNatural = 0.01;
    double dsArc = 0.02;
    double dsMax = 0.2;
    double muSwitch = 0.2;   // switch to arclength once mu1 drops below this
    double tMin = 1e-3;      // stop once the post-fold branch reaches this
    int maxSteps = 5000;
    double foldMuTol = 1e-6;
    double foldSTol = 1e-10;
    double newtonTol = 1e-10;
    int newtonMaxIter = 50;
};

// Vertex residual M^{-1}(-K u) + 1 - e^{2u} - t^2 w0 e^{-2u}.
Vec residualField(const SurfaceMesh& mesh, const Vec& u, double t, const Vec& w0);

// sqrt(sum_v M_v r_v^2) of a vertex field.
double fieldNorm(const SurfaceMesh& mesh, const Vec& r);

enum class MassModel { Lumped, Consistent };

struct LinearizedPencil {
    SpMat A;  // K + mass-weighted 2(e^{2u} - t^2 w0 e^{-2u})
    SpMat M;
    double eigenLowerBound = 0.0;  // rigorous bound below the smallest eigenvalue
};

LinearizedPencil linearizedOperator(const SurfaceMesh& mesh, const Vec& u, double t,
                                    const Vec& w0, MassModel model = MassModel::Consistent);

// First eigenvalue of the linearized operator (consistent-mass pencil).
EigenResult stabilityEigenvalue(const SurfaceMesh& mesh, const Vec& u, double t, const Vec& w0,
                                EigenContext* ctx = nullptr);

// Damped Newton iteration at fixed t. On convergence mu1 is filled in.
// Throws SolverError when the linearized solve degenerates (fold proximity).
Solution newtonSolve(const SurfaceMesh& mesh, const Vec& w0, const Vec& u0, double t,
                     double newtonTol = 1e-10, int maxIter = 50, EigenContext* eigCtx = nullptr);

// Traces the solution curve from (u=0, t=0) through the fold: natural
// stepping while mu1 is comfortably positive, pseudo-arclength near and past
// the fold, fold located by bisection on mu1 along arclength.
Branch continueBranch(const SurfaceMesh& mesh, const Vec& w0, const StepControl& sc = {});

struct AttemptResult {
    bool converged = false;
    double uMin = 0.0;
    double uMax = 0.0;
    double residualNorm = 0.0;
};

struct NoSolutionReport {
    double t = 0.0;
    double bound = 0.0;
    bool certifiedByBound = false;
    int attempts = 0;
    std::vector<AttemptResult> endpoints;
    std::vector<Solution> distinctSolutions;
};

// Certified nonexistence when t reaches the integral bound, otherwise an
// empirical sweep of randomized Newton starts.
NoSolutionReport certifyNoSolution(const SurfaceMesh& mesh, const Vec& w0, double t,
                                   int attempts = 20, std::uint64_t seed = 12345);

enum class BranchSide { Stable, PostFold };

// Solution at an exact parameter value on the requested side of the fold:
// bracketing branch points are interpolated and polished by Newton.
Solution solutionAt(const Branch& branch, const SurfaceMesh& mesh, const Vec& w0, double t,
                    BranchSide side, double newtonTol = 1e-10);

// | integral of (e^{2u} + t^2 w0 e^{-2u}) dA  -  4*pi |, evaluated by
// metric-weighted quadrature with linear interpolation; an independent check
// of the identity satisfied by every solution.
double gaussIdentityDefect(const SurfaceMesh& mesh, const Vec& u, double t, const Vec& w0);

}  // namespace gaussray
