#pragma once

#include <Eigen/SparseCholesky>

#include "gaussray/solver.hpp"

namespace gaussray {

struct MountainPassError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// C^2 truncations of the Gauss nonlinearities:
//   F1(s) = s - e^{2s}/2 for s <= 0,   -s^theta for s >= 1,
//   F2(s) = (s^2 + e^{-2s})/2 for s <= 0,   0 for s >= 1,
// joined on (0,1) by quintic Hermite pieces (two for F1, one for F2) matching
// value and first two derivatives. The derivatives f_i = F_i' keep the signs
// f1 < 0 on s > 0 and f2 <= 0 everywhere; the constructor verifies both by
// dense sampling.
class SmoothedNonlinearity {
public:
    explicit SmoothedNonlinearity(double theta = 3.0);

    double theta() const { return theta_; }
    double F1(double s) const;
    double f1(double s) const;
    double F2(double s) const;
    double f2(double s) const;

private:
    double theta_;
    std::array<double, 6> f1Left_, f1Right_, f2Mid_;
};

// Discrete energy whose critical points solve the Gauss equation:
//   F(u) = 1/2 (u' K u + u' M_V u) - sum_v M_v (F1(u_v) + V_v F2(u_v)),
// with V = t^2 w0 and the V-inner product <f,g>_V = f'(K + M_V)g.
class TruncatedFunctional {
public:
    TruncatedFunctional(const SurfaceMesh& mesh, const Vec& w0, double t, double theta = 3.0);

    const SurfaceMesh& mesh() const { return *mesh_; }
    const Vec& V() const { return V_; }
    double t() const { return t_; }
    const SmoothedNonlinearity& bridge() const { return bridge_; }

    double value(const Vec& u, bool* clamped = nullptr) const;
    Vec euclideanGradient(const Vec& u) const;
    // Riesz representative of the differential in the V-inner product;
    // throws when V vanishes identically (degenerate at t = 0).
    Vec gradientV(const Vec& u) const;
    double vNorm(const Vec& g) const;

private:
    const SurfaceMesh* mesh_;
    Vec V_;
    double t_;
    SmoothedNonlinearity bridge_;
    Vec massV_;  // lumped mass times V
    SpMat vGram_;
    Eigen::SimplicialLLT<SpMat> vSolver_;
};

// Convenience wrappers matching the operation names.
inline double evalFunctional(const Vec& u, const TruncatedFunctional& tf, bool* clamped = nullptr) {
    return tf.value(u, clamped);
}
inline Vec gradientV(const Vec& u, const TruncatedFunctional& tf) { return tf.gradientV(u); }

// Discrete path from the stable solution (node 0) to a low-energy field
// (last node) with per-node energies; maxIndex marks the current crest.
struct PathState {
    std::vector<Vec> nodes;
    std::vector<double> energies;
    int maxIndex = 0;
};

struct MinimaxIterate {
    int iteration = 0;
    int maxNodeIndex = 0;
    double maxEnergy = 0.0;
    double gradVNorm = 0.0;
};

struct MinimaxTrace {
    std::vector<MinimaxIterate> rows;
    int pathNodes = 0;
    int retries = 0;
};

struct MountainPassOptions {
    int pathNodes = 21;       // nodes per path (endpoints included)
    double tol = 1e-3;        // minimax gradient target, scaled by 0.1
    int maxMinimaxIter = 20000;
    double newtonTol = 1e-10;
    int maxRetries = 3;
};

// Second solution by minimax over paths from the stable solution to a
// low-energy constant, descending the path maximum in the V-metric and
// polishing with Newton. Throws MountainPassError when no separating ridge
// exists (expected at and beyond the fold parameter). The final path of the
// successful attempt is written to `finalPath` when given.
Solution mountainPassSolve(const Solution& stable, const SurfaceMesh& mesh, const Vec& w0,
                           double t, const MountainPassOptions& opt = {},
                           MinimaxTrace* trace = nullptr, PathState* finalPath = nullptr);

}  // namespace gaussray
