#include "gaussray/mountain_pass.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace gaussray {

namespace {

// Coefficients of the quintic matching value and first two derivatives at
// the interval ends.
std::array<double, 6> hermiteQuintic(double x0, double x1, const std::array<double, 3>& left,
                                     const std::array<double, 3>& right) {
    Eigen::Matrix<double, 6, 6> A;
    Eigen::Matrix<double, 6, 1> b;
    const std::array<std::pair<double, int>, 6> rows = {
        {{x0, 0}, {x0, 1}, {x0, 2}, {x1, 0}, {x1, 1}, {x1, 2}}};
    for (int r = 0; r < 6; ++r) {
        const auto [x, der] = rows[r];
        for (int i = 0; i < 6; ++i) {
            double c = 0.0;
            if (i >= der) {
                c = 1.0;
                for (int k = 0; k < der; ++k) c *= (i - k);
                c *= std::pow(x, i - der);
            }
            A(r, i) = c;
        }
        b[r] = r < 3 ? left[r] : right[r - 3];
    }
    const Eigen::Matrix<double, 6, 1> sol = A.fullPivLu().solve(b);
    std::array<double, 6> out;
    for (int i = 0; i < 6; ++i) out[i] = sol[i];
    return out;
}

double polyVal(const std::array<double, 6>& c, double s) {
    double v = 0.0;
    for (int i = 5; i >= 0; --i) v = v * s + c[i];
    return v;
}

double polyDer(const std::array<double, 6>& c, double s) {
    double v = 0.0;
    for (int i = 5; i >= 1; --i) v = v * s + i * c[i];
    return v;
}

}  // namespace

SmoothedNonlinearity::SmoothedNonlinearity(double theta) : theta_(theta) {
    if (!(theta > 2.0)) throw std::invalid_argument("SmoothedNonlinearity: theta must exceed 2");

    // Interior knot at s = 1/2 shaped to keep f1 strictly negative on (0,1);
    // a single quintic pinned at both ends cannot stay sign-valid.
    const std::array<double, 3> atZero = {-0.5, 0.0, -2.0};
    const std::array<double, 3> knot = {-0.55, -0.25, -2.75};
    const std::array<double, 3> atOne = {-1.0, -theta, -theta * (theta - 1.0)};
    f1Left_ = hermiteQuintic(0.0, 0.5, atZero, knot);
    f1Right_ = hermiteQuintic(0.5, 1.0, knot, atOne);
    f2Mid_ = hermiteQuintic(0.0, 1.0, {0.5, -1.0, 3.0}, {0.0, 0.0, 0.0});

    for (int i = 1; i <= 4000; ++i) {
        const double s = i / 4000.0;
        if (!(f1(s) < 0.0))
            throw std::invalid_argument("SmoothedNonlinearity: f1 sign condition failed");
        if (!(f2(s) <= 1e-15))
            throw std::invalid_argument("SmoothedNonlinearity: f2 sign condition failed");
    }
}

double SmoothedNonlinearity::F1(double s) const {
    if (s <= 0.0) return s - 0.5 * std::exp(2.0 * s);
    if (s >= 1.0) return -std::pow(s, theta_);
    return s < 0.5 ? polyVal(f1Left_, s) : polyVal(f1Right_, s);
}

double SmoothedNonlinearity::f1(double s) const {
    if (s <= 0.0) return 1.0 - std::exp(2.0 * s);
    if (s >= 1.0) return -theta_ * std::pow(s, theta_ - 1.0);
    return s < 0.5 ? polyDer(f1Left_, s) : polyDer(f1Right_, s);
}

double SmoothedNonlinearity::F2(double s) const {
    if (s <= 0.0) return 0.5 * (s * s + std::exp(-2.0 * s));
    if (s >= 1.0) return 0.0;
    return polyVal(f2Mid_, s);
}

double SmoothedNonlinearity::f2(double s) const {
    if (s <= 0.0) return s - std::exp(-2.0 * s);
    if (s >= 1.0) return 0.0;
    return polyDer(f2Mid_, s);
}

TruncatedFunctional::TruncatedFunctional(const SurfaceMesh& mesh, const Vec& w0, double t,
                                         double theta)
    : mesh_(&mesh), V_((t * t) * w0), t_(t), bridge_(theta) {
    if (w0.size() != mesh.numCanonical())
        throw std::invalid_argument("TruncatedFunctional: weight size mismatch");
    massV_ = mesh.lumpedMass.cwiseProduct(V_);
    if (massV_.sum() > 0.0) {
        vGram_ = mesh.stiffness;
        for (Eigen::Index i = 0; i < massV_.size(); ++i) vGram_.coeffRef(i, i) += massV_[i];
        vGram_.makeCompressed();
        vSolver_.compute(vGram_);
        if (vSolver_.info() != Eigen::Success)
            throw std::runtime_error("TruncatedFunctional: V-inner product factorization failed");
    }
}

double TruncatedFunctional::value(const Vec& u, bool* clamped) const {
    bool didClamp = false;
    double nonlinear = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        double s = u[i];
        if (s < -350.0) {
            s = -350.0;  // fields this negative indicate divergence upstream
            didClamp = true;
        }
        nonlinear += mesh_->lumpedMass[i] * (bridge_.F1(s) + V_[i] * bridge_.F2(s));
    }
    if (clamped) *clamped = didClamp;
    const double quad = 0.5 * (u.dot(mesh_->stiffness * u) + u.dot(massV_.cwiseProduct(u)));
    return quad - nonlinear;
}

Vec TruncatedFunctional::euclideanGradient(const Vec& u) const {
    Vec g = mesh_->stiffness * u + massV_.cwiseProduct(u);
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double s = std::max(u[i], -350.0);
        g[i] -= mesh_->lumpedMass[i] * (bridge_.f1(s) + V_[i] * bridge_.f2(s));
    }
    return g;
}

Vec TruncatedFunctional::gradientV(const Vec& u) const {
    if (!(massV_.sum() > 0.0))
        throw std::invalid_argument("gradientV: V vanishes identically (t = 0 is degenerate)");
    return vSolver_.solve(euclideanGradient(u));
}

double TruncatedFunctional::vNorm(const Vec& g) const {
    return std::sqrt(g.dot(vGram_ * g));
}

Solution mountainPassSolve(const Solution& stable, const SurfaceMesh& mesh, const Vec& w0,
                           double t, const MountainPassOptions& opt, MinimaxTrace* trace,
                           PathState* finalPath) {
    if (!stable.converged) throw std::invalid_argument("mountainPassSolve: stable solution required");
    if (!(stable.mu1 > 0)) throw std::invalid_argument("mountainPassSolve: starting point unstable");
    if (!(t > 0)) throw std::invalid_argument("mountainPassSolve: t must be positive");

    const TruncatedFunctional tf(mesh, w0, t, 3.0);
    const Eigen::Index n = mesh.numCanonical();
    const double energyStable = tf.value(stable.u);

    // Low-energy endpoint: scan negative constants until well below the well.
    Vec w;
    {
        double c = -1.0;
        while (c > -400.0) {
            Vec cand = Vec::Constant(n, c);
            if (tf.value(cand) < energyStable - 1.0) {
                w = cand;
                break;
            }
            c -= 1.0;
        }
        if (w.size() == 0) throw MountainPassError("mountainPassSolve: no low-energy endpoint");
    }

    const double scale = std::max(1.0, tf.vNorm(stable.u));
    const double gradTarget = 0.1 * opt.tol * scale;

    int pathNodes = opt.pathNodes;
    for (int attempt = 0; attempt <= opt.maxRetries; ++attempt, pathNodes *= 2) {
        if (trace && attempt > 0) ++trace->retries;
        if (trace) trace->pathNodes = pathNodes;

        const int P = pathNodes - 1;
        std::vector<Vec> nodes(P + 1);
        for (int i = 0; i <= P; ++i) {
            const double a = static_cast<double>(i) / P;
            nodes[i] = (1.0 - a) * stable.u + a * w;
        }
        std::vector<double> energy(P + 1);
        for (int i = 0; i <= P; ++i) energy[i] = tf.value(nodes[i]);

        // Keep the crossing covered: descent drains nodes off the ridge, so
        // every sweep re-samples the polyline at uniform V-arclength before
        // descending the maximal node. Returns the path length.
        auto redistribute = [&]() {
            std::vector<double> cum(P + 1, 0.0);
            for (int i = 1; i <= P; ++i)
                cum[i] = cum[i - 1] + tf.vNorm(nodes[i] - nodes[i - 1]);
            if (cum[P] <= 0) return 0.0;
            std::vector<Vec> fresh(P + 1);
            fresh[0] = nodes[0];
            fresh[P] = nodes[P];
            int seg = 1;
            for (int i = 1; i < P; ++i) {
                const double target = cum[P] * i / P;
                while (seg < P && cum[seg] < target) ++seg;
                const double span = cum[seg] - cum[seg - 1];
                const double a = (span <= 0) ? 0.0 : (target - cum[seg - 1]) / span;
                fresh[i] = (1.0 - a) * nodes[seg - 1] + a * nodes[seg];
            }
            nodes = std::move(fresh);
            for (int i = 0; i <= P; ++i) energy[i] = tf.value(nodes[i]);
            return cum[P];
        };

        const double energyFloor = tf.value(w);
        int maxIdx = 1;
        bool ready = false;
        double bestLevel = 1e300;
        int sinceImprovement = 0;
        double stepMax = 0.0;
        for (int it = 0; it < opt.maxMinimaxIter; ++it) {
            // The well below the saddle is bottomless; cut the path where it
            // has fallen to the endpoint level so its length stays bounded
            // and the crest keeps its sampling resolution.
            for (int k = 1; k <= P; ++k) {
                if (energy[k] > energyFloor) continue;
                for (int j = k + 1; j <= P; ++j) {
                    nodes[j] = nodes[k];
                    energy[j] = energy[k];
                }
                break;
            }
            const double pathLength = redistribute();
            if (it == 0) stepMax = std::max(pathLength / P, 1e-6);
            maxIdx = 1;
            for (int i = 2; i < P; ++i)
                if (energy[i] > energy[maxIdx]) maxIdx = i;

            const Vec g = tf.gradientV(nodes[maxIdx]);
            const double gn = tf.vNorm(g);
            if (trace) trace->rows.push_back({it, maxIdx, energy[maxIdx], gn});
            if (gn <= gradTarget) {
                ready = true;
                break;
            }

            // Stalled minimax: the path set has stopped deforming (typical
            // once the maximal node hovers at the saddle); Newton finishes.
            if (energy[maxIdx] < bestLevel - 1e-11 * (1.0 + std::abs(bestLevel))) {
                bestLevel = energy[maxIdx];
                sinceImprovement = 0;
            } else if (++sinceImprovement > 40) {
                ready = true;
                break;
            }

            // Trust region of one initial node spacing: monster steps would
            // fling nodes across the ridge and leave the crossing unsampled.
            auto descend = [&](int i, const Vec& grad, double norm, int tries) {
                double beta = std::min(1.0, stepMax / norm);
                for (int h = 0; h < tries; ++h) {
                    const Vec cand = nodes[i] - beta * grad;
                    const double e = tf.value(cand);
                    if (e < energy[i] - 1e-4 * beta * norm * norm) {
                        nodes[i] = cand;
                        energy[i] = e;
                        return true;
                    }
                    beta *= 0.5;
                }
                return false;
            };

            if (!descend(maxIdx, g, gn, 40)) {
                ready = true;  // descent exhausted at the crest
                break;
            }

            // Flow the rest of the path downhill as well: deforming one node
            // per sweep equilibrates against the re-sampling and stalls far
            // above the saddle on long ridges.
            for (int i = 1; i < P; ++i) {
                if (i == maxIdx) continue;
                const Vec gi = tf.gradientV(nodes[i]);
                const double gni = tf.vNorm(gi);
                if (gni > gradTarget) descend(i, gi, gni, 8);
            }

            // Relax the neighbors toward local averages when that lowers them.
            for (int j : {maxIdx - 1, maxIdx + 1}) {
                if (j <= 0 || j >= P) continue;
                const Vec cand = 0.5 * (nodes[j - 1] + nodes[j + 1]);
                const double e = tf.value(cand);
                if (e < energy[j]) {
                    nodes[j] = cand;
                    energy[j] = e;
                }
            }
        }
        if (!ready) continue;

        Solution polished;
        try {
            polished = newtonSolve(mesh, w0, nodes[maxIdx], t, opt.newtonTol);
        } catch (const SolverError&) {
            continue;  // retry with a denser path
        }
        if (!polished.converged) continue;
        if ((polished.u - stable.u).lpNorm<Eigen::Infinity>() <= 1e-6) continue;
        if (!(polished.mu1 < 0 || std::abs(polished.mu1) <= 1e-6)) continue;
        if (finalPath) {
            finalPath->nodes = nodes;
            finalPath->energies = energy;
            finalPath->maxIndex = maxIdx;
        }
        return polished;
    }
    throw MountainPassError(
        "mountainPassSolve: no separating ridge found (expected at or beyond the fold)");
}

}  // namespace gaussray
