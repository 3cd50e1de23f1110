#include "gaussray/solver.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace gaussray {

namespace {

constexpr double kPi = std::numbers::pi;

Vec expVec(const Vec& u, double factor) {
    Vec e(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) e[i] = std::exp(factor * u[i]);
    return e;
}

// -K u + m .* (1 - e^{2u} - t^2 w0 e^{-2u}); the residual in mass units.
Vec gaussVector(const SurfaceMesh& mesh, const Vec& u, double t, const Vec& w0) {
    const Vec e2 = expVec(u, 2.0), em2 = expVec(u, -2.0);
    const Vec nl = Vec::Ones(u.size()) - e2 - (t * t) * w0.cwiseProduct(em2);
    return -(mesh.stiffness * u) + mesh.lumpedMass.cwiseProduct(nl);
}

SpMat lumpedOperator(const SurfaceMesh& mesh, const Vec& q) {
    SpMat A = mesh.stiffness;
    SpMat D(A.rows(), A.cols());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(q.size());
    for (Eigen::Index i = 0; i < q.size(); ++i)
        trip.emplace_back(i, i, mesh.lumpedMass[i] * q[i]);
    D.setFromTriplets(trip.begin(), trip.end());
    return A + D;
}

Vec stabilityWeight(const Vec& u, double t, const Vec& w0) {
    const Vec e2 = expVec(u, 2.0), em2 = expVec(u, -2.0);
    return 2.0 * (e2 - (t * t) * w0.cwiseProduct(em2));
}

struct BorderedSolver {
    // Newton corrector for the extended system (G(u,t) = 0, arclength row).
    const SurfaceMesh& mesh;
    const Vec& w0;

    bool solveStep(Vec& u, double& t, const Vec& tangentU, double tangentT, const Vec& anchorU,
                   double anchorT, double ds, double tol, int maxIter) const {
        const Eigen::Index n = u.size();
        const Vec mTan = mesh.lumpedMass.cwiseProduct(tangentU);
        for (int it = 0; it < maxIter; ++it) {
            const Vec g = gaussVector(mesh, u, t, w0);
            const double nRes = mTan.dot(u - anchorU) + tangentT * (t - anchorT) - ds;
            const Vec rField = g.cwiseQuotient(mesh.lumpedMass);
            if (fieldNorm(mesh, rField) <= tol && std::abs(nRes) <= tol) return true;

            const Vec q = stabilityWeight(u, t, w0);
            const Vec em2 = expVec(u, -2.0);
            const Vec gT = -2.0 * t * mesh.lumpedMass.cwiseProduct(w0.cwiseProduct(em2));

            std::vector<Eigen::Triplet<double>> trip;
            const SpMat AL = lumpedOperator(mesh, q);
            trip.reserve(AL.nonZeros() + 2 * n + 1);
            for (int k = 0; k < AL.outerSize(); ++k)
                for (SpMat::InnerIterator itA(AL, k); itA; ++itA)
                    trip.emplace_back(static_cast<int>(itA.row()), static_cast<int>(itA.col()),
                                      -itA.value());
            for (Eigen::Index i = 0; i < n; ++i) {
                trip.emplace_back(static_cast<int>(i), static_cast<int>(n), gT[i]);
                trip.emplace_back(static_cast<int>(n), static_cast<int>(i), mTan[i]);
            }
            trip.emplace_back(static_cast<int>(n), static_cast<int>(n), tangentT);
            SpMat J(n + 1, n + 1);
            J.setFromTriplets(trip.begin(), trip.end());

            Eigen::SparseLU<SpMat> lu(J);
            if (lu.info() != Eigen::Success) return false;
            Vec rhs(n + 1);
            rhs.head(n) = -g;
            rhs[n] = -nRes;
            const Vec d = lu.solve(rhs);
            if (!d.allFinite()) return false;
            u += d.head(n);
            t += d[n];
        }
        return false;
    }
};

double branchStepLength(const SurfaceMesh& mesh, const Vec& du, double dt) {
    return std::sqrt(du.dot(mesh.lumpedMass.cwiseProduct(du)) + dt * dt);
}

}  // namespace

Vec residualField(const SurfaceMesh& mesh, const Vec& u, double t, const Vec& w0) {
    if (u.size() != mesh.numCanonical() || w0.size() != mesh.numCanonical())
        throw std::invalid_argument("residualField: field size mismatch");
    if (!u.allFinite()) throw SolverError("residualField: non-finite input field");
    const Vec g = gaussVector(mesh, u, t, w0);
    const Vec r = g.cwiseQuotient(mesh.lumpedMass);
    if (!r.allFinite()) throw SolverError("residualField: non-finite residual");
    return r;
}

double fieldNorm(const SurfaceMesh& mesh, const Vec& r) {
    return std::sqrt(r.dot(mesh.lumpedMass.cwiseProduct(r)));
}

LinearizedPencil linearizedOperator(const SurfaceMesh& mesh, const Vec& u, double t,
                                    const Vec& w0, MassModel model) {
    const Vec q = stabilityWeight(u, t, w0);
    LinearizedPencil p;
    p.eigenLowerBound = q.minCoeff();
    if (model == MassModel::Lumped) {
        p.A = lumpedOperator(mesh, q);
        SpMat M(mesh.numCanonical(), mesh.numCanonical());
        std::vector<Eigen::Triplet<double>> trip;
        for (Eigen::Index i = 0; i < q.size(); ++i) trip.emplace_back(i, i, mesh.lumpedMass[i]);
        M.setFromTriplets(trip.begin(), trip.end());
        p.M = M;
    } else {
        p.A = mesh.stiffness + assembleConsistentMass(mesh, q);
        p.M = assembleConsistentMass(mesh);
    }
    return p;
}

EigenResult stabilityEigenvalue(const SurfaceMesh& mesh, const Vec& u, double t, const Vec& w0,
                                EigenContext* ctx) {
    const LinearizedPencil p = linearizedOperator(mesh, u, t, w0, MassModel::Consistent);
    return smallestPencilEigenvalue(p.A, p.M, p.eigenLowerBound, ctx);
}

Solution newtonSolve(const SurfaceMesh& mesh, const Vec& w0, const Vec& u0, double t,
                     double newtonTol, int maxIter, EigenContext* eigCtx) {
    if (!u0.allFinite()) throw std::invalid_argument("newtonSolve: non-finite start");
    Solution sol;
    sol.t = t;
    sol.u = u0;

    double rnorm = fieldNorm(mesh, residualField(mesh, sol.u, t, w0));
    for (int it = 0; it < maxIter && rnorm > newtonTol; ++it) {
        const Vec q = stabilityWeight(sol.u, t, w0);
        const SpMat A = lumpedOperator(mesh, q);
        const Vec g = gaussVector(mesh, sol.u, t, w0);
        Eigen::SparseLU<SpMat> lu(A);
        if (lu.info() != Eigen::Success)
            throw SolverError("newtonSolve: linearized operator singular (fold proximity); "
                              "use arclength continuation");
        const Vec d = lu.solve(g);
        if (!d.allFinite() || d.lpNorm<Eigen::Infinity>() > 1e13 * std::max(1.0, sol.u.lpNorm<Eigen::Infinity>()))
            throw SolverError("newtonSolve: linearized solve degenerated (fold proximity); "
                              "use arclength continuation");

        double beta = 1.0;
        bool accepted = false;
        for (int h = 0; h < 12; ++h) {
            const Vec cand = sol.u + beta * d;
            double cnorm;
            try {
                cnorm = fieldNorm(mesh, residualField(mesh, cand, t, w0));
            } catch (const SolverError&) {
                beta *= 0.5;
                continue;
            }
            if (cnorm < rnorm) {
                sol.u = cand;
                rnorm = cnorm;
                accepted = true;
                break;
            }
            beta *= 0.5;
        }
        if (!accepted) break;  // stalled; reported as non-converged below
    }

    sol.residualNorm = rnorm;
    sol.converged = rnorm <= newtonTol;
    if (sol.converged) sol.mu1 = stabilityEigenvalue(mesh, sol.u, t, w0, eigCtx).value;
    return sol;
}

Branch continueBranch(const SurfaceMesh& mesh, const Vec& w0, const StepControl& sc) {
    if (w0.maxCoeff() <= 0.0)
        throw std::invalid_argument("continueBranch: weight must not vanish identically");
    const Eigen::Index n = mesh.numCanonical();
    Branch br;
    EigenContext eigCtx;

    auto record = [&](const Solution& s, double arclength) {
        br.points.push_back({s, arclength});
    };

    // Trivial start: u = 0 at t = 0 is an exact solution.
    {
        Solution s0;
        s0.u = Vec::Zero(n);
        s0.t = 0.0;
        s0.residualNorm = fieldNorm(mesh, residualField(mesh, s0.u, 0.0, w0));
        s0.converged = true;
        s0.mu1 = stabilityEigenvalue(mesh, s0.u, 0.0, w0, &eigCtx).value;
        record(s0, 0.0);
    }

    int steps = 0;
    // Natural parameter phase.
    while (br.points.back().sol.mu1 >= sc.muSwitch && steps < sc.maxSteps) {
        const BranchPoint prev = br.points.back();
        bool advanced = false;
        try {
            Solution s = newtonSolve(mesh, w0, prev.sol.u, prev.sol.t + sc.dtNatural,
                                     sc.newtonTol, sc.newtonMaxIter, &eigCtx);
            if (s.converged) {
                const double ds = branchStepLength(mesh, s.u - prev.sol.u, sc.dtNatural);
                record(s, prev.s + ds);
                advanced = true;
            }
        } catch (const SolverError&) {
            // fold proximity: fall through to arclength
        }
        ++steps;
        if (!advanced) break;
    }

    if (br.points.size() < 2) {
        // Fold closer than one natural step; take a miniature step to obtain
        // a usable secant tangent.
        Solution s = newtonSolve(mesh, w0, br.points[0].sol.u, sc.dtNatural / 16.0, sc.newtonTol,
                                 sc.newtonMaxIter, &eigCtx);
        if (!s.converged) throw SolverError("continueBranch: could not leave the trivial solution");
        record(s, branchStepLength(mesh, s.u - br.points[0].sol.u, s.t));
    }

    // Pseudo-arclength phase.
    BorderedSolver bs{mesh, w0};
    double ds = sc.dsArc;
    bool foldLocated = false;
    int halvings = 0;
    while (steps < sc.maxSteps) {
        ++steps;
        const BranchPoint pPrev = br.points[br.points.size() - 2];
        const BranchPoint pCur = br.points.back();

        Vec tanU = pCur.sol.u - pPrev.sol.u;
        double tanT = pCur.sol.t - pPrev.sol.t;
        const double len = branchStepLength(mesh, tanU, tanT);
        tanU /= len;
        tanT /= len;

        Vec u = pCur.sol.u + ds * tanU;
        double t = pCur.sol.t + ds * tanT;
        const bool ok = bs.solveStep(u, t, tanU, tanT, pCur.sol.u, pCur.sol.t, ds, sc.newtonTol,
                                     sc.newtonMaxIter) && t > 0;
        if (!ok) {
            ds *= 0.5;
            if (++halvings > 8) {
                br.aborted = true;
                br.abortReason = "arclength step failed after 8 halvings";
                break;
            }
            continue;
        }
        halvings = 0;

        Solution s;
        s.u = u;
        s.t = t;
        s.residualNorm = fieldNorm(mesh, residualField(mesh, u, t, w0));
        s.converged = true;
        s.mu1 = stabilityEigenvalue(mesh, u, t, w0, &eigCtx).value;
        const double stepUsed = ds;
        record(s, pCur.s + stepUsed);
        ds = std::min(ds * 1.3, sc.dsMax);

        // Fold: first sign change of mu1, refined by bisection in arclength.
        if (!foldLocated && pCur.sol.mu1 > 0 && s.mu1 < 0) {
            double lo = 0.0, hi = stepUsed;
            Solution foldSol = s;
            EigenContext foldCtx = eigCtx;
            for (int bi = 0;
                 bi < 100 && (hi - lo > sc.foldSTol || std::abs(foldSol.mu1) > sc.foldMuTol);
                 ++bi) {
                const double mid = 0.5 * (lo + hi);
                Vec um = pCur.sol.u + mid * tanU;
                double tm = pCur.sol.t + mid * tanT;
                if (!bs.solveStep(um, tm, tanU, tanT, pCur.sol.u, pCur.sol.t, mid, sc.newtonTol,
                                  sc.newtonMaxIter))
                    break;
                Solution m;
                m.u = um;
                m.t = tm;
                m.residualNorm = fieldNorm(mesh, residualField(mesh, um, tm, w0));
                m.converged = true;
                m.mu1 = stabilityEigenvalue(mesh, um, tm, w0, &foldCtx).value;
                if (m.mu1 > 0)
                    lo = mid;
                else
                    hi = mid;
                foldSol = m;
            }
            br.foldParameter = foldSol.t;
            br.foldSolution = foldSol;
            br.foldIndex = static_cast<int>(br.points.size()) - 1;
            br.points.insert(br.points.end() - 1,
                             {foldSol, pCur.s + 0.5 * (lo + hi)});
            foldLocated = true;
        }

        if (foldLocated && br.points.back().sol.mu1 < 0 && br.points.back().sol.t <= sc.tMin)
            break;
    }
    return br;
}

NoSolutionReport certifyNoSolution(const SurfaceMesh& mesh, const Vec& w0, double t,
                                   int attempts, std::uint64_t seed) {
    if (t <= 0) throw std::invalid_argument("certifyNoSolution: t must be positive");
    NoSolutionReport rep;
    rep.t = t;
    rep.attempts = attempts;
    const double integral = mesh.integrateLumped(w0.cwiseSqrt());
    rep.bound = 4.0 * kPi / integral;
    if (t >= rep.bound - 1e-12) {
        rep.certifiedByBound = true;
        return rep;
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> constDist(-6.0, 0.0);
    std::uniform_real_distribution<double> noiseDist(-0.05, 0.05);
    const Eigen::Index n = mesh.numCanonical();

    // Implicit heat step used to smooth the random perturbations.
    SpMat heat = mesh.stiffness * 0.05;
    for (Eigen::Index i = 0; i < n; ++i) heat.coeffRef(i, i) += mesh.lumpedMass[i];
    Eigen::SimplicialLLT<SpMat> heatSolve(heat);

    for (int a = 0; a < attempts; ++a) {
        Vec u0 = Vec::Constant(n, constDist(rng));
        Vec noise(n);
        for (Eigen::Index i = 0; i < n; ++i) noise[i] = noiseDist(rng);
        noise = heatSolve.solve(mesh.lumpedMass.cwiseProduct(noise));
        u0 += noise;

        AttemptResult ar;
        try {
            const Solution s = newtonSolve(mesh, w0, u0, t);
            ar.converged = s.converged;
            ar.uMin = s.u.minCoeff();
            ar.uMax = s.u.maxCoeff();
            ar.residualNorm = s.residualNorm;
            if (s.converged) {
                bool fresh = true;
                for (const auto& known : rep.distinctSolutions)
                    if ((known.u - s.u).lpNorm<Eigen::Infinity>() <= 1e-6) fresh = false;
                if (fresh) rep.distinctSolutions.push_back(s);
            }
        } catch (const SolverError&) {
            ar.converged = false;
        }
        rep.endpoints.push_back(ar);
    }
    return rep;
}

Solution solutionAt(const Branch& branch, const SurfaceMesh& mesh, const Vec& w0, double t,
                    BranchSide side, double newtonTol) {
    if (branch.points.empty()) throw std::invalid_argument("solutionAt: empty branch");
    const int fold = branch.foldIndex;
    if (side == BranchSide::PostFold && fold < 0)
        throw std::invalid_argument("solutionAt: branch has no fold");

    const std::size_t begin = (side == BranchSide::Stable) ? 0 : static_cast<std::size_t>(fold);
    const std::size_t end =
        (side == BranchSide::Stable && fold >= 0) ? static_cast<std::size_t>(fold) + 1
                                                  : branch.points.size();

    for (std::size_t i = begin; i + 1 < end; ++i) {
        const auto& a = branch.points[i].sol;
        const auto& b = branch.points[i + 1].sol;
        const double lo = std::min(a.t, b.t), hi = std::max(a.t, b.t);
        if (t < lo - 1e-12 || t > hi + 1e-12) continue;
        const double span = b.t - a.t;
        const double w = (std::abs(span) < 1e-15) ? 0.5 : (t - a.t) / span;
        const Vec u0 = (1.0 - w) * a.u + w * b.u;
        Solution s = newtonSolve(mesh, w0, u0, t, newtonTol);
        if (!s.converged) throw SolverError("solutionAt: polish failed to converge");
        return s;
    }
    throw std::invalid_argument("solutionAt: no bracketing branch points at requested t");
}

double gaussIdentityDefect(const SurfaceMesh& mesh, const Vec& u, double t, const Vec& w0) {
    const Vec* fields[2] = {&u, &w0};
    const double integral = integrateQuadrature(
        mesh, fields, [t](Complex, std::span<const double> v) {
            return std::exp(2.0 * v[0]) + t * t * v[1] * std::exp(-2.0 * v[0]);
        });
    return std::abs(integral - 4.0 * kPi);
}

}  // namespace gaussray
