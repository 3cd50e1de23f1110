#include "gaussray/pipeline.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

namespace gaussray {

namespace {

constexpr double kPi = std::numbers::pi;

struct Stage {
    BolzaDomain domain;
    SurfaceMesh mesh;
    std::uint64_t configHash = 0;
};

Stage makeStage(const RunConfig& cfg) {
    Stage s{buildBolzaDomain(), SurfaceMesh{}, cfg.hash()};
    s.mesh = buildMesh(s.domain, cfg.refinementLevel, cfg.quadratureOrder);
    return s;
}

WeightField makeWeight(const RunConfig& cfg, const Stage& st,
                       const std::filesystem::path& outDir) {
    if (cfg.weight.type == "constant") return constantWeight(st.mesh, cfg.weight.constantValue);
    if (cfg.weight.type == "poincare") {
        const auto qd = QuadraticDifferential::poincareSeries(st.domain, cfg.weight.seedExponent,
                                                              cfg.weight.depth);
        return weightField(qd, st.mesh);
    }
    std::filesystem::path p = cfg.weight.path;
    if (p.is_relative() && !std::filesystem::exists(p)) p = outDir / p;
    WeightField w = weightFieldFromJson(Json::parse(readTextFile(p)), st.mesh);
    w.provenance.kind = WeightProvenance::Kind::File;
    w.provenance.path = cfg.weight.path;
    return w;
}

double lambdaMaxOf(const SurfaceMesh& mesh, const Vec& w0, const Solution& s) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < w0.size(); ++i)
        m = std::max(m, s.t * std::sqrt(w0[i]) * std::exp(-2.0 * s.u[i]));
    (void)mesh;
    return m;
}

void writeBranchOutputs(const PipelineContext& ctx, const Stage& st, const WeightField& w,
                        const Branch& br) {
    std::vector<std::vector<double>> rows;
    for (const auto& p : br.points)
        rows.push_back({p.s, p.sol.t, p.sol.mu1, p.sol.u.minCoeff(), p.sol.u.maxCoeff(),
                        p.sol.residualNorm, lambdaMaxOf(st.mesh, w.values, p.sol)});
    writeCsv(ctx.outDir / "branch.csv",
             {"s", "t", "mu1", "uMin", "uMax", "residualNorm", "lambdaMax"}, rows);
    writeTextFile(ctx.outDir / "checkpoints.json",
                  branchToJson(br, st.mesh.contentHash, st.configHash).dump(2) + "\n");

    Json fold;
    fold["schema"] = "gaussray-fold/1";
    fold["meshHash"] = hexHash(st.mesh.contentHash);
    fold["configHash"] = hexHash(st.configHash);
    const double bound = nonexistenceBound(w, st.mesh);
    fold["nonexistenceBound"] = bound;
    if (br.foldParameter) {
        fold["tau0"] = *br.foldParameter;
        fold["ratioToBound"] = *br.foldParameter / bound;
        const Solution& fs = *br.foldSolution;
        fold["foldUMin"] = fs.u.minCoeff();
        fold["foldUMax"] = fs.u.maxCoeff();
        fold["foldMu1"] = fs.mu1;
        fold["foldResidualNorm"] = fs.residualNorm;
        fold["foldLambdaMax"] = lambdaMaxOf(st.mesh, w.values, fs);
    } else {
        fold["tau0"] = nullptr;
        fold["ratioToBound"] = nullptr;
    }
    fold["aborted"] = br.aborted;
    fold["abortReason"] = br.abortReason;
    writeTextFile(ctx.outDir / "fold_report.json", fold.dump(2) + "\n");
}

}  // namespace

int cmdMesh(const PipelineContext& ctx, std::ostream& log) {
    const Stage st = makeStage(ctx.config);
    std::filesystem::create_directories(ctx.outDir);

    Json meshJson = meshToJson(st.mesh);
    meshJson["configHash"] = hexHash(st.configHash);
    writeTextFile(ctx.outDir / "mesh.json", meshJson.dump(2) + "\n");

    Json domainJson;
    domainJson["schema"] = "gaussray-domain/1";
    domainJson["vertexRadius"] = st.domain.vertexRadius;
    domainJson["circumradius"] = st.domain.circumradius;
    domainJson["apothem"] = st.domain.apothem;
    domainJson["generators"] = groupToJson(
        std::vector<DiskIsometry>(st.domain.generators.begin(), st.domain.generators.end()))["elements"];
    writeTextFile(ctx.outDir / "domain.json", domainJson.dump(2) + "\n");

    const double lumpedDefect = std::abs(st.mesh.lumpedMass.sum() - 4.0 * kPi);
    const double quadDefect = std::abs(st.mesh.quadratureArea - 4.0 * kPi);
    log << "mesh: level " << st.mesh.refinementLevel << ", " << st.mesh.numFull()
        << " vertices (" << st.mesh.numCanonical() << " canonical), " << st.mesh.triangles.size()
        << " triangles\n";
    log << "mesh: area defect " << lumpedDefect << " (lumped), " << quadDefect
        << " (straight-triangle quadrature)\n";
    log << "mesh: Euler characteristic " << eulerCharacteristic(st.mesh) << "\n";
    return kExitOk;
}

int cmdQdiff(const PipelineContext& ctx, std::ostream& log) {
    const Stage st = makeStage(ctx.config);
    std::filesystem::create_directories(ctx.outDir);
    const WeightField w = makeWeight(ctx.config, st, ctx.outDir);

    writeTextFile(ctx.outDir / "weight.json",
                  weightFieldToJson(w, st.mesh.contentHash, st.configHash).dump(2) + "\n");

    Json rep;
    rep["schema"] = "gaussray-qdiff/1";
    rep["meshHash"] = hexHash(st.mesh.contentHash);
    rep["configHash"] = hexHash(st.configHash);
    const QdNorms norms = qdNorms(w, st.mesh);
    rep["teichmullerNorm"] = norms.teichmuller;
    rep["weilPeterssonNorm"] = norms.weilPetersson;
    rep["nonexistenceBound"] = nonexistenceBound(w, st.mesh);
    rep["weightMin"] = w.values.minCoeff();
    rep["weightMax"] = w.values.maxCoeff();
    rep["maxPairDiscrepancy"] = w.maxPairDiscrepancy;
    rep["shallowTruncation"] = w.shallowTruncation;
    if (ctx.config.weight.type == "poincare") {
        const auto qd = QuadraticDifferential::poincareSeries(
            st.domain, ctx.config.weight.seedExponent, ctx.config.weight.depth);
        rep["groupElements"] = static_cast<int>(qd.groupElements.size());
        Json zeros = Json::array();
        for (const auto& z : findZeroClusters(w, st.mesh, qd)) {
            Json e;
            e["re"] = z.centroid.real();
            e["im"] = z.centroid.imag();
            e["vertexCount"] = z.vertexCount;
            e["winding"] = z.winding;
            zeros.push_back(std::move(e));
        }
        rep["zeroClusters"] = std::move(zeros);
    }
    writeTextFile(ctx.outDir / "qdiff_report.json", rep.dump(2) + "\n");

    if (w.shallowTruncation)
        log << "qdiff: warning: pair discrepancy " << w.maxPairDiscrepancy
            << " exceeds 1e-3 of field max (truncation too shallow)\n";
    log << "qdiff: Teichmueller norm " << norms.teichmuller << ", WP norm " << norms.weilPetersson
        << ", bound " << nonexistenceBound(w, st.mesh) << "\n";
    return kExitOk;
}

int cmdContinue(const PipelineContext& ctx, std::ostream& log) {
    const Stage st = makeStage(ctx.config);
    std::filesystem::create_directories(ctx.outDir);
    const WeightField w = makeWeight(ctx.config, st, ctx.outDir);

    if (ctx.resume && std::filesystem::exists(ctx.outDir / "checkpoints.json")) {
        try {
            const Json j = Json::parse(readTextFile(ctx.outDir / "checkpoints.json"));
            if (j.at("configHash").get<std::string>() == hexHash(st.configHash)) {
                const Branch prev = branchFromJson(j, st.mesh);
                if (!prev.aborted && prev.foldParameter) {
                    log << "continue: checkpoint already complete (tau0 = " << *prev.foldParameter
                        << ")\n";
                    return kExitOk;
                }
            } else {
                log << "continue: checkpoint belongs to a different config; refusing to mix\n";
                return kExitUsage;
            }
        } catch (const std::exception& e) {
            log << "continue: cannot resume (" << e.what() << "); starting fresh\n";
        }
    }

    Branch br;
    try {
        br = continueBranch(st.mesh, w.values, ctx.config.stepControl());
    } catch (const SolverError& e) {
        log << "continue: " << e.what() << "\n";
        return kExitContinuationAbort;
    }
    writeBranchOutputs(ctx, st, w, br);

    if (br.aborted) {
        log << "continue: aborted (" << br.abortReason << "); partial branch written\n";
        return kExitContinuationAbort;
    }
    log << "continue: " << br.points.size() << " points";
    if (br.foldParameter) {
        const double bound = nonexistenceBound(w, st.mesh);
        log << ", tau0 = " << *br.foldParameter << ", bound = " << bound
            << ", ratio = " << *br.foldParameter / bound;
    }
    log << "\n";
    return kExitOk;
}

int cmdMpass(const PipelineContext& ctx, std::ostream& log) {
    const Stage st = makeStage(ctx.config);
    const WeightField w = makeWeight(ctx.config, st, ctx.outDir);

    if (!std::filesystem::exists(ctx.outDir / "checkpoints.json")) {
        log << "mpass: missing branch data (run continue first)\n";
        return kExitUsage;
    }
    const Json bj = Json::parse(readTextFile(ctx.outDir / "checkpoints.json"));
    if (bj.at("configHash").get<std::string>() != hexHash(st.configHash)) {
        log << "mpass: branch belongs to a different config; refusing to mix\n";
        return kExitUsage;
    }
    const Branch br = branchFromJson(bj, st.mesh);
    if (!br.foldParameter) {
        log << "mpass: branch has no fold; nothing to do\n";
        return kExitUsage;
    }
    const double tau0 = *br.foldParameter;
    const double bound = nonexistenceBound(w, st.mesh);

    std::vector<double> tList = ctx.config.mpass.tList;
    if (tList.empty()) tList = {0.25 * tau0, 0.5 * tau0, 0.75 * tau0};

    MountainPassOptions opt;
    opt.pathNodes = ctx.config.mpass.pathNodes;
    opt.tol = ctx.config.mpass.tol;
    opt.newtonTol = ctx.config.newtonTol;

    std::vector<std::vector<double>> table;
    int index = 0;
    for (double t : tList) {
        if (!(t > 0) || t >= tau0) {
            log << "mpass: t = " << t << " is outside (0, tau0); no second solution exists there "
                << "(tau0 = " << tau0 << ", certified nonexistence bound = " << bound << ")\n";
            return kExitMountainPass;
        }
        Solution stable, mp;
        MinimaxTrace trace;
        try {
            stable = solutionAt(br, st.mesh, w.values, t, BranchSide::Stable, ctx.config.newtonTol);
            mp = mountainPassSolve(stable, st.mesh, w.values, t, opt, &trace);
        } catch (const MountainPassError& e) {
            log << "mpass: " << e.what() << " (tau0 = " << tau0 << ", bound = " << bound << ")\n";
            return kExitMountainPass;
        } catch (const std::exception& e) {
            log << "mpass: " << e.what() << "\n";
            return kExitMountainPass;
        }

        const TruncatedFunctional tf(st.mesh, w.values, t, ctx.config.theta);
        const std::string suffix = "_" + std::to_string(index);
        writeTextFile(ctx.outDir / ("mpass_stable" + suffix + ".json"),
                      solutionToJson(stable, st.mesh.contentHash, st.configHash).dump(2) + "\n");
        writeTextFile(ctx.outDir / ("mpass_second" + suffix + ".json"),
                      solutionToJson(mp, st.mesh.contentHash, st.configHash).dump(2) + "\n");
        std::vector<std::vector<double>> traceRows;
        for (const auto& r : trace.rows)
            traceRows.push_back({static_cast<double>(r.iteration),
                                 static_cast<double>(r.maxNodeIndex), r.maxEnergy, r.gradVNorm});
        writeCsv(ctx.outDir / ("mpass_trace" + suffix + ".csv"),
                 {"iteration", "maxNodeIndex", "maxEnergy", "gradVNorm"}, traceRows);

        table.push_back({t, stable.u.lpNorm<Eigen::Infinity>(), stable.mu1,
                         lambdaMaxOf(st.mesh, w.values, stable), tf.value(stable.u),
                         mp.u.lpNorm<Eigen::Infinity>(), mp.mu1,
                         lambdaMaxOf(st.mesh, w.values, mp), tf.value(mp.u)});
        log << "mpass: t = " << t << ": stable |u| = " << stable.u.lpNorm<Eigen::Infinity>()
            << " (mu1 = " << stable.mu1 << "), second |u| = " << mp.u.lpNorm<Eigen::Infinity>()
            << " (mu1 = " << mp.mu1 << ")\n";
        ++index;
    }
    writeCsv(ctx.outDir / "mpass_table.csv",
             {"t", "uInfStable", "mu1Stable", "lambdaMaxStable", "energyStable", "uInfSecond",
              "mu1Second", "lambdaMaxSecond", "energySecond"},
             table);
    return kExitOk;
}

int cmdGeom(const PipelineContext& ctx, std::ostream& log) {
    const Stage st = makeStage(ctx.config);
    const WeightField w = makeWeight(ctx.config, st, ctx.outDir);
    if (!std::filesystem::exists(ctx.outDir / "checkpoints.json")) {
        log << "geom: missing branch data (run continue first)\n";
        return kExitUsage;
    }
    const Json bj = Json::parse(readTextFile(ctx.outDir / "checkpoints.json"));
    if (bj.at("configHash").get<std::string>() != hexHash(st.configHash)) {
        log << "geom: branch belongs to a different config; refusing to mix\n";
        return kExitUsage;
    }
    const Branch br = branchFromJson(bj, st.mesh);

    Json rep;
    rep["schema"] = "gaussray-geom/1";
    rep["meshHash"] = hexHash(st.mesh.contentHash);
    rep["configHash"] = hexHash(st.configHash);

    auto summarize = [&](const Solution& s) {
        const CurvatureReport cr = curvatureReport(s, st.mesh, w.values);
        Json e;
        e["t"] = s.t;
        e["uMin"] = s.u.minCoeff();
        e["uMax"] = s.u.maxCoeff();
        e["mu1"] = s.mu1;
        e["lambdaMax"] = cr.lambdaMax;
        e["almostFuchsian"] = cr.almostFuchsian;
        e["gaussBonnetDefect"] = cr.gaussBonnetDefect;
        const double rStar = degenerationRadius(cr);
        if (std::isfinite(rStar))
            e["degenerationRadius"] = rStar;
        else
            e["degenerationRadius"] = nullptr;
        return e;
    };

    Json sols = Json::array();
    std::vector<std::vector<double>> samples;
    std::vector<Solution> picks;
    if (br.foldSolution) picks.push_back(*br.foldSolution);
    for (int i = 0;; ++i) {
        const auto path = ctx.outDir / ("mpass_second_" + std::to_string(i) + ".json");
        if (!std::filesystem::exists(path)) break;
        picks.push_back(solutionFromJson(Json::parse(readTextFile(path)), st.mesh));
    }
    for (const auto& s : picks) {
        sols.push_back(summarize(s));
        // Ambient metric samples along the normal ray at the most curved vertex.
        const CurvatureReport cr = curvatureReport(s, st.mesh, w.values);
        int vmax = 0;
        for (int i = 1; i < st.mesh.numCanonical(); ++i)
            if (cr.lambda[i] > cr.lambda[vmax]) vmax = i;
        for (double r = -5.0; r <= 5.0 + 1e-9; r += 0.5) {
            const AmbientMetricSample a = ambientMetric(s, st.mesh, w.values, vmax, r);
            samples.push_back({a.z.real(), a.z.imag(), a.r, a.g(0, 0), a.g(0, 1), a.g(1, 1),
                               a.degenerate ? 1.0 : 0.0});
        }
    }
    rep["solutions"] = std::move(sols);
    writeTextFile(ctx.outDir / "geometry_report.json", rep.dump(2) + "\n");
    writeCsv(ctx.outDir / "ambient_samples.csv",
             {"z_re", "z_im", "r", "g11", "g12", "g22", "degenerate"}, samples);
    log << "geom: " << picks.size() << " solutions summarized\n";
    return kExitOk;
}

int cmdReport(const PipelineContext& ctx, std::ostream& log) {
    const Stage st = makeStage(ctx.config);
    const WeightField w = makeWeight(ctx.config, st, ctx.outDir);
    if (!std::filesystem::exists(ctx.outDir / "checkpoints.json")) {
        log << "report: missing branch data (run continue first)\n";
        return kExitUsage;
    }
    const Json bj = Json::parse(readTextFile(ctx.outDir / "checkpoints.json"));
    if (bj.at("configHash").get<std::string>() != hexHash(st.configHash)) {
        log << "report: branch belongs to a different config; refusing to mix\n";
        return kExitUsage;
    }
    const Branch br = branchFromJson(bj, st.mesh);

    Json rep;
    rep["schema"] = "gaussray-report/1";
    rep["schemaVersion"] = 1;
    rep["meshHash"] = hexHash(st.mesh.contentHash);
    rep["configHash"] = hexHash(st.configHash);

    std::vector<std::vector<double>> bif;
    for (const auto& p : br.points)
        bif.push_back({p.sol.t, p.sol.u.lpNorm<Eigen::Infinity>(), p.sol.mu1,
                       p.sol.mu1 > 0 ? 1.0 : 0.0});
    writeCsv(ctx.outDir / "bifurcation.csv", {"t", "uInf", "mu1", "stable"}, bif);

    if (br.foldParameter) {
        rep["tau0"] = *br.foldParameter;
        const double tau0 = *br.foldParameter;
        std::vector<double> tSeq = {0.8 * tau0, 0.4 * tau0, 0.2 * tau0};
        const double tLow = br.points.back().sol.t;
        std::vector<double> usable;
        for (double t : tSeq)
            if (t > tLow) usable.push_back(t);
        try {
            const BlowupTrend trend = blowupTrend(br, usable, st.mesh, w.values);
            std::vector<std::vector<double>> rows;
            for (const auto& r : trend.rows)
                rows.push_back({r.t, r.uInf, r.lambdaMax, r.maxAbsK, r.stabilized});
            writeCsv(ctx.outDir / "blowup.csv", {"t", "uInf", "lambdaMax", "maxAbsK", "stabilized"},
                     rows);
            rep["blowupUInfIncreasing"] = trend.uInfStrictlyIncreasing;
            rep["blowupMaxKIncreasing"] = trend.maxKStrictlyIncreasing;
        } catch (const std::exception& e) {
            rep["blowupError"] = e.what();
        }
    } else {
        rep["tau0"] = nullptr;
    }
    rep["nonexistenceBound"] = nonexistenceBound(w, st.mesh);
    rep["points"] = static_cast<int>(br.points.size());
    writeTextFile(ctx.outDir / "report.json", rep.dump(2) + "\n");
    log << "report: written\n";
    return kExitOk;
}

int cmdCertify(const PipelineContext& ctx, std::ostream& log) {
    const Stage st = makeStage(ctx.config);
    std::filesystem::create_directories(ctx.outDir);
    const WeightField w = makeWeight(ctx.config, st, ctx.outDir);
    const NoSolutionReport rep = certifyNoSolution(st.mesh, w.values, ctx.config.certify.t,
                                                   ctx.config.certify.attempts, ctx.config.seed);
    Json j;
    j["schema"] = "gaussray-certify/1";
    j["meshHash"] = hexHash(st.mesh.contentHash);
    j["configHash"] = hexHash(st.configHash);
    j["t"] = rep.t;
    j["bound"] = rep.bound;
    j["certifiedByBound"] = rep.certifiedByBound;
    j["attempts"] = rep.attempts;
    Json eps = Json::array();
    int converged = 0;
    for (const auto& a : rep.endpoints) {
        Json e;
        e["converged"] = a.converged;
        e["uMin"] = a.uMin;
        e["uMax"] = a.uMax;
        e["residualNorm"] = a.residualNorm;
        eps.push_back(std::move(e));
        if (a.converged) ++converged;
    }
    j["endpoints"] = std::move(eps);
    j["convergedCount"] = converged;
    j["distinctSolutions"] = static_cast<int>(rep.distinctSolutions.size());
    writeTextFile(ctx.outDir / "certify_report.json", j.dump(2) + "\n");

    if (rep.certifiedByBound)
        log << "certify: t = " << rep.t << " >= bound = " << rep.bound
            << ": nonexistence certified\n";
    else
        log << "certify: t = " << rep.t << " < bound = " << rep.bound << ": " << converged << "/"
            << rep.attempts << " randomized starts converged ("
            << rep.distinctSolutions.size() << " distinct solutions; empirical evidence only)\n";
    return kExitOk;
}

int cmdRun(const PipelineContext& ctx, std::ostream& log) {
    for (auto cmd : {cmdMesh, cmdQdiff, cmdContinue, cmdMpass, cmdGeom, cmdReport}) {
        const int rc = cmd(ctx, log);
        if (rc != kExitOk) return rc;
    }
    return kExitOk;
}

}  // namespace gaussray
