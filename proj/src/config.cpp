#include "gaussray/config.hpp"

namespace gaussray {

namespace {

template <typename T>
void maybe(const Json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

RunConfig RunConfig::fromJson(const Json& j) {
    RunConfig c;
    if (j.contains("weight")) {
        const Json& w = j.at("weight");
        maybe(w, "type", c.weight.type);
        maybe(w, "constantValue", c.weight.constantValue);
        maybe(w, "seedExponent", c.weight.seedExponent);
        maybe(w, "depth", c.weight.depth);
        maybe(w, "path", c.weight.path);
    }
    maybe(j, "refinementLevel", c.refinementLevel);
    maybe(j, "quadratureOrder", c.quadratureOrder);
    maybe(j, "seed", c.seed);
    maybe(j, "newtonTol", c.newtonTol);
    maybe(j, "newtonMaxIter", c.newtonMaxIter);
    maybe(j, "theta", c.theta);
    if (j.contains("continuation")) {
        const Json& k = j.at("continuation");
        maybe(k, "dtNatural", c.continuation.dtNatural);
        maybe(k, "dsArc", c.continuation.dsArc);
        maybe(k, "dsMax", c.continuation.dsMax);
        maybe(k, "muSwitch", c.continuation.muSwitch);
        maybe(k, "tMin", c.continuation.tMin);
        maybe(k, "maxSteps", c.continuation.maxSteps);
        maybe(k, "foldMuTol", c.continuation.foldMuTol);
        maybe(k, "foldSTol", c.continuation.foldSTol);
    }
    if (j.contains("mpass")) {
        const Json& k = j.at("mpass");
        maybe(k, "pathNodes", c.mpass.pathNodes);
        maybe(k, "tol", c.mpass.tol);
        maybe(k, "tList", c.mpass.tList);
    }
    if (j.contains("certify")) {
        const Json& k = j.at("certify");
        maybe(k, "t", c.certify.t);
        maybe(k, "attempts", c.certify.attempts);
    }
    maybe(j, "outputDir", c.outputDir);
    return c;
}

Json RunConfig::toJson() const {
    Json j;
    Json w;
    w["type"] = weight.type;
    w["constantValue"] = weight.constantValue;
    w["seedExponent"] = weight.seedExponent;
    w["depth"] = weight.depth;
    w["path"] = weight.path;
    j["weight"] = std::move(w);
    j["refinementLevel"] = refinementLevel;
    j["quadratureOrder"] = quadratureOrder;
    j["seed"] = seed;
    j["newtonTol"] = newtonTol;
    j["newtonMaxIter"] = newtonMaxIter;
    j["theta"] = theta;
    Json k;
    k["dtNatural"] = continuation.dtNatural;
    k["dsArc"] = continuation.dsArc;
    k["dsMax"] = continuation.dsMax;
    k["muSwitch"] = continuation.muSwitch;
    k["tMin"] = continuation.tMin;
    k["maxSteps"] = continuation.maxSteps;
    k["foldMuTol"] = continuation.foldMuTol;
    k["foldSTol"] = continuation.foldSTol;
    j["continuation"] = std::move(k);
    Json mp;
    mp["pathNodes"] = mpass.pathNodes;
    mp["tol"] = mpass.tol;
    mp["tList"] = mpass.tList;
    j["mpass"] = std::move(mp);
    Json ce;
    ce["t"] = certify.t;
    ce["attempts"] = certify.attempts;
    j["certify"] = std::move(ce);
    j["outputDir"] = outputDir;
    return j;
}

void RunConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
    if (weight.type != "constant" && weight.type != "poincare" && weight.type != "file")
        fail("weight.type must be constant, poincare, or file");
    if (weight.type == "constant" && !(weight.constantValue >= 0))
        fail("weight.constantValue must be >= 0");
    if (weight.type == "poincare") {
        if (weight.seedExponent < 0 || weight.seedExponent > 8)
            fail("weight.seedExponent must be in [0, 8]");
        if (!(weight.depth >= 1.0 && weight.depth <= 16.0)) fail("weight.depth must be in [1, 16]");
    }
    if (weight.type == "file" && weight.path.empty()) fail("weight.path required for file weights");
    if (refinementLevel < 0 || refinementLevel > 8) fail("refinementLevel must be in [0, 8]");
    if (quadratureOrder != 7) fail("quadratureOrder must be 7");
    if (!(newtonTol > 0 && newtonTol <= 1e-4)) fail("newtonTol must be in (0, 1e-4]");
    if (newtonMaxIter < 1 || newtonMaxIter > 500) fail("newtonMaxIter must be in [1, 500]");
    if (!(theta > 2.0 && theta <= 16.0)) fail("theta must be in (2, 16]");
    if (!(continuation.dtNatural > 0 && continuation.dtNatural <= 0.5))
        fail("continuation.dtNatural must be in (0, 0.5]");
    if (!(continuation.dsArc > 0 && continuation.dsArc <= 1.0))
        fail("continuation.dsArc must be in (0, 1]");
    if (!(continuation.dsMax >= continuation.dsArc && continuation.dsMax <= 2.0))
        fail("continuation.dsMax must be in [dsArc, 2]");
    if (!(continuation.muSwitch > 0 && continuation.muSwitch <= 2.0))
        fail("continuation.muSwitch must be in (0, 2]");
    if (!(continuation.tMin > 0 && continuation.tMin <= 1.0))
        fail("continuation.tMin must be in (0, 1]");
    if (continuation.maxSteps < 10 || continuation.maxSteps > 1000000)
        fail("continuation.maxSteps must be in [10, 1e6]");
    if (!(continuation.foldMuTol > 0 && continuation.foldMuTol <= 1e-2))
        fail("continuation.foldMuTol must be in (0, 1e-2]");
    if (!(continuation.foldSTol > 0 && continuation.foldSTol <= 1e-2))
        fail("continuation.foldSTol must be in (0, 1e-2]");
    if (mpass.pathNodes < 5 || mpass.pathNodes > 4096) fail("mpass.pathNodes must be in [5, 4096]");
    if (!(mpass.tol > 0 && mpass.tol <= 1.0)) fail("mpass.tol must be in (0, 1]");
    for (double t : mpass.tList)
        if (!(t > 0)) fail("mpass.tList entries must be positive");
    if (!(certify.t > 0)) fail("certify.t must be positive");
    if (certify.attempts < 1 || certify.attempts > 10000)
        fail("certify.attempts must be in [1, 1e4]");
    if (outputDir.empty()) fail("outputDir must not be empty");
}

std::uint64_t RunConfig::hash() const { return fnvHash(toJson().dump()); }

StepControl RunConfig::stepControl() const {
    StepControl sc;
    sc.dtNatural = continuation.dtNatural;
    sc.dsArc = continuation.dsArc;
    sc.dsMax = continuation.dsMax;
    sc.muSwitch = continuation.muSwitch;
    sc.tMin = continuation.tMin;
    sc.maxSteps = continuation.maxSteps;
    sc.foldMuTol = continuation.foldMuTol;
    sc.foldSTol = continuation.foldSTol;
    sc.newtonTol = newtonTol;
    sc.newtonMaxIter = newtonMaxIter;
    return sc;
}

RunConfig loadConfig(const std::filesystem::path& path) {
    Json j;
    try {
        j = Json::parse(readTextFile(path));
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: parse failure: ") + e.what());
    }
    RunConfig c = RunConfig::fromJson(j);
    c.validate();
    return c;
}

}  // namespace gaussray
