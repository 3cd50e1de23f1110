#include "gaussray/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace gaussray {

std::uint64_t fnvHash(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hexHash(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void writeTextFile(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::string readTextFile(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string formatDouble(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void writeCsv(const std::filesystem::path& path, const std::vector<std::string>& header,
              const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        out += header[i];
        out += (i + 1 < header.size()) ? ',' : '\n';
    }
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out += formatDouble(row[i]);
            out += (i + 1 < row.size()) ? ',' : '\n';
        }
    }
    writeTextFile(path, out);
}

Json meshToJson(const SurfaceMesh& mesh) {
    Json j;
    j["schema"] = "gaussray-mesh/1";
    j["refinementLevel"] = mesh.refinementLevel;
    j["quadratureOrder"] = mesh.quadratureOrder;
    Json verts = Json::array();
    for (const Complex& z : mesh.vertices) verts.push_back({z.real(), z.imag()});
    j["vertices"] = std::move(verts);
    Json tris = Json::array();
    for (const auto& t : mesh.triangles) tris.push_back({t[0], t[1], t[2]});
    j["triangles"] = std::move(tris);
    j["identify"] = mesh.identify;
    j["contentHash"] = hexHash(mesh.contentHash);
    return j;
}

SurfaceMesh meshFromJson(const Json& j) {
    if (j.at("schema") != "gaussray-mesh/1") throw std::runtime_error("mesh: unknown schema");
    SurfaceMesh m;
    m.refinementLevel = j.at("refinementLevel").get<int>();
    m.quadratureOrder = j.at("quadratureOrder").get<int>();
    for (const auto& v : j.at("vertices")) m.vertices.emplace_back(v[0].get<double>(), v[1].get<double>());
    for (const auto& t : j.at("triangles"))
        m.triangles.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<int>()});
    m.identify = j.at("identify").get<std::vector<int>>();
    m.sideMask.assign(m.vertices.size(), 0);

    m.compactIndex.assign(m.numFull(), -1);
    for (int v = 0; v < m.numFull(); ++v)
        if (m.identify[v] == v) {
            m.compactIndex[v] = static_cast<int>(m.canonicalRep.size());
            m.canonicalRep.push_back(v);
        }
    for (int v = 0; v < m.numFull(); ++v) m.compactIndex[v] = m.compactIndex[m.identify[v]];
    m.classMembers.assign(m.numCanonical(), {});
    for (int v = 0; v < m.numFull(); ++v) m.classMembers[m.compactIndex[v]].push_back(v);

    m.triGeodesicArea.resize(m.triangles.size());
    double geo = 0.0;
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto& tri = m.triangles[t];
        m.triGeodesicArea[t] = hyperbolicTriangleArea(m.vertices[tri[0]], m.vertices[tri[1]],
                                                      m.vertices[tri[2]]);
        geo += m.triGeodesicArea[t];
    }
    m.geodesicArea = geo;
    m.lumpedMass = assembleLumpedMass(m);
    m.stiffness = assembleStiffness(m);
    m.contentHash = meshContentHash(m);
    if (hexHash(m.contentHash) != j.at("contentHash").get<std::string>())
        throw std::runtime_error("mesh: content hash mismatch");
    return m;
}

Json groupToJson(const std::vector<DiskIsometry>& elements) {
    Json j;
    j["schema"] = "gaussray-group/1";
    Json arr = Json::array();
    for (const auto& g : elements) {
        Json e;
        e["a_re"] = g.a.real();
        e["a_im"] = g.a.imag();
        e["b_re"] = g.b.real();
        e["b_im"] = g.b.imag();
        arr.push_back(std::move(e));
    }
    j["elements"] = std::move(arr);
    return j;
}

namespace {

const char* provenanceName(WeightProvenance::Kind k) {
    switch (k) {
        case WeightProvenance::Kind::Constant: return "constant";
        case WeightProvenance::Kind::Poincare: return "poincare";
        case WeightProvenance::Kind::File: return "file";
    }
    return "constant";
}

}  // namespace

Json weightFieldToJson(const WeightField& w, std::uint64_t meshHash, std::uint64_t configHash) {
    Json j;
    j["schema"] = "gaussray-weight/1";
    j["meshHash"] = hexHash(meshHash);
    j["configHash"] = hexHash(configHash);
    Json prov;
    prov["type"] = provenanceName(w.provenance.kind);
    prov["constantValue"] = w.provenance.constantValue;
    prov["seedExponent"] = w.provenance.seedExponent;
    prov["depth"] = w.provenance.depth;
    prov["path"] = w.provenance.path;
    j["provenance"] = std::move(prov);
    j["maxPairDiscrepancy"] = w.maxPairDiscrepancy;
    j["values"] = std::vector<double>(w.values.data(), w.values.data() + w.values.size());
    return j;
}

WeightField weightFieldFromJson(const Json& j, const SurfaceMesh& mesh) {
    if (j.at("schema") != "gaussray-weight/1") throw std::runtime_error("weight: unknown schema");
    if (j.at("meshHash").get<std::string>() != hexHash(mesh.contentHash))
        throw std::runtime_error("weight: mesh hash mismatch");
    WeightField w;
    const auto& prov = j.at("provenance");
    const std::string type = prov.at("type").get<std::string>();
    w.provenance.kind = type == "poincare"  ? WeightProvenance::Kind::Poincare
                        : type == "file"    ? WeightProvenance::Kind::File
                                            : WeightProvenance::Kind::Constant;
    w.provenance.constantValue = prov.at("constantValue").get<double>();
    w.provenance.seedExponent = prov.at("seedExponent").get<int>();
    w.provenance.depth = prov.at("depth").get<double>();
    w.provenance.path = prov.at("path").get<std::string>();
    w.maxPairDiscrepancy = j.at("maxPairDiscrepancy").get<double>();
    const auto vals = j.at("values").get<std::vector<double>>();
    if (static_cast<int>(vals.size()) != mesh.numCanonical())
        throw std::runtime_error("weight: value count mismatch");
    w.values = Eigen::Map<const Vec>(vals.data(), vals.size());
    for (double v : w.values)
        if (!(v >= 0) || !std::isfinite(v)) throw std::runtime_error("weight: invalid value");
    w.fieldMax = w.values.maxCoeff();
    return w;
}

Json solutionToJson(const Solution& s, std::uint64_t meshHash, std::uint64_t configHash) {
    Json j;
    j["schema"] = "gaussray-solution/1";
    j["meshHash"] = hexHash(meshHash);
    j["configHash"] = hexHash(configHash);
    j["t"] = s.t;
    j["residualNorm"] = s.residualNorm;
    j["mu1"] = s.mu1;
    j["converged"] = s.converged;
    j["u"] = std::vector<double>(s.u.data(), s.u.data() + s.u.size());
    return j;
}

Solution solutionFromJson(const Json& j, const SurfaceMesh& mesh) {
    if (j.at("schema") != "gaussray-solution/1") throw std::runtime_error("solution: unknown schema");
    if (j.at("meshHash").get<std::string>() != hexHash(mesh.contentHash))
        throw std::runtime_error("solution: mesh hash mismatch");
    Solution s;
    s.t = j.at("t").get<double>();
    s.residualNorm = j.at("residualNorm").get<double>();
    s.mu1 = j.at("mu1").get<double>();
    s.converged = j.at("converged").get<bool>();
    const auto u = j.at("u").get<std::vector<double>>();
    if (static_cast<int>(u.size()) != mesh.numCanonical())
        throw std::runtime_error("solution: size mismatch");
    s.u = Eigen::Map<const Vec>(u.data(), u.size());
    return s;
}

Json branchToJson(const Branch& b, std::uint64_t meshHash, std::uint64_t configHash) {
    Json j;
    j["schema"] = "gaussray-branch/1";
    j["meshHash"] = hexHash(meshHash);
    j["configHash"] = hexHash(configHash);
    j["foldIndex"] = b.foldIndex;
    j["aborted"] = b.aborted;
    j["abortReason"] = b.abortReason;
    if (b.foldParameter)
        j["foldParameter"] = *b.foldParameter;
    else
        j["foldParameter"] = nullptr;
    Json pts = Json::array();
    for (const auto& p : b.points) {
        Json e;
        e["s"] = p.s;
        e["t"] = p.sol.t;
        e["mu1"] = p.sol.mu1;
        e["residualNorm"] = p.sol.residualNorm;
        e["u"] = std::vector<double>(p.sol.u.data(), p.sol.u.data() + p.sol.u.size());
        pts.push_back(std::move(e));
    }
    j["points"] = std::move(pts);
    return j;
}

Branch branchFromJson(const Json& j, const SurfaceMesh& mesh) {
    if (j.at("schema") != "gaussray-branch/1") throw std::runtime_error("branch: unknown schema");
    if (j.at("meshHash").get<std::string>() != hexHash(mesh.contentHash))
        throw std::runtime_error("branch: mesh hash mismatch");
    Branch b;
    b.foldIndex = j.at("foldIndex").get<int>();
    b.aborted = j.at("aborted").get<bool>();
    b.abortReason = j.at("abortReason").get<std::string>();
    if (!j.at("foldParameter").is_null()) b.foldParameter = j.at("foldParameter").get<double>();
    for (const auto& e : j.at("points")) {
        BranchPoint p;
        p.s = e.at("s").get<double>();
        p.sol.t = e.at("t").get<double>();
        p.sol.mu1 = e.at("mu1").get<double>();
        p.sol.residualNorm = e.at("residualNorm").get<double>();
        p.sol.converged = true;
        const auto u = e.at("u").get<std::vector<double>>();
        if (static_cast<int>(u.size()) != mesh.numCanonical())
            throw std::runtime_error("branch: size mismatch");
        p.sol.u = Eigen::Map<const Vec>(u.data(), u.size());
        b.points.push_back(std::move(p));
    }
    if (b.foldIndex >= 0 && b.foldIndex < static_cast<int>(b.points.size()))
        b.foldSolution = b.points[b.foldIndex].sol;
    return b;
}

}  // namespace gaussray
