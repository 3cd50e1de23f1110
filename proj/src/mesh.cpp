#include "gaussray/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gaussray {

namespace {

constexpr double kPi = std::numbers::pi;

// Degree-5 rule, 7 points per triangle, barycentric coordinates and weights.
struct QuadPoint {
    double l0, l1, l2, w;
};
const std::array<QuadPoint, 7>& quadRule7() {
    static const std::array<QuadPoint, 7> rule = [] {
        const double a = 0.059715871789770, b = 0.470142064105115;
        const double c = 0.797426985353087, d = 0.101286507323456;
        const double wa = 0.132394152788506, wc = 0.125939180544827;
        return std::array<QuadPoint, 7>{{{1.0 / 3, 1.0 / 3, 1.0 / 3, 0.225},
                                         {a, b, b, wa},
                                         {b, a, b, wa},
                                         {b, b, a, wa},
                                         {c, d, d, wc},
                                         {d, c, d, wc},
                                         {d, d, c, wc}}};
    }();
    return rule;
}

double euclideanArea(Complex p0, Complex p1, Complex p2) {
    const Complex u = p1 - p0, v = p2 - p0;
    return 0.5 * (u.real() * v.imag() - u.imag() * v.real());
}

struct MeshBuilder {
    const BolzaDomain& domain;
    std::vector<Complex> verts;
    std::vector<std::array<int, 3>> tris;
    std::vector<int> identify;
    std::vector<std::uint8_t> mask;
    std::vector<int> partner;  // side 4..7 vertex -> its side 0..3 source

    explicit MeshBuilder(const BolzaDomain& d) : domain(d) {}

    int addVertex(Complex p, std::uint8_t m, int ident, int part) {
        verts.push_back(p);
        mask.push_back(m);
        identify.push_back(ident < 0 ? static_cast<int>(verts.size()) - 1 : ident);
        partner.push_back(part);
        return static_cast<int>(verts.size()) - 1;
    }

    bool isCorner(int v) const { return v >= 1 && v <= 8; }

    // Source vertex on side k-4 whose pairing image is v (v lies on side k>=4).
    int sourceOf(int v, int k) const {
        if (isCorner(v)) {
            const int j = v - 1;
            for (int e = 0; e < 2; ++e)
                if (domain.sideCorners[k][e] == j) return 1 + domain.cornerSourceOnSide[k][e];
            throw std::logic_error("mesh: corner not on expected side");
        }
        if (partner[v] < 0) throw std::logic_error("mesh: missing pairing source");
        return partner[v];
    }

    void buildCoarse() {
        addVertex(Complex(0, 0), 0, -1, -1);  // 0: center
        for (int j = 0; j < 8; ++j) {
            const std::uint8_t m =
                static_cast<std::uint8_t>((1u << ((j + 5) % 8)) | (1u << ((j + 4) % 8)));
            addVertex(domain.corners[j], m, j == 0 ? -1 : 1, -1);
        }
        const double tau = std::sinh(domain.apothem) / (1.0 + std::cosh(domain.apothem));
        for (int k = 0; k < 8; ++k) {
            const Complex mid = tau * std::polar(1.0, (k + 4) * kPi / 4.0);
            addVertex(mid, static_cast<std::uint8_t>(1u << k), k < 4 ? -1 : 9 + (k - 4),
                      k < 4 ? -1 : 9 + (k - 4));
        }
        for (int k = 0; k < 8; ++k) {
            const int ca = 1 + domain.sideCorners[k][0];
            const int cb = 1 + domain.sideCorners[k][1];
            const int m = 9 + k;
            tris.push_back({0, ca, m});
            tris.push_back({0, m, cb});
        }
    }

    int splitEdge(int i, int j, std::map<std::pair<int, int>, int>& edgeMid) {
        const auto key = std::minmax(i, j);
        if (auto it = edgeMid.find(key); it != edgeMid.end()) return it->second;

        const std::uint8_t common = mask[i] & mask[j];
        int v;
        if (common != 0) {
            int k = 0;
            while (!(common & (1u << k))) ++k;
            if (k < 4) {
                const auto& side = domain.sides[k];
                const Complex m = 0.5 * (verts[i] + verts[j]);
                const Complex p =
                    side.center + side.radius * (m - side.center) / std::abs(m - side.center);
                v = addVertex(p, static_cast<std::uint8_t>(1u << k), -1, -1);
            } else {
                const int sm = splitEdge(sourceOf(i, k), sourceOf(j, k), edgeMid);
                const Complex p = domain.generators[k - 4].apply(verts[sm]);
                v = addVertex(p, static_cast<std::uint8_t>(1u << k), identify[sm], sm);
            }
        } else {
            v = addVertex(0.5 * (verts[i] + verts[j]), 0, -1, -1);
        }
        edgeMid.emplace(key, v);
        return v;
    }

    void refineOnce() {
        std::map<std::pair<int, int>, int> edgeMid;
        std::vector<std::array<int, 3>> next;
        next.reserve(tris.size() * 4);
        for (const auto& t : tris) {
            const int m01 = splitEdge(t[0], t[1], edgeMid);
            const int m12 = splitEdge(t[1], t[2], edgeMid);
            const int m20 = splitEdge(t[2], t[0], edgeMid);
            next.push_back({t[0], m01, m20});
            next.push_back({m01, t[1], m12});
            next.push_back({m20, m12, t[2]});
            next.push_back({m01, m12, m20});
        }
        tris = std::move(next);
    }
};

}  // namespace

double hyperbolicTriangleArea(Complex z0, Complex z1, Complex z2) {
    // L'Huilier's identity: stable for small geodesic triangles where the
    // angle defect pi - (sum of angles) would cancel catastrophically.
    const double a = hypDistance(z1, z2);
    const double b = hypDistance(z0, z2);
    const double c = hypDistance(z0, z1);
    const double s = 0.5 * (a + b + c);
    const double p = std::tanh(0.5 * s) * std::tanh(0.5 * (s - a)) * std::tanh(0.5 * (s - b)) *
                     std::tanh(0.5 * (s - c));
    if (p <= 0.0) return 0.0;
    return 4.0 * std::atan(std::sqrt(p));
}

SurfaceMesh buildMesh(const BolzaDomain& domain, int refinementLevel, int quadratureOrder) {
    if (refinementLevel < 0 || refinementLevel > 8)
        throw std::invalid_argument("buildMesh: refinement level must be in [0, 8]");
    if (quadratureOrder != 7)
        throw std::invalid_argument("buildMesh: only the 7-point rule is provided");

    MeshBuilder b(domain);
    b.buildCoarse();
    for (int l = 0; l < refinementLevel; ++l) b.refineOnce();

    SurfaceMesh m;
    m.vertices = std::move(b.verts);
    m.triangles = std::move(b.tris);
    m.identify = std::move(b.identify);
    m.sideMask = std::move(b.mask);
    m.refinementLevel = refinementLevel;
    m.quadratureOrder = quadratureOrder;

    // Pairing check: every side 4..7 vertex is the translate of its source.
    for (int v = 0; v < m.numFull(); ++v) {
        const int src = b.partner[v];
        if (src < 0) continue;
        int k = 4;
        while (!(m.sideMask[v] & (1u << k))) ++k;
        const Complex image = domain.generators[k - 4].apply(m.vertices[src]);
        if (std::abs(image - m.vertices[v]) > 1e-8)
            throw std::runtime_error("buildMesh: side pairing mismatch");
        m.pairings.push_back({src, v, k - 4});
    }
    for (int j = 1; j < 8; ++j)
        if (m.identify[1 + j] != 1) throw std::runtime_error("buildMesh: corner identification");

    // Compact canonical indexing.
    m.compactIndex.assign(m.numFull(), -1);
    for (int v = 0; v < m.numFull(); ++v) {
        if (m.identify[m.identify[v]] != m.identify[v])
            throw std::runtime_error("buildMesh: identification not idempotent");
        if (m.identify[v] == v) {
            m.compactIndex[v] = static_cast<int>(m.canonicalRep.size());
            m.canonicalRep.push_back(v);
        }
    }
    for (int v = 0; v < m.numFull(); ++v) m.compactIndex[v] = m.compactIndex[m.identify[v]];
    m.classMembers.assign(m.numCanonical(), {});
    for (int v = 0; v < m.numFull(); ++v) m.classMembers[m.compactIndex[v]].push_back(v);

    // Geometry tables.
    m.triGeodesicArea.resize(m.triangles.size());
    const auto& rule = quadRule7();
    double geoTotal = 0.0, quadTotal = 0.0;
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto& tri = m.triangles[t];
        const Complex p0 = m.vertices[tri[0]], p1 = m.vertices[tri[1]], p2 = m.vertices[tri[2]];
        const double eucl = euclideanArea(p0, p1, p2);
        if (eucl < 1e-14) throw std::runtime_error("buildMesh: degenerate triangle");
        const double geo = hyperbolicTriangleArea(p0, p1, p2);
        m.triGeodesicArea[t] = geo;
        geoTotal += geo;
        double q = 0.0;
        for (const auto& qp : rule) {
            const Complex x = qp.l0 * p0 + qp.l1 * p1 + qp.l2 * p2;
            q += qp.w * metricDensity(x);
        }
        quadTotal += q * eucl;
    }
    m.geodesicArea = geoTotal;
    m.quadratureArea = quadTotal;

    m.lumpedMass = assembleLumpedMass(m);
    m.stiffness = assembleStiffness(m);
    m.contentHash = meshContentHash(m);
    return m;
}

std::array<std::array<double, 3>, 3> cotangentElementMatrix(Complex p0, Complex p1, Complex p2) {
    const Complex p[3] = {p0, p1, p2};
    std::array<std::array<double, 3>, 3> elem{};
    for (int k = 0; k < 3; ++k) {
        const int i = (k + 1) % 3, j = (k + 2) % 3;
        const Complex u = p[i] - p[k], v = p[j] - p[k];
        const double cross = u.real() * v.imag() - u.imag() * v.real();
        if (std::abs(cross) < 1e-16)
            throw std::runtime_error("cotangentElementMatrix: degenerate triangle");
        const double w = 0.5 * (u.real() * v.real() + u.imag() * v.imag()) / cross;
        elem[i][j] -= w;
        elem[j][i] -= w;
        elem[i][i] += w;
        elem[j][j] += w;
    }
    return elem;
}

SpMat assembleStiffness(const SurfaceMesh& mesh) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(mesh.triangles.size() * 9);
    for (const auto& tri : mesh.triangles) {
        const auto elem = cotangentElementMatrix(mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                                                 mesh.vertices[tri[2]]);
        const int c[3] = {mesh.compactIndex[tri[0]], mesh.compactIndex[tri[1]],
                          mesh.compactIndex[tri[2]]};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) trip.emplace_back(c[i], c[j], elem[i][j]);
    }
    SpMat K(mesh.numCanonical(), mesh.numCanonical());
    K.setFromTriplets(trip.begin(), trip.end());
    K.makeCompressed();
    return K;
}

Vec assembleLumpedMass(const SurfaceMesh& mesh, const Vec& weight) {
    Vec mass = Vec::Zero(mesh.numCanonical());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const double third = mesh.triGeodesicArea[t] / 3.0;
        for (int v : mesh.triangles[t]) mass[mesh.compactIndex[v]] += third;
    }
    if (weight.size() > 0) {
        if (weight.size() != mesh.numCanonical())
            throw std::invalid_argument("assembleLumpedMass: weight size mismatch");
        for (int i = 0; i < mass.size(); ++i) {
            if (!(weight[i] >= 0) || !std::isfinite(weight[i]))
                throw std::invalid_argument("assembleLumpedMass: weight must be finite and >= 0");
            mass[i] *= weight[i];
        }
    }
    return mass;
}

SpMat assembleConsistentMass(const SurfaceMesh& mesh, const Vec& weight) {
    if (weight.size() > 0 && weight.size() != mesh.numCanonical())
        throw std::invalid_argument("assembleConsistentMass: weight size mismatch");
    const auto& rule = quadRule7();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(mesh.triangles.size() * 9);
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        const Complex p0 = mesh.vertices[tri[0]], p1 = mesh.vertices[tri[1]],
                      p2 = mesh.vertices[tri[2]];
        const int c[3] = {mesh.compactIndex[tri[0]], mesh.compactIndex[tri[1]],
                          mesh.compactIndex[tri[2]]};
        double wv[3] = {1.0, 1.0, 1.0};
        if (weight.size() > 0)
            for (int i = 0; i < 3; ++i) wv[i] = weight[c[i]];

        // Normalize the metric-weighted rule to the exact geodesic area so
        // constant fields integrate without the straight-edge boundary error.
        double denom = 0.0;
        std::array<double, 7> dens{};
        for (int q = 0; q < 7; ++q) {
            const auto& qp = rule[q];
            const Complex x = qp.l0 * p0 + qp.l1 * p1 + qp.l2 * p2;
            dens[q] = qp.w * metricDensity(x);
            denom += dens[q];
        }
        const double scale = mesh.triGeodesicArea[t] / denom;
        double elem[3][3] = {};
        for (int q = 0; q < 7; ++q) {
            const auto& qp = rule[q];
            const double l[3] = {qp.l0, qp.l1, qp.l2};
            const double wq = (weight.size() > 0)
                                  ? l[0] * wv[0] + l[1] * wv[1] + l[2] * wv[2]
                                  : 1.0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) elem[i][j] += dens[q] * wq * l[i] * l[j];
        }
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) trip.emplace_back(c[i], c[j], scale * elem[i][j]);
    }
    SpMat M(mesh.numCanonical(), mesh.numCanonical());
    M.setFromTriplets(trip.begin(), trip.end());
    M.makeCompressed();
    return M;
}

double integrateQuadrature(const SurfaceMesh& mesh,
                           std::span<const Vec* const> canonicalFields,
                           const std::function<double(Complex, std::span<const double>)>& f) {
    const auto& rule = quadRule7();
    std::vector<double> vals(canonicalFields.size());
    double total = 0.0;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        const Complex p0 = mesh.vertices[tri[0]], p1 = mesh.vertices[tri[1]],
                      p2 = mesh.vertices[tri[2]];
        const int c[3] = {mesh.compactIndex[tri[0]], mesh.compactIndex[tri[1]],
                          mesh.compactIndex[tri[2]]};
        double denom = 0.0, acc = 0.0;
        for (const auto& qp : rule) {
            const Complex x = qp.l0 * p0 + qp.l1 * p1 + qp.l2 * p2;
            const double dens = qp.w * metricDensity(x);
            denom += dens;
            for (std::size_t fi = 0; fi < canonicalFields.size(); ++fi) {
                const Vec& field = *canonicalFields[fi];
                vals[fi] = qp.l0 * field[c[0]] + qp.l1 * field[c[1]] + qp.l2 * field[c[2]];
            }
            acc += dens * f(x, vals);
        }
        total += mesh.triGeodesicArea[t] * acc / denom;
    }
    return total;
}

std::uint64_t meshContentHash(const SurfaceMesh& mesh) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 1099511628211ull;
        }
    };
    const std::int64_t level = mesh.refinementLevel, nv = mesh.numFull(),
                       nt = static_cast<std::int64_t>(mesh.triangles.size());
    mix(&level, sizeof level);
    mix(&nv, sizeof nv);
    mix(&nt, sizeof nt);
    for (const Complex& z : mesh.vertices) {
        const double re = z.real(), im = z.imag();
        mix(&re, sizeof re);
        mix(&im, sizeof im);
    }
    for (const auto& t : mesh.triangles) mix(t.data(), sizeof(int) * 3);
    for (int id : mesh.identify) mix(&id, sizeof id);
    return h;
}

int eulerCharacteristic(const SurfaceMesh& mesh) {
    // The quotient is a multigraph, so edges are counted in the full
    // indexing and boundary copies (edges along sides 4..7) are subtracted.
    std::set<std::pair<int, int>> edges;
    int boundaryCopies = 0;
    for (const auto& t : mesh.triangles)
        for (int k = 0; k < 3; ++k) {
            const int a = t[k], b = t[(k + 1) % 3];
            if (!edges.insert(std::minmax(a, b)).second) continue;
            if ((mesh.sideMask[a] & mesh.sideMask[b] & 0xF0u) != 0) ++boundaryCopies;
        }
    const int e = static_cast<int>(edges.size()) - boundaryCopies;
    return mesh.numCanonical() - e + static_cast<int>(mesh.triangles.size());
}

}  // namespace gaussray
