#include "gaussray/quad_diff.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gaussray {

QuadraticDifferential QuadraticDifferential::poincareSeries(const BolzaDomain& domain,
                                                            int seedExponent, double depth) {
    if (seedExponent < 0) throw std::invalid_argument("poincareSeries: negative seed exponent");
    QuadraticDifferential qd;
    qd.groupElements = orbitBall(domain, depth);
    qd.seedExponent = seedExponent;
    qd.truncationDepth = depth;
    return qd;
}

Complex evaluateQD(const QuadraticDifferential& qd, Complex z) {
    if (qd.groupElements.empty()) throw std::invalid_argument("evaluateQD: empty truncation set");
    if (std::abs(z) >= 1.0) throw std::domain_error("evaluateQD: point outside the disk");
    Complex sum = 0.0;
    for (const auto& g : qd.groupElements) {
        const Complex gz = g.apply(z);
        const Complex dg = g.derivative(z);
        Complex h = 1.0;
        for (int i = 0; i < qd.seedExponent; ++i) h *= gz;
        sum += h * dg * dg;
    }
    return sum;
}

WeightField weightField(const QuadraticDifferential& qd, const SurfaceMesh& mesh) {
    WeightField w;
    w.provenance.kind = WeightProvenance::Kind::Poincare;
    w.provenance.seedExponent = qd.seedExponent;
    w.provenance.depth = qd.truncationDepth;

    // Evaluate at every vertex copy, then average each identification class;
    // the pre-averaging spread measures the series truncation error.
    std::vector<double> full(mesh.numFull());
    for (int v = 0; v < mesh.numFull(); ++v) {
        const Complex a = evaluateQD(qd, mesh.vertices[v]);
        const double dens = metricDensity(mesh.vertices[v]);
        full[v] = std::norm(a) / (dens * dens);
    }
    w.values = Vec::Zero(mesh.numCanonical());
    double maxVal = 0.0, maxSpread = 0.0;
    for (int c = 0; c < mesh.numCanonical(); ++c) {
        double sum = 0.0, lo = full[mesh.classMembers[c][0]], hi = lo;
        for (int v : mesh.classMembers[c]) {
            sum += full[v];
            lo = std::min(lo, full[v]);
            hi = std::max(hi, full[v]);
        }
        w.values[c] = sum / static_cast<double>(mesh.classMembers[c].size());
        maxVal = std::max(maxVal, w.values[c]);
        maxSpread = std::max(maxSpread, hi - lo);
    }
    w.fieldMax = maxVal;
    w.maxPairDiscrepancy = maxSpread;
    w.shallowTruncation = maxVal > 0 && maxSpread > 1e-3 * maxVal;
    return w;
}

WeightField constantWeight(const SurfaceMesh& mesh, double c) {
    if (!(c >= 0)) throw std::invalid_argument("constantWeight: c must be >= 0");
    WeightField w;
    w.provenance.kind = WeightProvenance::Kind::Constant;
    w.provenance.constantValue = c;
    w.values = Vec::Constant(mesh.numCanonical(), c);
    w.fieldMax = c;
    return w;
}

QdNorms qdNorms(const WeightField& w, const SurfaceMesh& mesh) {
    QdNorms n;
    n.teichmuller = mesh.integrateLumped(w.values.cwiseSqrt());
    n.weilPetersson = std::sqrt(mesh.integrateLumped(w.values));
    return n;
}

QdNorms qdNorms(const QuadraticDifferential& qd, const SurfaceMesh& mesh) {
    return qdNorms(weightField(qd, mesh), mesh);
}

double nonexistenceBound(const WeightField& w, const SurfaceMesh& mesh) {
    const double integral = mesh.integrateLumped(w.values.cwiseSqrt());
    if (integral <= 0) throw std::invalid_argument("nonexistenceBound: weight integrates to zero");
    return 4.0 * std::numbers::pi / integral;
}

std::vector<ZeroCluster> findZeroClusters(const WeightField& w, const SurfaceMesh& mesh,
                                          const QuadraticDifferential& qd, double relThreshold) {
    const double cut = relThreshold * w.fieldMax;
    const int n = mesh.numCanonical();

    // Canonical vertex adjacency.
    std::vector<std::vector<int>> adj(n);
    for (const auto& t : mesh.triangles)
        for (int k = 0; k < 3; ++k) {
            const int a = mesh.compactIndex[t[k]], b = mesh.compactIndex[t[(k + 1) % 3]];
            if (a != b) {
                adj[a].push_back(b);
                adj[b].push_back(a);
            }
        }

    std::vector<int> label(n, -1);
    std::vector<ZeroCluster> clusters;
    for (int v = 0; v < n; ++v) {
        if (label[v] >= 0 || w.values[v] > cut) continue;
        const int id = static_cast<int>(clusters.size());
        std::vector<int> stack{v}, members;
        label[v] = id;
        while (!stack.empty()) {
            const int x = stack.back();
            stack.pop_back();
            members.push_back(x);
            for (int y : adj[x])
                if (label[y] < 0 && w.values[y] <= cut) {
                    label[y] = id;
                    stack.push_back(y);
                }
        }
        ZeroCluster c;
        c.vertexCount = static_cast<int>(members.size());
        int vMin = members[0];
        for (int x : members)
            if (w.values[x] < w.values[vMin]) vMin = x;
        // A cluster can straddle the boundary identification, where copy
        // positions scatter; the winding circle is anchored at the deepest
        // vertex instead and kept inside the disk.
        c.centroid = mesh.canonicalPoint(vMin);
        const double h = std::min(0.12, 0.45 * (1.0 - std::abs(c.centroid)));

        const int samples = 256;
        double angleSum = 0.0;
        Complex prev = evaluateQD(qd, c.centroid + h);
        for (int s = 1; s <= samples; ++s) {
            const double th = 2.0 * std::numbers::pi * s / samples;
            const Complex cur = evaluateQD(qd, c.centroid + h * std::polar(1.0, th));
            angleSum += std::arg(cur / prev);
            prev = cur;
        }
        c.winding = static_cast<int>(std::lround(angleSum / (2.0 * std::numbers::pi)));
        clusters.push_back(c);
    }
    return clusters;
}

}  // namespace gaussray
