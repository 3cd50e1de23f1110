#pragma once

#include <string>
#include <vector>

#include "gaussray/mesh.hpp"

namespace gaussray {

// Truncated Poincare series of weight 4 with monomial seed H(w) = w^m:
//   alpha(z) = sum_{gamma in truncation set} H(gamma z) * (gamma'(z))^2.
// The truncation set collects group elements with orbit distance <= depth.
struct QuadraticDifferential {
    std::vector<DiskIsometry> groupElements;
    int seedExponent = 0;
    double truncationDepth = 0.0;

    static QuadraticDifferential poincareSeries(const BolzaDomain& domain, int seedExponent,
                                                double depth);
};

Complex evaluateQD(const QuadraticDifferential& qd, Complex z);

struct WeightProvenance {
    enum class Kind { Constant, Poincare, File } kind = Kind::Constant;
    double constantValue = 1.0;
    int seedExponent = 0;
    double depth = 0.0;
    std::string path;
};

// Base weight w0 = |alpha|^2 / g_sigma^2 sampled at canonical mesh vertices.
struct WeightField {
    Vec values;  // canonical, >= 0
    WeightProvenance provenance;
    double fieldMax = 0.0;
    double maxPairDiscrepancy = 0.0;  // before boundary averaging
    bool shallowTruncation = false;   // pair discrepancy > 1e-3 * fieldMax
};

WeightField weightField(const QuadraticDifferential& qd, const SurfaceMesh& mesh);
WeightField constantWeight(const SurfaceMesh& mesh, double c);

struct QdNorms {
    double teichmuller = 0.0;    // integral of |alpha|/g_sigma dA
    double weilPetersson = 0.0;  // sqrt(integral of |alpha|^2/g_sigma^2 dA)
};

QdNorms qdNorms(const WeightField& w, const SurfaceMesh& mesh);
QdNorms qdNorms(const QuadraticDifferential& qd, const SurfaceMesh& mesh);

// Largest ray parameter compatible with solvability: 4*pi divided by the
// Teichmueller norm. Continuation refuses targets at or beyond this value.
double nonexistenceBound(const WeightField& w, const SurfaceMesh& mesh);

struct ZeroCluster {
    Complex centroid;
    int vertexCount = 0;
    int winding = 0;  // multiplicity from the argument principle
};

// Connected clusters of canonical vertices where w0 <= relThreshold * max,
// with zero multiplicities measured by the winding of alpha on a circle
// around each cluster.
std::vector<ZeroCluster> findZeroClusters(const WeightField& w, const SurfaceMesh& mesh,
                                          const QuadraticDifferential& qd,
                                          double relThreshold = 1e-3);

}  // namespace gaussray
