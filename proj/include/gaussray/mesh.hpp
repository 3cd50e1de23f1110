#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "gaussray/bolza.hpp"

namespace gaussray {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

// Boundary vertex pair identified by a side-pairing translation:
// generators[side].apply(vertices[source]) == vertices[image].
struct BoundaryPairing {
    int source = -1;  // full vertex index on side `side`
    int image = -1;   // full vertex index on side `side + 4`
    int side = -1;    // 0..3
};

// Triangulation of the fundamental octagon with side-pairing identifications.
// Vertices are stored with boundary copies ("full" indexing); degrees of
// freedom live on canonical classes ("compact" indexing). Triangles are
// Euclidean-straight in disk coordinates; the hyperbolic structure enters
// through per-triangle geodesic areas and metric-weighted quadrature.
struct SurfaceMesh {
    std::vector<Complex> vertices;               // full
    std::vector<std::array<int, 3>> triangles;   // full indices
    std::vector<int> identify;                   // full -> canonical full rep
    std::vector<std::uint8_t> sideMask;          // bit k: vertex lies on side k
    std::vector<int> compactIndex;               // full -> compact dof
    std::vector<int> canonicalRep;               // compact dof -> full rep
    std::vector<std::vector<int>> classMembers;  // compact dof -> full copies
    std::vector<BoundaryPairing> pairings;

    int refinementLevel = 0;
    int quadratureOrder = 7;

    std::vector<double> triGeodesicArea;  // exact geodesic triangle areas
    double geodesicArea = 0.0;            // sum of the above (= 4*pi)
    double quadratureArea = 0.0;          // straight-triangle quadrature area
    Vec lumpedMass;                       // compact; unit-weight lumped mass
    SpMat stiffness;                      // compact; cotangent Laplacian
    std::uint64_t contentHash = 0;

    int numFull() const { return static_cast<int>(vertices.size()); }
    int numCanonical() const { return static_cast<int>(canonicalRep.size()); }
    Complex canonicalPoint(int c) const { return vertices[canonicalRep[c]]; }

    // Discrete integral of a canonical vertex field against the lumped mass.
    double integrateLumped(const Vec& f) const { return lumpedMass.dot(f); }
};

// Hyperbolic area of the geodesic triangle with the given vertices.
double hyperbolicTriangleArea(Complex z0, Complex z1, Complex z2);

// 3x3 cotangent element matrix of one Euclidean triangle; rows sum to zero
// identically.
std::array<std::array<double, 3>, 3> cotangentElementMatrix(Complex p0, Complex p1, Complex p2);

// Coarse mesh (center + corners + side midpoints fanned into 16 triangles)
// followed by `refinementLevel` uniform 4-way refinements. New boundary nodes
// on sides 0..3 are projected onto the geodesic arcs; sides 4..7 receive
// their images under the pairing translations. Throws on pairing mismatch
// beyond 1e-8 or degenerate triangles.
SurfaceMesh buildMesh(const BolzaDomain& domain, int refinementLevel, int quadratureOrder = 7);

// Cotangent stiffness folded onto canonical vertices. Row sums vanish
// identically (diagonal assembled as the negated off-diagonal sum).
SpMat assembleStiffness(const SurfaceMesh& mesh);

// Lumped mass: a third of each adjacent geodesic triangle area, scaled by the
// vertex weight. Pass an empty weight for the unit density.
Vec assembleLumpedMass(const SurfaceMesh& mesh, const Vec& weight = Vec());

// Consistent mass with metric-weighted quadrature, normalized per triangle so
// the unit field integrates to the exact geodesic area. Optional vertex
// weight is interpolated linearly.
SpMat assembleConsistentMass(const SurfaceMesh& mesh, const Vec& weight = Vec());

// Quadrature integral of f(z, interpolated field values). Exact for constant
// integrands; interpolation makes it an independent check of nodal integrals.
double integrateQuadrature(const SurfaceMesh& mesh,
                           std::span<const Vec* const> canonicalFields,
                           const std::function<double(Complex, std::span<const double>)>& f);

std::uint64_t meshContentHash(const SurfaceMesh& mesh);

// Canonical V - E + F (equals -2 for a genus-2 surface).
int eulerCharacteristic(const SurfaceMesh& mesh);

}  // namespace gaussray
