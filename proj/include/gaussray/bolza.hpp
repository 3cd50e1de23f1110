#pragma once

#include <array>
#include <vector>

#include "gaussray/disk.hpp"

namespace gaussray {

// One side of the fundamental octagon: an arc of a Euclidean circle
// orthogonal to the unit circle (center outside the disk).
struct GeodesicSide {
    Complex center;
    double radius = 0.0;
    Complex endpointA;  // corner at the smaller polar angle
    Complex endpointB;

    // Negative when z lies beyond the side (outside the fundamental domain).
    double clearance(Complex z) const { return std::abs(z - center) - radius; }
};

// Fundamental octagon of the Bolza surface, centered at the origin.
// generators[k] maps side k onto side k+4 (mod 8); sides k and k+4 are
// opposite, and all eight corners project to a single surface point.
struct BolzaDomain {
    double vertexRadius = 0.0;   // Euclidean radius of the corners
    double circumradius = 0.0;   // hyperbolic center-to-corner distance
    double apothem = 0.0;        // hyperbolic center-to-side distance
    std::array<DiskIsometry, 8> generators;
    std::array<GeodesicSide, 8> sides;
    std::array<Complex, 8> corners;          // corner j at angle (2j+1)pi/8
    std::array<std::array<int, 2>, 8> sideCorners;  // corner indices of side k
    std::array<std::array<int, 2>, 8> cornerSourceOnSide;  // see buildBolzaDomain

    bool contains(Complex z, double slack = 0.0) const {
        for (const auto& s : sides)
            if (s.clearance(z) < -slack) return false;
        return true;
    }

    // Index of the side with the most negative clearance, or -1 if inside.
    int mostViolatedSide(Complex z, double slack = 0.0) const;
};

BolzaDomain buildBolzaDomain();

// All distinct group elements expressible as words of length <= maxWordLength
// in the eight generators, deduplicated up to overall sign, identity first,
// sorted by word length then lexicographically by matrix entries.
std::vector<DiskIsometry> enumerateGroup(const BolzaDomain& domain, int maxWordLength);

// All group elements whose orbit point gamma(0) lies within hyperbolic
// distance `radius` of the origin, sorted by distance then matrix entries.
std::vector<DiskIsometry> orbitBall(const BolzaDomain& domain, double radius);

struct ReduceResult {
    Complex point;          // representative inside the closed octagon
    DiskIsometry isometry;  // gamma with gamma(z) = point
    int iterations = 0;
};

// Greedy reduction of a disk point into the fundamental octagon.
ReduceResult reduceToDomain(Complex z, const BolzaDomain& domain);

// Hyperbolic area of the octagon by composite angular quadrature of the
// closed-form radial integral (the exact value is 4*pi by Gauss-Bonnet).
double octagonArea(const BolzaDomain& domain, int order = 7, int panelsPerSide = 16);

}  // namespace gaussray
