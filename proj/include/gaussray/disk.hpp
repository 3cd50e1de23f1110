#pragma once

#include <complex>
#include <stdexcept>

namespace gaussray {

using Complex = std::complex<double>;

// Orientation-preserving isometry of the Poincare disk,
//   z |-> (a z + b) / (conj(b) z + conj(a)),   |a|^2 - |b|^2 = 1.
// Composition is the product of the associated SU(1,1) matrices
// [[a, b], [conj(b), conj(a)]]; (a, b) and (-a, -b) act identically.
struct DiskIsometry {
    Complex a{1.0, 0.0};
    Complex b{0.0, 0.0};

    static DiskIsometry identity() { return {}; }

    Complex apply(Complex z) const {
        return (a * z + b) / (std::conj(b) * z + std::conj(a));
    }

    // Complex derivative of the map at z: 1 / (conj(b) z + conj(a))^2.
    Complex derivative(Complex z) const {
        const Complex d = std::conj(b) * z + std::conj(a);
        return 1.0 / (d * d);
    }

    DiskIsometry inverse() const { return {std::conj(a), -b}; }

    // |a|^2 - |b|^2 - 1, zero for a genuine disk isometry.
    double determinantDefect() const {
        return std::norm(a) - std::norm(b) - 1.0;
    }

    // Flips the overall sign so the first component of (Re a, Im a, Re b, Im b)
    // exceeding the tolerance in magnitude becomes positive.
    DiskIsometry signNormalized(double tol = 1e-12) const {
        const double c[4] = {a.real(), a.imag(), b.real(), b.imag()};
        for (double x : c) {
            if (x > tol) return *this;
            if (x < -tol) return {-a, -b};
        }
        return *this;
    }
};

inline DiskIsometry operator*(const DiskIsometry& g, const DiskIsometry& h) {
    // g * h acts as z |-> g(h(z)).
    return {g.a * h.a + g.b * std::conj(h.b), g.a * h.b + g.b * std::conj(h.a)};
}

// Density of the hyperbolic metric 4/(1-|z|^2)^2 |dz|^2 (curvature -1).
double metricDensity(Complex z);

// Hyperbolic distance between two disk points.
double hypDistance(Complex z, Complex w);

// Hyperbolic distance from the origin.
double hypDistance0(Complex z);

}  // namespace gaussray
