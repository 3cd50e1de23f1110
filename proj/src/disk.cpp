#include "gaussray/disk.hpp"

#include <cmath>

namespace gaussray {

double metricDensity(Complex z) {
    const double r2 = std::norm(z);
    if (r2 >= 1.0) throw std::domain_error("metricDensity: point outside the open unit disk");
    const double d = 1.0 - r2;
    return 4.0 / (d * d);
}

double hypDistance(Complex z, Complex w) {
    const double r = std::abs(z - w) / std::abs(1.0 - std::conj(z) * w);
    return 2.0 * std::atanh(r);
}

double hypDistance0(Complex z) { return 2.0 * std::atanh(std::abs(z)); }

}  // namespace gaussray
