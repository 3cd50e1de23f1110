#include "gaussray/bolza.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <unordered_map>

namespace gaussray {

namespace {

constexpr double kPi = std::numbers::pi;

// Spatial-hash dedup of isometries up to overall sign. Distinct elements of a
// discrete cocompact group are separated by much more than the accumulated
// roundoff of repeated products, so a coarse cell size with neighbor lookups
// decides membership reliably.
class IsometrySet {
public:
    explicit IsometrySet(double cell = 1e-7, double matchTol = 1e-9)
        : cell_(cell), tol_(matchTol) {}

    // Returns the index of the stored match, or -1 after inserting a new one.
    int findOrInsert(const DiskIsometry& g, std::vector<DiskIsometry>& store) {
        const DiskIsometry n = g.signNormalized();
        const std::array<double, 4> c = components(n);
        std::array<std::array<std::int64_t, 2>, 4> cells{};
        for (int i = 0; i < 4; ++i) {
            cells[i][0] = static_cast<std::int64_t>(std::floor((c[i] - tol_) / cell_));
            cells[i][1] = static_cast<std::int64_t>(std::floor((c[i] + tol_) / cell_));
        }
        for (std::int64_t k0 = cells[0][0]; k0 <= cells[0][1]; ++k0)
            for (std::int64_t k1 = cells[1][0]; k1 <= cells[1][1]; ++k1)
                for (std::int64_t k2 = cells[2][0]; k2 <= cells[2][1]; ++k2)
                    for (std::int64_t k3 = cells[3][0]; k3 <= cells[3][1]; ++k3) {
                        auto it = map_.find(key(k0, k1, k2, k3));
                        if (it == map_.end()) continue;
                        for (int idx : it->second)
                            if (close(components(store[idx].signNormalized()), c)) return idx;
                    }
        store.push_back(n);
        const int idx = static_cast<int>(store.size()) - 1;
        map_[keyOf(c)].push_back(idx);
        return -1;
    }

private:
    static std::array<double, 4> components(const DiskIsometry& g) {
        return {g.a.real(), g.a.imag(), g.b.real(), g.b.imag()};
    }
    bool close(const std::array<double, 4>& x, const std::array<double, 4>& y) const {
        for (int i = 0; i < 4; ++i)
            if (std::abs(x[i] - y[i]) > tol_) return false;
        return true;
    }
    static std::uint64_t key(std::int64_t k0, std::int64_t k1, std::int64_t k2, std::int64_t k3) {
        std::uint64_t h = 1469598103934665603ull;
        for (std::int64_t k : {k0, k1, k2, k3}) {
            h ^= static_cast<std::uint64_t>(k);
            h *= 1099511628211ull;
        }
        return h;
    }
    std::uint64_t keyOf(const std::array<double, 4>& c) const {
        return key(static_cast<std::int64_t>(std::floor(c[0] / cell_)),
                   static_cast<std::int64_t>(std::floor(c[1] / cell_)),
                   static_cast<std::int64_t>(std::floor(c[2] / cell_)),
                   static_cast<std::int64_t>(std::floor(c[3] / cell_)));
    }

    double cell_;
    double tol_;
    std::unordered_map<std::uint64_t, std::vector<int>> map_;
};

bool lexLess(const DiskIsometry& x, const DiskIsometry& y) {
    const DiskIsometry p = x.signNormalized(), q = y.signNormalized();
    const double a[4] = {p.a.real(), p.a.imag(), p.b.real(), p.b.imag()};
    const double b[4] = {q.a.real(), q.a.imag(), q.b.real(), q.b.imag()};
    for (int i = 0; i < 4; ++i) {
        if (a[i] < b[i] - 1e-12) return true;
        if (a[i] > b[i] + 1e-12) return false;
    }
    return false;
}

}  // namespace

int BolzaDomain::mostViolatedSide(Complex z, double slack) const {
    int worst = -1;
    double worstClearance = -slack;
    for (int k = 0; k < 8; ++k) {
        const double c = sides[k].clearance(z);
        if (c < worstClearance) {
            worstClearance = c;
            worst = k;
        }
    }
    return worst;
}

BolzaDomain buildBolzaDomain() {
    BolzaDomain d;

    const double cot8 = 1.0 / std::tan(kPi / 8.0);       // 1 + sqrt(2)
    const double coshR = cot8 * cot8;
    d.circumradius = std::acosh(coshR);
    d.apothem = std::acosh(cot8);
    const double sinhR = std::sqrt(coshR * coshR - 1.0);
    d.vertexRadius = sinhR / (1.0 + coshR);              // tanh(R/2)

    // Translation along direction k*pi/4 pairing the opposite sides.
    const double alpha = 1.0 + std::sqrt(2.0);
    const double beta = std::sqrt(2.0 + 2.0 * std::sqrt(2.0));
    for (int k = 0; k < 8; ++k)
        d.generators[k] = {Complex(alpha, 0.0), beta * std::polar(1.0, k * kPi / 4.0)};

    for (int j = 0; j < 8; ++j)
        d.corners[j] = d.vertexRadius * std::polar(1.0, (2 * j + 1) * kPi / 8.0);

    // Side k faces direction (k+4)*pi/4; its circle is orthogonal to the unit
    // circle with closest point at Euclidean radius tanh(apothem/2).
    const double tau = std::sinh(d.apothem) / (1.0 + std::cosh(d.apothem));
    const double c = 0.5 * (tau + 1.0 / tau);
    const double rho = 0.5 * (1.0 / tau - tau);
    for (int k = 0; k < 8; ++k) {
        GeodesicSide s;
        s.center = c * std::polar(1.0, (k + 4) * kPi / 4.0);
        s.radius = rho;
        const int ca = (k + 3) % 8, cb = (k + 4) % 8;
        s.endpointA = d.corners[ca];
        s.endpointB = d.corners[cb];
        d.sides[k] = s;
        d.sideCorners[k] = {ca, cb};
    }

    // Pairing sanity: generators[k] must carry side k onto side k+4.
    for (int k = 0; k < 8; ++k) {
        const auto& g = d.generators[k];
        const auto& src = d.sides[k];
        const auto& dst = d.sides[(k + 4) % 8];
        for (Complex e : {src.endpointA, src.endpointB}) {
            const Complex im = g.apply(e);
            const double miss = std::min(std::abs(im - dst.endpointA), std::abs(im - dst.endpointB));
            if (miss > 1e-10) throw std::runtime_error("buildBolzaDomain: side pairing failed");
        }
    }

    // For each side k in 4..7 record, per endpoint corner, the corner index on
    // side k-4 that generators[k-4] maps onto it (the pairing reverses the
    // side's orientation). Used when mesh refinement mirrors boundary nodes.
    for (int k = 0; k < 8; ++k) d.cornerSourceOnSide[k] = {-1, -1};
    for (int k = 4; k < 8; ++k) {
        const auto& g = d.generators[k - 4];
        for (int e = 0; e < 2; ++e) {
            const int target = d.sideCorners[k][e];
            int found = -1;
            for (int s = 0; s < 2; ++s) {
                const int cand = d.sideCorners[k - 4][s];
                if (std::abs(g.apply(d.corners[cand]) - d.corners[target]) < 1e-9) found = cand;
            }
            if (found < 0) throw std::runtime_error("buildBolzaDomain: corner pairing failed");
            d.cornerSourceOnSide[k][e] = found;
        }
    }

    // Surface group relation T0 T1^-1 T2 T3^-1 T0^-1 T1 T2^-1 T3 = +-identity.
    DiskIsometry rel = DiskIsometry::identity();
    const int word[8] = {0, 5, 2, 7, 4, 1, 6, 3};
    for (int k : word) rel = rel * d.generators[k];
    const DiskIsometry n = rel.signNormalized();
    if (std::abs(n.a - 1.0) + std::abs(n.b) > 1e-8)
        throw std::runtime_error("buildBolzaDomain: surface group relation violated");

    return d;
}

std::vector<DiskIsometry> enumerateGroup(const BolzaDomain& domain, int maxWordLength) {
    if (maxWordLength < 0) throw std::invalid_argument("enumerateGroup: negative word length");

    std::vector<DiskIsometry> store;
    std::vector<int> wordLen;
    IsometrySet seen;
    seen.findOrInsert(DiskIsometry::identity(), store);
    wordLen.push_back(0);

    std::size_t frontierBegin = 0;
    for (int len = 1; len <= maxWordLength; ++len) {
        const std::size_t frontierEnd = store.size();
        for (std::size_t i = frontierBegin; i < frontierEnd; ++i) {
            const DiskIsometry g = store[i];
            for (const auto& gen : domain.generators) {
                const DiskIsometry h = g * gen;
                if (seen.findOrInsert(h, store) < 0) wordLen.push_back(len);
            }
        }
        frontierBegin = frontierEnd;
    }

    std::vector<int> order(store.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        if (wordLen[x] != wordLen[y]) return wordLen[x] < wordLen[y];
        return lexLess(store[x], store[y]);
    });
    std::vector<DiskIsometry> out;
    out.reserve(store.size());
    for (int i : order) out.push_back(store[i]);
    return out;
}

std::vector<DiskIsometry> orbitBall(const BolzaDomain& domain, double radius) {
    if (radius < 0) throw std::invalid_argument("orbitBall: negative radius");

    // BFS through the Cayley graph keeping elements whose orbit point stays
    // within radius + slack; the slack covers geodesics that leave the ball
    // of the target radius before coming back (bounded by the domain size).
    const double slack = 2.5;
    std::vector<DiskIsometry> store;
    IsometrySet seen;
    seen.findOrInsert(DiskIsometry::identity(), store);

    std::size_t frontierBegin = 0;
    while (frontierBegin < store.size()) {
        const std::size_t frontierEnd = store.size();
        for (std::size_t i = frontierBegin; i < frontierEnd; ++i) {
            const DiskIsometry g = store[i];
            for (const auto& gen : domain.generators) {
                const DiskIsometry h = g * gen;
                if (hypDistance0(h.apply(0.0)) > radius + slack) continue;
                seen.findOrInsert(h, store);
            }
        }
        frontierBegin = frontierEnd;
    }

    std::vector<DiskIsometry> out;
    for (const auto& g : store)
        if (hypDistance0(g.apply(0.0)) <= radius) out.push_back(g);
    std::sort(out.begin(), out.end(), [](const DiskIsometry& x, const DiskIsometry& y) {
        const double dx = hypDistance0(x.apply(0.0));
        const double dy = hypDistance0(y.apply(0.0));
        if (std::abs(dx - dy) > 1e-12) return dx < dy;
        return lexLess(x, y);
    });
    return out;
}

double octagonArea(const BolzaDomain& domain, int order, int panelsPerSide) {
    if (order < 2 || panelsPerSide < 1) throw std::invalid_argument("octagonArea: bad parameters");
    // Per side, integrate over its angular window [-pi/8, pi/8] around the
    // side direction. Along the ray at offset alpha, the boundary radius is
    // the near intersection with the side circle and the radial integral of
    // the density 4 r/(1-r^2)^2 is 2/(1-R^2) - 2. Composite panels keep the
    // nearby complex root of the discriminant from stalling the quadrature.
    const double d = std::abs(domain.sides[0].center);
    const double rho = domain.sides[0].radius;

    // Gauss-Legendre nodes/weights on [-1, 1] via Newton on Legendre P_n.
    const int n = order;
    std::vector<double> node(n), weight(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (x * p1 - p0) / (x * x - 1.0);
        node[i] = x;
        weight[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }

    const double half = kPi / 8.0;
    const double panelWidth = 2.0 * half / panelsPerSide;
    double sector = 0.0;
    for (int p = 0; p < panelsPerSide; ++p) {
        const double lo = -half + p * panelWidth;
        const double mid = lo + 0.5 * panelWidth;
        for (int i = 0; i < n; ++i) {
            const double alpha = mid + 0.5 * panelWidth * node[i];
            const double disc = rho * rho - d * d * std::sin(alpha) * std::sin(alpha);
            const double R = d * std::cos(alpha) - std::sqrt(disc);
            sector += 0.5 * panelWidth * weight[i] * (2.0 / (1.0 - R * R) - 2.0);
        }
    }
    return 8.0 * sector;
}

ReduceResult reduceToDomain(Complex z, const BolzaDomain& domain) {
    if (std::abs(z) >= 1.0) throw std::domain_error("reduceToDomain: point outside the disk");

    ReduceResult r{z, DiskIsometry::identity(), 0};
    const int maxIter = 50 * (1 + static_cast<int>(hypDistance0(z)));
    while (true) {
        const int k = domain.mostViolatedSide(r.point, 1e-14);
        if (k < 0) return r;
        if (++r.iterations > maxIter)
            throw std::runtime_error("reduceToDomain: reduction failed to terminate");
        r.isometry = domain.generators[k] * r.isometry;
        r.point = domain.generators[k].apply(r.point);
    }
}

}  // namespace gaussray
