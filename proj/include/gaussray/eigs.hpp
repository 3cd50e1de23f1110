#pragma once

#include <optional>

#include "gaussray/mesh.hpp"

namespace gaussray {

// Warm-start data reused across nearby eigenvalue solves (e.g. along a
// continuation branch).
struct EigenContext {
    Vec vector;
    double shift = 0.0;
    bool valid = false;
};

struct EigenResult {
    double value = 0.0;
    Vec vector;
    int iterations = 0;
};

// Smallest eigenvalue of the symmetric pencil (A, M) with M positive
// definite, by shift-and-invert power iteration with Rayleigh refinement.
// `lowerBound` must be a rigorous bound below the smallest eigenvalue so the
// initial factorization is positive definite. If `deflate` is given, the
// iteration is confined to its M-orthogonal complement (used to reach the
// second eigenvalue past a known kernel vector).
EigenResult smallestPencilEigenvalue(const SpMat& A, const SpMat& M, double lowerBound,
                                     EigenContext* ctx = nullptr,
                                     const Vec* deflate = nullptr, double tol = 1e-12,
                                     int maxIter = 2000);

}  // namespace gaussray
