#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gaussray/io.hpp"

namespace gaussray {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Full run configuration. Loads from JSON (missing fields take defaults),
// serializes every field explicitly, and validates documented ranges.
struct RunConfig {
    struct Weight {
        std::string type = "constant";  // constant | poincare | file
        double constantValue = 1.0;
        int seedExponent = 0;
        double depth = 12.0;
        std::string path;
    } weight;

    int refinementLevel = 3;
    int quadratureOrder = 7;
    std::uint64_t seed = 12345;
    double newtonTol = 1e-10;
    int newtonMaxIter = 50;
    double theta = 3.0;

    struct Continuation {
        double dtNatural = 0.01;
        double dsArc = 0.02;
        double dsMax = 0.2;
        double muSwitch = 0.2;
        double tMin = 1e-3;
        int maxSteps = 5000;
        double foldMuTol = 1e-6;
        double foldSTol = 1e-10;
    } continuation;

    struct MountainPass {
        int pathNodes = 21;
        double tol = 1e-3;
        std::vector<double> tList;  // empty: {0.25, 0.5, 0.75} * tau0
    } mpass;

    struct Certify {
        double t = 1.0;
        int attempts = 20;
    } certify;

    std::string outputDir = "out";

    static RunConfig fromJson(const Json& j);
    Json toJson() const;
    void validate() const;  // throws ConfigError
    std::uint64_t hash() const;

    StepControl stepControl() const;
};

RunConfig loadConfig(const std::filesystem::path& path);

}  // namespace gaussray
