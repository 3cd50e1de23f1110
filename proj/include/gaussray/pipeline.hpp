#pragma once

#include <iosfwd>

#include "gaussray/config.hpp"
#include "gaussray/immersion.hpp"
#include "gaussray/mountain_pass.hpp"

namespace gaussray {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitContinuationAbort = 3;
inline constexpr int kExitMountainPass = 4;

struct PipelineContext {
    RunConfig config;
    std::filesystem::path outDir;
    bool resume = false;
};

int cmdMesh(const PipelineContext& ctx, std::ostream& log);
int cmdQdiff(const PipelineContext& ctx, std::ostream& log);
int cmdContinue(const PipelineContext& ctx, std::ostream& log);
int cmdMpass(const PipelineContext& ctx, std::ostream& log);
int cmdGeom(const PipelineContext& ctx, std::ostream& log);
int cmdReport(const PipelineContext& ctx, std::ostream& log);
int cmdCertify(const PipelineContext& ctx, std::ostream& log);

// mesh, qdiff, continue, mpass, geom, report in sequence; stops at the first
// nonzero exit code.
int cmdRun(const PipelineContext& ctx, std::ostream& log);

}  // namespace gaussray
