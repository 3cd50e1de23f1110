// Command-line driver: traces the solution branches of the Gauss equation
// family on the Bolza surface and post-processes the immersion geometry.

#include <CLI11.hpp>
#include <iostream>
#include <sstream>

#include "gaussray/pipeline.hpp"

namespace {

std::vector<double> parseTList(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gaussray: Gauss-equation branch tracing on the Bolza surface"};
    app.require_subcommand(1);

    std::string configPath;
    std::string outDir;
    std::string tListArg;
    int refine = -1;
    long long seed = -1;
    bool resume = false;

    app.add_option("--config", configPath, "JSON config file");
    app.add_option("--out", outDir, "output directory (overrides config)");
    app.add_option("--refine", refine, "refinement level override");
    app.add_option("--seed", seed, "seed override");
    app.add_option("--t-list", tListArg, "comma-separated t values for mpass");
    app.add_flag("--resume", resume, "resume continuation from checkpoints");

    const std::vector<std::string> names = {"mesh", "qdiff", "continue", "mpass",
                                            "geom", "report", "certify", "run"};
    for (const auto& n : names) app.add_subcommand(n);

    CLI11_PARSE(app, argc, argv);

    gaussray::PipelineContext ctx;
    try {
        if (!configPath.empty()) ctx.config = gaussray::loadConfig(configPath);
        if (refine >= 0) ctx.config.refinementLevel = refine;
        if (seed >= 0) ctx.config.seed = static_cast<std::uint64_t>(seed);
        if (!tListArg.empty()) ctx.config.mpass.tList = parseTList(tListArg);
        ctx.config.validate();
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return gaussray::kExitUsage;
    }
    ctx.outDir = outDir.empty() ? ctx.config.outputDir : outDir;
    ctx.resume = resume;

    const std::string sub = app.get_subcommands().front()->get_name();
    try {
        if (sub == "mesh") return gaussray::cmdMesh(ctx, std::cout);
        if (sub == "qdiff") return gaussray::cmdQdiff(ctx, std::cout);
        if (sub == "continue") return gaussray::cmdContinue(ctx, std::cout);
        if (sub == "mpass") return gaussray::cmdMpass(ctx, std::cout);
        if (sub == "geom") return gaussray::cmdGeom(ctx, std::cout);
        if (sub == "report") return gaussray::cmdReport(ctx, std::cout);
        if (sub == "certify") return gaussray::cmdCertify(ctx, std::cout);
        if (sub == "run") return gaussray::cmdRun(ctx, std::cout);
    } catch (const std::exception& e) {
        std::cerr << sub << ": " << e.what() << "\n";
        return gaussray::kExitUsage;
    }
    return gaussray::kExitUsage;
}
