#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "gaussray/quad_diff.hpp"
#include "gaussray/solver.hpp"

namespace gaussray {

using Json = nlohmann::ordered_json;

std::uint64_t fnvHash(std::string_view s);
std::string hexHash(std::uint64_t h);

void writeTextFile(const std::filesystem::path& path, const std::string& content);
std::string readTextFile(const std::filesystem::path& path);

// Formats a double with full round-trip precision for CSV cells.
std::string formatDouble(double x);

void writeCsv(const std::filesystem::path& path, const std::vector<std::string>& header,
              const std::vector<std::vector<double>>& rows);

Json meshToJson(const SurfaceMesh& mesh);
// Reconstructs a mesh (geometry tables and operators included) from its JSON
// form; refuses content-hash mismatches. Pairing metadata is not persisted.
SurfaceMesh meshFromJson(const Json& j);

Json groupToJson(const std::vector<DiskIsometry>& elements);

Json weightFieldToJson(const WeightField& w, std::uint64_t meshHash, std::uint64_t configHash);
WeightField weightFieldFromJson(const Json& j, const SurfaceMesh& mesh);

Json solutionToJson(const Solution& s, std::uint64_t meshHash, std::uint64_t configHash);
Solution solutionFromJson(const Json& j, const SurfaceMesh& mesh);

Json branchToJson(const Branch& b, std::uint64_t meshHash, std::uint64_t configHash);
Branch branchFromJson(const Json& j, const SurfaceMesh& mesh);

}  // namespace gaussray
