#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "fbmlab/noise.hpp"

namespace fbmlab {

/// CSV body with header `time,omega`, 17 significant digits per value.
std::string path_to_csv(const TwoSidedPath& path);

/// Companion manifest {hurst, step, n_past, n_future, seed}.
nlohmann::json path_manifest(const TwoSidedPath& path);

/// Rebuilds a path from its CSV body and manifest; validates the grid.
TwoSidedPath path_from_csv(const std::string& csv, const nlohmann::json& manifest);

void write_path(const TwoSidedPath& path, const std::filesystem::path& csv_file,
                const std::filesystem::path& manifest_file);
TwoSidedPath read_path(const std::filesystem::path& csv_file, const std::filesystem::path& manifest_file);

/// printf("%.17g") formatting shared by every CSV writer.
std::string format_real(double v);

}  // namespace fbmlab
