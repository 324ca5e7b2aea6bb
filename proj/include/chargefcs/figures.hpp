#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "chargefcs/experiment.hpp"

namespace chargefcs::cli {

struct FigureOptions {
    /// Small system sizes and sample counts, for smoke tests of the plumbing.
    bool quick = false;
    std::uint64_t seed = 20230101;
};

std::vector<std::string> figure_names();

/// Tidy rows (same columns as run CSVs) plus panel metadata: axis scales, the y-axis
/// transform the renderer should apply, guide-line exponents, and the desk-scale
/// parameters used.
struct FigureBundle {
    CsvTable table;
    nlohmann::json meta;
};

FigureBundle figure_dataset(std::string_view name, const FigureOptions& opts = {});
/// Writes <out_dir>/<name>.csv and <out_dir>/<name>.meta.json.
void write_figure(std::string_view name, const std::filesystem::path& out_dir, const FigureOptions& opts = {});

}  // namespace chargefcs::cli
