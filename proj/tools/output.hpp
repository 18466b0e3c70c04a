#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rtw/align.hpp"
#include "rtw/metrics.hpp"
#include "rtw/types.hpp"

namespace rtw::cli {

using json = nlohmann::ordered_json;

void ensure_dir(const std::filesystem::path& dir);
void write_json(const std::filesystem::path& path, const json& j);
json read_json(const std::filesystem::path& path);

json to_json(const Metric& m);
json to_json(const AlignConfig& cfg);
json to_json(const Feasibility& f);

// Z x N warp matrix with a gamma_n header.
void write_warps(const std::filesystem::path& path, const Mat& gamma);
void write_trace(const std::filesystem::path& path, const std::vector<EpochRecord>& trace);

}  // namespace rtw::cli
