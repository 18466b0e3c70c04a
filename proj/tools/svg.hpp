#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "rtw/manifold.hpp"
#include "rtw/types.hpp"

namespace rtw::cli {

// Signals as polylines. S^1 signals use the polar convention (angle on the
// circle, radius growing with time); anything else gets one panel per
// ambient coordinate, capped at nine panels.
void plot_signals(const std::filesystem::path& path, const Manifold& m, std::span<const Signal> signals,
                  const std::string& title, const Signal* highlight = nullptr);

// Columns of a Z x N warp matrix against the normalized grid.
void plot_warps(const std::filesystem::path& path, const Mat& gamma, const std::string& title);

}  // namespace rtw::cli
