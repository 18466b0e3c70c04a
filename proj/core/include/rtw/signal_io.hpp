#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rtw/manifold.hpp"
#include "rtw/types.hpp"

namespace rtw {

struct SignalSet {
  Manifold manifold;
  std::vector<Signal> signals;
  std::vector<int> labels;  // empty or one per signal
};

// Per-signal CSV: one row per sample, '#' comment lines allowed. Values are
// written with 17 significant digits.
void write_signal_csv(const std::filesystem::path& path, const Signal& s);
Signal read_signal_csv(const std::filesystem::path& path);

void write_matrix_csv(const std::filesystem::path& path, const Mat& m, const std::vector<std::string>& header = {});

std::string format_double(double v);

// Manifold descriptor as JSON text: {"type": ..., "dim": ..., "components": [...]}.
std::string manifold_to_json(const Manifold& m);
Manifold manifold_from_json(const std::string& text);

// Writes manifest.json plus one CSV per signal into dir.
void save_signal_set(const std::filesystem::path& dir, const SignalSet& set, const std::string& prefix = "signal");

struct LoadedSignals {
  SignalSet set;
  int warnings = 0;  // rows moved onto the manifold by projection
};

// Reads a manifest. Signal paths are relative to the manifest directory.
LoadedSignals load_signal_set(const std::filesystem::path& manifest);

// UCR TSV: label first, then values. A row ends at its first missing or
// non-numeric token.
SignalSet load_ucr_tsv(const std::filesystem::path& path);

}  // namespace rtw
