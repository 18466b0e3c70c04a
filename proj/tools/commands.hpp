#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "rtw/align.hpp"
#include "rtw/error.hpp"

namespace rtw::cli {

// An rtw::Error tagged with the module that raised it.
class ModuleError : public std::runtime_error {
 public:
  ModuleError(std::string module, const Error& e)
      : std::runtime_error(e.what()), module_(std::move(module)), code_(e.code()) {}

  const std::string& module() const { return module_; }
  ErrorCode code() const { return code_; }

 private:
  std::string module_;
  ErrorCode code_;
};

template <class F>
decltype(auto) in_module(const char* module, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw ModuleError(module, e);
  }
}

struct AlignFlags {
  int epochs = 256;
  double lr = 0.01;
  double lambda = 100.0;
  int sinc_window = 10;
  int loss_window = 5;
  int loss_step = 5;
  int z_factor = 0;
  std::string warp = "mlp";  // mlp | sine:K
};

// Resolved alignment config; throws BadConfig on a malformed --warp.
AlignConfig make_align_config(const AlignFlags& flags, std::uint64_t seed);

struct Common {
  std::string command_line;
  std::string out;
  std::uint64_t seed = 0;
  bool emit_plots = false;
};

struct GenerateArgs {
  std::string kind = "inverted";  // inverted | robot | two-class
  std::string manifold = "sphere:1";
  std::string family = "mixed";
  int n = 4;
  int len = 100;
  int links = 3;
  int train = 10;
  int test = 10;
  int sinc_window = 10;
};

struct AlignArgs {
  std::string input;
  std::string manifold;  // optional consistency check against the manifest
  AlignFlags flags;
};

struct BaselineArgs {
  std::string method;  // dtw | mmddtw | pdtw
  std::string input;
  std::string node_cost = "geodesic";
  bool shuffle = false;
};

struct EvalArgs {
  std::string aligned;
  std::string input;
  std::string original;
  bool raw_lengths = false;
};

struct ClassifyArgs {
  std::string train;
  std::string test;
  std::string method = "rtw";  // rtw | naive
  AlignFlags flags;
};

struct BenchArgs {
  std::string protocol;  // s1-n4 | s1-n30 | spd
  int runs = 5;
  int n = 0;    // 0: protocol default
  int len = 0;  // 0: protocol default
  AlignFlags flags;
};

void run_generate(const Common& common, const GenerateArgs& args);
void run_align(const Common& common, const AlignArgs& args);
void run_baseline(const Common& common, const BaselineArgs& args);
void run_eval(const Common& common, const EvalArgs& args);
void run_classify(const Common& common, const ClassifyArgs& args);
void run_bench(const Common& common, const BenchArgs& args);

}  // namespace rtw::cli
