#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

using namespace rtw::cli;

void add_align_flags(CLI::App* app, AlignFlags& f) {
  app->add_option("--epochs", f.epochs, "training epochs")->capture_default_str();
  app->add_option("--lr", f.lr, "Adam learning rate")->capture_default_str();
  app->add_option("--lambda", f.lambda, "monotonicity penalty weight")->capture_default_str();
  app->add_option("--sinc-window", f.sinc_window, "sinc resampling half-window")->capture_default_str();
  app->add_option("--loss-window", f.loss_window, "Gaussian loss window")->capture_default_str();
  app->add_option("--loss-step", f.loss_step, "loss window stride")->capture_default_str();
  app->add_option("--z-factor", f.z_factor, "Z = factor * T_max (0: min(N, 8))")->capture_default_str();
  app->add_option("--warp", f.warp, "warp parameterization: mlp or sine:K")->capture_default_str();
}

std::string join_args(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riemannian time warping: align, generate, evaluate"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "rtw 0.1.0");

  Common common;
  common.command_line = join_args(argc, argv);
  auto add_common = [&](CLI::App* sub, bool out_required) {
    auto* o = sub->add_option("--out", common.out, "output directory");
    if (out_required) o->required();
    sub->add_option("--seed", common.seed, "random seed")->capture_default_str();
    sub->add_flag("--emit-plots", common.emit_plots, "write SVG plots");
  };

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "generate a synthetic dataset");
  generate->add_option("kind", gen.kind, "inverted | robot | two-class")->required();
  generate->add_option("--manifold", gen.manifold, "manifold for inverted data")->capture_default_str();
  generate->add_option("--family", gen.family, "warp family")->capture_default_str();
  generate->add_option("--n", gen.n, "number of signals")->capture_default_str();
  generate->add_option("--len", gen.len, "signal length")->capture_default_str();
  generate->add_option("--links", gen.links, "robot links")->capture_default_str();
  generate->add_option("--train", gen.train, "two-class training signals per class")->capture_default_str();
  generate->add_option("--test", gen.test, "two-class test signals per class")->capture_default_str();
  generate->add_option("--sinc-window", gen.sinc_window, "sinc resampling half-window")->capture_default_str();
  add_common(generate, true);

  AlignArgs al;
  auto* align = app.add_subcommand("align", "jointly align a signal set");
  align->add_option("--input", al.input, "manifest, set directory or UCR .tsv")->required();
  align->add_option("--manifold", al.manifold, "expected manifold");
  add_align_flags(align, al.flags);
  add_common(align, true);

  BaselineArgs bl;
  auto* baseline = app.add_subcommand("baseline", "run a DTW-family baseline");
  baseline->add_option("method", bl.method, "dtw | mmddtw | pdtw")->required();
  baseline->add_option("--input", bl.input, "manifest, set directory or UCR .tsv")->required();
  baseline->add_option("--node-cost", bl.node_cost, "mmddtw node cost: geodesic | cholesky")->capture_default_str();
  baseline->add_flag("--shuffle", bl.shuffle, "pdtw: shuffle the fold order with --seed");
  add_common(baseline, true);

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "compute DTW metrics for an alignment run");
  eval->add_option("--aligned", ev.aligned, "output directory of align or baseline")->required();
  eval->add_option("--input", ev.input, "original signals (default: input recorded in run.json)");
  eval->add_option("--original", ev.original, "ground-truth base CSV (default: base.csv next to the input)");
  eval->add_flag("--raw-lengths", ev.raw_lengths, "skip common-length resampling before DTW");
  add_common(eval, false);

  ClassifyArgs cl;
  auto* classify = app.add_subcommand("classify", "nearest-centroid classification");
  classify->add_option("--train", cl.train, "labelled training set")->required();
  classify->add_option("--test", cl.test, "labelled test set")->required();
  classify->add_option("--method", cl.method, "centroids: rtw | naive")->capture_default_str();
  add_align_flags(classify, cl.flags);
  add_common(classify, true);

  BenchArgs bn;
  auto* bench = app.add_subcommand("bench", "repeated benchmark protocol");
  bench->add_option("protocol", bn.protocol, "s1-n4 | s1-n30 | spd")->required();
  bench->add_option("--runs", bn.runs, "number of seeds")->capture_default_str();
  bench->add_option("--n", bn.n, "override number of signals");
  bench->add_option("--len", bn.len, "override signal length");
  add_align_flags(bench, bn.flags);
  add_common(bench, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (generate->parsed()) run_generate(common, gen);
    if (align->parsed()) run_align(common, al);
    if (baseline->parsed()) run_baseline(common, bl);
    if (eval->parsed()) run_eval(common, ev);
    if (classify->parsed()) run_classify(common, cl);
    if (bench->parsed()) run_bench(common, bn);
  } catch (const ModuleError& e) {
    std::fprintf(stderr, "rtw: %s error: %s\n", e.module().c_str(), e.what());
    return rtw::is_config_error(e.code()) ? 2 : 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "rtw: io error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "rtw: internal error: %s\n", e.what());
    return 3;
  }
  return 0;
}
