#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <string>

#include "rtw/error.hpp"
#include "rtw/signal_io.hpp"
#include "test_util.hpp"

using namespace rtw;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("rtw_io_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kBadConfig;
}

}  // namespace

TEST_CASE("csv roundtrip is bit-identical") {
  TempDir dir("csv");
  std::mt19937_64 rng(1);
  Signal s(50, 4);
  for (Eigen::Index i = 0; i < s.size(); ++i) s.data()[i] = std::normal_distribution<double>(0.0, 1e3)(rng);
  s(0, 0) = std::numeric_limits<double>::denorm_min();
  s(1, 1) = -0.0;
  s(2, 2) = 1e300;
  s(3, 3) = 0.1;
  write_signal_csv(dir.path / "a.csv", s);
  const Signal r = read_signal_csv(dir.path / "a.csv");
  REQUIRE(r.rows() == 50);
  REQUIRE(r.cols() == 4);
  for (Eigen::Index i = 0; i < s.size(); ++i) CHECK(r.data()[i] == s.data()[i]);
}

TEST_CASE("csv comments and parse errors") {
  TempDir dir("parse");
  write_text(dir.path / "ok.csv", "# header\n1,2\n\n# mid\n3,4\n");
  const Signal ok = read_signal_csv(dir.path / "ok.csv");
  CHECK(ok.rows() == 2);
  CHECK(ok(1, 0) == 3.0);

  write_text(dir.path / "bad.csv", "1,2\n3,4\n5,x\n");
  try {
    read_signal_csv(dir.path / "bad.csv");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParseError);
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
  write_text(dir.path / "ragged.csv", "1,2\n3\n");
  CHECK(code_of([&] { read_signal_csv(dir.path / "ragged.csv"); }) == ErrorCode::kParseError);
}

TEST_CASE("ucr tsv") {
  TempDir dir("ucr");
  write_text(dir.path / "d.tsv", "2\t0.1\t0.2\t0.3\n1\t5\t6\tNaN\t\n");
  const SignalSet set = load_ucr_tsv(dir.path / "d.tsv");
  REQUIRE(set.signals.size() == 2);
  CHECK(set.labels == std::vector<int>{2, 1});
  CHECK(set.signals[0].rows() == 3);
  CHECK(set.signals[0](0, 0) == 0.1);
  CHECK(set.signals[0](2, 0) == 0.3);
  CHECK(set.signals[1].rows() == 2);
  CHECK(set.manifold == Manifold::euclidean(1));

  write_text(dir.path / "bad.tsv", "1\t0.5\nabc\t1\n");
  try {
    load_ucr_tsv(dir.path / "bad.tsv");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParseError);
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }
}

TEST_CASE("manifold descriptor json roundtrip") {
  for (const Manifold& m : {Manifold::euclidean(3), Manifold::sphere(2), Manifold::spd(4), Manifold::pose3d(),
                            Manifold::product({Manifold::sphere(1), Manifold::spd(2), Manifold::euclidean(2)})}) {
    CAPTURE(m.to_string());
    CHECK(manifold_from_json(manifold_to_json(m)) == m);
  }
  CHECK(code_of([] { manifold_from_json("{\"dim\": 2}"); }) == ErrorCode::kParseError);
  CHECK(code_of([] { manifold_from_json("not json"); }) == ErrorCode::kParseError);
}

TEST_CASE("signal set save and load") {
  TempDir dir("set");
  std::mt19937_64 rng(2);
  const Manifold m = Manifold::spd(2);
  SignalSet set{m, {}, {0, 1, 1}};
  for (int n = 0; n < 3; ++n) {
    Signal s(10, 4);
    for (int t = 0; t < 10; ++t) s.row(t) = rtw::testing::random_point(m, rng).transpose();
    set.signals.push_back(s);
  }
  save_signal_set(dir.path, set);
  const LoadedSignals back = load_signal_set(dir.path / "manifest.json");
  CHECK(back.warnings == 0);
  CHECK(back.set.manifold == m);
  CHECK(back.set.labels == set.labels);
  REQUIRE(back.set.signals.size() == 3);
  for (size_t n = 0; n < 3; ++n) CHECK(back.set.signals[n] == set.signals[n]);
}

TEST_CASE("loader projects off-manifold rows and counts them") {
  TempDir dir("warn");
  write_text(dir.path / "s.csv", "1,0,0\n0,2,0\n0,0.6,0.8\n3,4,0\n");
  write_text(dir.path / "manifest.json",
             R"({"manifold": {"type": "sphere", "dim": 2}, "signals": ["s.csv"]})");
  const LoadedSignals l = load_signal_set(dir.path / "manifest.json");
  CHECK(l.warnings == 2);
  const Signal& s = l.set.signals[0];
  CHECK((s.row(1) - Eigen::RowVector3d(0, 1, 0)).norm() < 1e-15);
  CHECK((s.row(3) - Eigen::RowVector3d(0.6, 0.8, 0)).norm() < 1e-15);
}

TEST_CASE("manifest mismatches") {
  TempDir dir("mismatch");
  write_text(dir.path / "s.csv", "1,0\n0,1\n");
  write_text(dir.path / "wide.json", R"({"manifold": {"type": "sphere", "dim": 2}, "signals": ["s.csv"]})");
  CHECK(code_of([&] { load_signal_set(dir.path / "wide.json"); }) == ErrorCode::kManifestMismatch);
  write_text(dir.path / "labels.json",
             R"({"manifold": {"type": "sphere", "dim": 1}, "signals": ["s.csv"], "labels": [0, 1]})");
  CHECK(code_of([&] { load_signal_set(dir.path / "labels.json"); }) == ErrorCode::kManifestMismatch);
  write_text(dir.path / "broken.json", "{\"manifold\": ");
  CHECK(code_of([&] { load_signal_set(dir.path / "broken.json"); }) == ErrorCode::kParseError);
  CHECK(is_config_error(ErrorCode::kManifestMismatch));
  CHECK(is_config_error(ErrorCode::kParseError));
  CHECK(!is_config_error(ErrorCode::kNonFinite));
}
