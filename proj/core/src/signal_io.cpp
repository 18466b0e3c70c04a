#include "rtw/signal_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rtw/error.hpp"

namespace rtw {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kBadConfig, "cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kBadConfig, "cannot read " + path.string());
  return in;
}

bool parse_number(const std::string& tok, double& out) {
  if (tok.empty()) return false;
  const char* begin = tok.c_str();
  char* end = nullptr;
  errno = 0;
  out = std::strtod(begin, &end);
  return end != begin && *end == '\0' && !(errno == ERANGE && std::isinf(out));
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

json manifold_json(const Manifold& m) {
  json j;
  switch (m.kind()) {
    case Manifold::Kind::kEuclidean: j["type"] = "euclidean"; break;
    case Manifold::Kind::kSphere: j["type"] = "sphere"; break;
    case Manifold::Kind::kSpd: j["type"] = "spd"; break;
    case Manifold::Kind::kProduct: j["type"] = "product"; break;
  }
  if (m.kind() == Manifold::Kind::kProduct) {
    j["dim"] = m.intrinsic_dim();
    j["components"] = json::array();
    for (const auto& c : m.components()) j["components"].push_back(manifold_json(c));
  } else {
    j["dim"] = m.dim();
  }
  return j;
}

Manifold manifold_from(const json& j) {
  if (!j.is_object() || !j.contains("type")) throw Error(ErrorCode::kParseError, "manifold entry needs a type");
  const std::string type = j.at("type").get<std::string>();
  if (type == "product") {
    std::vector<Manifold> parts;
    for (const auto& c : j.at("components")) parts.push_back(manifold_from(c));
    return Manifold::product(std::move(parts));
  }
  if (type == "pose3d") return Manifold::pose3d();
  return Manifold::parse(type + ":" + std::to_string(j.at("dim").get<int>()));
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_signal_csv(const fs::path& path, const Signal& s) {
  auto out = open_out(path);
  for (Eigen::Index t = 0; t < s.rows(); ++t) {
    for (Eigen::Index c = 0; c < s.cols(); ++c) {
      if (c) out << ',';
      out << format_double(s(t, c));
    }
    out << '\n';
  }
}

Signal read_signal_csv(const fs::path& path) {
  auto in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(t);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      double v = 0.0;
      if (!parse_number(trim(tok), v)) {
        throw Error(ErrorCode::kParseError, path.string() + ":" + std::to_string(line_no) + ": bad number '" + tok + "'");
      }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorCode::kParseError, path.string() + ":" + std::to_string(line_no) + ": expected " +
                                              std::to_string(rows.front().size()) + " columns, got " +
                                              std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  Signal s(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t c = 0; c < rows[r].size(); ++c) s(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
  return s;
}

void write_matrix_csv(const fs::path& path, const Mat& m, const std::vector<std::string>& header) {
  auto out = open_out(path);
  if (!header.empty()) {
    out << '#';
    for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
  }
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

std::string manifold_to_json(const Manifold& m) { return manifold_json(m).dump(); }

Manifold manifold_from_json(const std::string& text) {
  try {
    return manifold_from(json::parse(text));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("manifold descriptor: ") + e.what());
  }
}

void save_signal_set(const fs::path& dir, const SignalSet& set, const std::string& prefix) {
  fs::create_directories(dir);
  json j;
  j["manifold"] = manifold_json(set.manifold);
  j["signals"] = json::array();
  for (size_t n = 0; n < set.signals.size(); ++n) {
    char name[64];
    std::snprintf(name, sizeof name, "%s_%03zu.csv", prefix.c_str(), n);
    write_signal_csv(dir / name, set.signals[n]);
    j["signals"].push_back(name);
  }
  if (!set.labels.empty()) j["labels"] = set.labels;
  auto out = open_out(dir / "manifest.json");
  out << j.dump(2) << '\n';
}

LoadedSignals load_signal_set(const fs::path& manifest) {
  auto in = open_in(manifest);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, manifest.string() + ": " + e.what());
  }
  if (!j.contains("manifold") || !j.contains("signals")) {
    throw Error(ErrorCode::kParseError, manifest.string() + ": manifest needs 'manifold' and 'signals'");
  }
  Manifold m = [&] {
    try {
      return manifold_from(j.at("manifold"));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParseError, manifest.string() + ": " + e.what());
    }
  }();
  LoadedSignals out{SignalSet{m, {}, {}}, 0};
  const fs::path base = manifest.parent_path();
  for (const auto& name : j.at("signals")) {
    const fs::path p = base / name.get<std::string>();
    Signal s = read_signal_csv(p);
    if (s.cols() != m.ambient_dim()) {
      throw Error(ErrorCode::kManifestMismatch, p.string() + " has " + std::to_string(s.cols()) + " columns, " +
                                                    m.to_string() + " needs " + std::to_string(m.ambient_dim()));
    }
    if (!s.allFinite()) throw Error(ErrorCode::kNonFinite, p.string() + " contains non-finite values");
    for (Eigen::Index t = 0; t < s.rows(); ++t) {
      const Vec row = s.row(t).transpose();
      if (!m.contains(row)) {
        s.row(t) = m.project(row).transpose();
        ++out.warnings;
      }
    }
    out.set.signals.push_back(std::move(s));
  }
  if (j.contains("labels")) {
    out.set.labels = j.at("labels").get<std::vector<int>>();
    if (out.set.labels.size() != out.set.signals.size()) {
      throw Error(ErrorCode::kManifestMismatch, manifest.string() + ": label count differs from signal count");
    }
  }
  return out;
}

SignalSet load_ucr_tsv(const fs::path& path) {
  auto in = open_in(path);
  SignalSet set{Manifold::euclidean(1), {}, {}};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<double> values;
    bool have_label = false;
    double label = 0.0;
    while (std::getline(ss, tok, '\t')) {
      double v = 0.0;
      const bool ok = parse_number(trim(tok), v) && std::isfinite(v);
      if (!have_label) {
        if (!ok || v != std::round(v)) {
          throw Error(ErrorCode::kParseError, path.string() + ":" + std::to_string(line_no) + ": bad label '" + tok + "'");
        }
        label = v;
        have_label = true;
        continue;
      }
      if (!ok) break;
      values.push_back(v);
    }
    if (values.empty()) {
      throw Error(ErrorCode::kParseError, path.string() + ":" + std::to_string(line_no) + ": no values");
    }
    Signal s(static_cast<Eigen::Index>(values.size()), 1);
    for (size_t i = 0; i < values.size(); ++i) s(static_cast<Eigen::Index>(i), 0) = values[i];
    set.signals.push_back(std::move(s));
    set.labels.push_back(static_cast<int>(label));
  }
  return set;
}

}  // namespace rtw
