#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rtw/error.hpp"

namespace rtw::cli {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

struct Canvas {
  double width;
  double height;
  std::ostringstream body;

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color, double stroke,
                double opacity) {
    body << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << num(stroke)
         << "\" stroke-opacity=\"" << num(opacity) << "\" points=\"";
    for (const auto& [x, y] : pts) body << num(x) << ',' << num(y) << ' ';
    body << "\"/>\n";
  }

  void text(double x, double y, const std::string& s, int size = 12) {
    body << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-family=\"sans-serif\" font-size=\"" << size
         << "\">" << s << "</text>\n";
  }

  void rect(double x, double y, double w, double h) {
    body << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w) << "\" height=\"" << num(h)
         << "\" fill=\"none\" stroke=\"#cccccc\"/>\n";
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::kBadConfig, "cannot write " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
        << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << body.str() << "</svg>\n";
  }
};

const char* color(size_t i) { return kPalette[i % std::size(kPalette)]; }

void polar_panel(Canvas& c, std::span<const Signal> signals, const Signal* highlight) {
  const double cx = c.width / 2, cy = 40 + (c.height - 50) / 2, r = (c.height - 70) / 2;
  auto draw = [&](const Signal& s, const std::string& col, double stroke, double opacity) {
    std::vector<std::pair<double, double>> pts;
    const double len = static_cast<double>(std::max<Eigen::Index>(s.rows() - 1, 1));
    for (Eigen::Index t = 0; t < s.rows(); ++t) {
      const double a = std::atan2(s(t, 1), s(t, 0));
      const double rad = r * (0.3 + 0.7 * t / len);
      pts.emplace_back(cx + rad * std::cos(a), cy - rad * std::sin(a));
    }
    c.polyline(pts, col, stroke, opacity);
  };
  for (size_t i = 0; i < signals.size(); ++i) draw(signals[i], color(i), 1.2, signals.size() > 8 ? 0.35 : 0.8);
  if (highlight) draw(*highlight, "#000000", 2.5, 1.0);
}

void coordinate_panels(Canvas& c, std::span<const Signal> signals, const Signal* highlight) {
  const Eigen::Index dims = std::min<Eigen::Index>(signals.front().cols(), 9);
  const double top = 40, left = 50, w = c.width - 70;
  const double ph = (c.height - top - 20) / static_cast<double>(dims);
  for (Eigen::Index d = 0; d < dims; ++d) {
    double lo = 1e300, hi = -1e300;
    auto scan = [&](const Signal& s) {
      lo = std::min(lo, s.col(d).minCoeff());
      hi = std::max(hi, s.col(d).maxCoeff());
    };
    for (const auto& s : signals) scan(s);
    if (highlight) scan(*highlight);
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double y0 = top + d * ph;
    c.rect(left, y0 + 4, w, ph - 8);
    c.text(4, y0 + ph / 2, "x" + std::to_string(d), 11);
    auto draw = [&](const Signal& s, const std::string& col, double stroke, double opacity) {
      std::vector<std::pair<double, double>> pts;
      const double len = static_cast<double>(std::max<Eigen::Index>(s.rows() - 1, 1));
      for (Eigen::Index t = 0; t < s.rows(); ++t) {
        pts.emplace_back(left + w * t / len, y0 + 4 + (ph - 8) * (1.0 - (s(t, d) - lo) / (hi - lo)));
      }
      c.polyline(pts, col, stroke, opacity);
    };
    for (size_t i = 0; i < signals.size(); ++i) draw(signals[i], color(i), 1.0, signals.size() > 8 ? 0.35 : 0.8);
    if (highlight) draw(*highlight, "#000000", 2.0, 1.0);
  }
}

}  // namespace

void plot_signals(const std::filesystem::path& path, const Manifold& m, std::span<const Signal> signals,
                  const std::string& title, const Signal* highlight) {
  if (signals.empty()) return;
  const bool polar = m.kind() == Manifold::Kind::kSphere && m.dim() == 1;
  const Eigen::Index panels = polar ? 1 : std::min<Eigen::Index>(signals.front().cols(), 9);
  Canvas c{640, polar ? 640.0 : 60.0 + 110.0 * static_cast<double>(panels), {}};
  c.text(10, 22, title, 15);
  if (polar) {
    polar_panel(c, signals, highlight);
  } else {
    coordinate_panels(c, signals, highlight);
  }
  c.save(path);
}

void plot_warps(const std::filesystem::path& path, const Mat& gamma, const std::string& title) {
  Canvas c{520, 520, {}};
  c.text(10, 22, title, 15);
  const double left = 40, top = 40, side = 460;
  c.rect(left, top, side, side);
  c.polyline({{left, top + side}, {left + side, top}}, "#999999", 0.8, 0.8);
  const double len = static_cast<double>(std::max<Eigen::Index>(gamma.rows() - 1, 1));
  for (Eigen::Index n = 0; n < gamma.cols(); ++n) {
    std::vector<std::pair<double, double>> pts;
    for (Eigen::Index z = 0; z < gamma.rows(); ++z) pts.emplace_back(left + side * z / len, top + side * (1.0 - gamma(z, n)));
    c.polyline(pts, color(static_cast<size_t>(n)), 1.2, gamma.cols() > 8 ? 0.4 : 0.9);
  }
  c.text(left + side / 2 - 10, top + side + 18, "z", 12);
  c.text(8, top + side / 2, "gamma", 12);
  c.save(path);
}

}  // namespace rtw::cli
