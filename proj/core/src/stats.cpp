#include "rtw/stats.hpp"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/beta.hpp>

#include "rtw/error.hpp"

namespace rtw {

double student_t_two_sided_p(double t, double df) {
  if (std::isinf(t)) return 0.0;
  const double x = df / (df + t * t);
  return boost::math::ibeta(df / 2.0, 0.5, x);
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b, double alpha) {
  if (a.size() != b.size()) throw Error(ErrorCode::kShapeMismatch, "paired t-test needs equal lengths");
  if (a.size() < 2) throw Error(ErrorCode::kBadConfig, "paired t-test needs at least two pairs");
  const auto n = static_cast<double>(a.size());
  double mean = 0.0;
  for (size_t i = 0; i < a.size(); ++i) mean += a[i] - b[i];
  mean /= n;
  double ss = 0.0;
  bool all_equal = true;
  const double d0 = a[0] - b[0];
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    ss += (d - mean) * (d - mean);
    if (d != d0) all_equal = false;
  }
  TTestResult r;
  r.df = static_cast<int>(a.size()) - 1;
  r.direction = mean > 0.0 ? 1 : (mean < 0.0 ? -1 : 0);
  if (all_equal) {
    r.degenerate = true;
    if (d0 == 0.0) {
      r.t = 0.0;
      r.p = 1.0;
    } else {
      r.t = d0 > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
      r.p = 0.0;
    }
    r.significant = r.p < alpha;
    return r;
  }
  const double sd = std::sqrt(ss / (n - 1.0));
  r.t = mean / (sd / std::sqrt(n));
  r.p = student_t_two_sided_p(r.t, r.df);
  r.significant = r.p < alpha;
  return r;
}

}  // namespace rtw
