#pragma once

#include <span>

namespace rtw {

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  int df = 0;
  bool significant = false;
  int direction = 0;        // sign of mean(a - b)
  bool degenerate = false;  // all differences equal
};

// Two-sided paired Student t-test on a - b. When all differences are equal
// the result is flagged degenerate: p = 1 if they are zero, else p = 0 and
// t = +-inf.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b, double alpha = 0.05);

// Two-sided p-value of a Student t statistic with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

}  // namespace rtw
