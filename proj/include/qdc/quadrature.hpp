#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include "qdc/errors.hpp"

// Adaptive one-dimensional quadrature built on the 15-point Kronrod
// extension of 7-point Gauss.  The embedded pair gives a per-panel error
// estimate; panels are bisected worst-first until the error budget is met.

namespace qdc::quad {

namespace detail {

// Kronrod-15 abscissae on [-1, 1] (positive half; even symmetry).
// Odd entries are the Gauss-7 points.
inline constexpr double kronrod_x[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};

inline constexpr double kronrod_w[8] = {
    0.02293532201052922, 0.06309209262997855, 0.1047900103222502,
    0.1406532597155259,  0.1690047266392679,  0.1903505780647854,
    0.2044329400752989,  0.2094821410847278};

// Gauss-7 weights, matching kronrod_x[1], [3], [5], [7].
inline constexpr double gauss_w[4] = {0.1294849661688697, 0.2797053914892767,
                                      0.3818300505051189, 0.4179591836734694};

}  // namespace detail

struct PanelResult {
  double value;    // Kronrod estimate of the integral
  double error;    // estimated absolute error
  double resabs;   // Kronrod estimate of integral of |f|
};

// One 15-point panel over [a, b] with a QUADPACK-style error estimate.
template <class F>
PanelResult panel(F&& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);

  double fv[15];
  for (int i = 0; i < 7; ++i) {
    const double dx = half * detail::kronrod_x[i];
    fv[i] = f(mid - dx);
    fv[14 - i] = f(mid + dx);
  }
  fv[7] = f(mid);

  double resk = 0.0, resg = 0.0, resabs = 0.0;
  for (int i = 0; i < 7; ++i) {
    const double s = fv[i] + fv[14 - i];
    resk += detail::kronrod_w[i] * s;
    resabs += detail::kronrod_w[i] * (std::abs(fv[i]) + std::abs(fv[14 - i]));
  }
  resk += detail::kronrod_w[7] * fv[7];
  resabs += detail::kronrod_w[7] * std::abs(fv[7]);
  for (int i = 0; i < 4; ++i) {
    const double s = (i < 3) ? fv[2 * i + 1] + fv[13 - 2 * i] : fv[7];
    resg += detail::gauss_w[i] * s;
  }

  const double mean = 0.5 * resk;
  double resasc = detail::kronrod_w[7] * std::abs(fv[7] - mean);
  for (int i = 0; i < 7; ++i) {
    resasc += detail::kronrod_w[i] *
              (std::abs(fv[i] - mean) + std::abs(fv[14 - i] - mean));
  }

  const double h = std::abs(half);
  resk *= half;
  resg *= half;
  resabs *= h;
  resasc *= h;

  double err = std::abs(resk - resg);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  const double eps = std::numeric_limits<double>::epsilon();
  const double tiny = std::numeric_limits<double>::min();
  if (resabs > tiny / (50.0 * eps)) {
    err = std::max(err, 50.0 * eps * resabs);
  }
  return {resk, err, resabs};
}

struct Result {
  double value = 0.0;
  double error = 0.0;      // estimated absolute error of `value`
  int evaluations = 0;     // number of integrand calls
  bool converged = false;  // error <= requested tolerance
};

// Integrate f over [a, b] to absolute tolerance abs_tol (and optionally
// relative tolerance rel_tol), bisecting the worst panel first.
template <class F>
Result integrate(F&& f, double a, double b, double abs_tol,
                 double rel_tol = 0.0, int max_panels = 4000) {
  struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
  };

  Result out;
  if (a == b) {
    out.converged = true;
    return out;
  }

  std::priority_queue<Panel> heap;
  PanelResult first = panel(f, a, b);
  out.evaluations = 15;
  heap.push({a, b, first.value, first.error});
  double total_value = first.value;
  double total_error = first.error;

  auto budget = [&] {
    return std::max(abs_tol, rel_tol * std::abs(total_value));
  };

  while (total_error > budget() &&
         static_cast<int>(heap.size()) < max_panels) {
    Panel worst = heap.top();
    // A panel too narrow to split means we've hit roundoff; give up on it.
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= std::min(worst.a, worst.b) || mid >= std::max(worst.a, worst.b)) {
      break;
    }
    heap.pop();
    PanelResult left = panel(f, worst.a, mid);
    PanelResult right = panel(f, mid, worst.b);
    out.evaluations += 30;
    total_value += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    heap.push({worst.a, mid, left.value, left.error});
    heap.push({mid, worst.b, right.value, right.error});
  }

  // Re-sum panel contributions in heap order for a stable final value.
  double value = 0.0, error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  out.value = value;
  out.error = error;
  out.converged = error <= std::max(abs_tol, rel_tol * std::abs(value));
  return out;
}

// Same, but failure to converge is an error condition.
template <class F>
double integrate_or_throw(F&& f, double a, double b, double abs_tol,
                          const char* what) {
  Result r = integrate(std::forward<F>(f), a, b, abs_tol);
  if (!r.converged) {
    throw tolerance_error(std::string(what) + ": quadrature did not reach "
                          "the requested tolerance",
                          r.error, abs_tol);
  }
  return r.value;
}

}  // namespace qdc::quad
