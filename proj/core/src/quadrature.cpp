#include "welfare_order/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "welfare_order/errors.hpp"

namespace welfare_order {
namespace {

// Kronrod nodes on [0, 1] (symmetric), from QUADPACK qk15.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes.
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  int depth;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gauss_kronrod(const std::function<double(double)>& f, double a,
                      double b, int depth) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * pair;
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss), depth};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double tol,
                                    std::span<const double> breakpoints,
                                    const QuadratureOptions& options) {
  QuadratureResult result;
  if (a == b) return result;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }

  std::vector<double> cuts{a};
  for (double p : breakpoints) {
    if (p > a && p < b) cuts.push_back(p);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<Segment> queue;
  double total = 0.0;
  double total_error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Segment s = gauss_kronrod(f, cuts[i], cuts[i + 1], 0);
    result.evaluations += 15;
    total += s.value;
    total_error += s.error;
    queue.push(s);
  }

  while (total_error > tol) {
    Segment worst = queue.top();
    if (worst.depth >= options.max_depth ||
        static_cast<int>(queue.size()) >= options.max_intervals) {
      throw QuadratureError(
          "adaptive quadrature did not reach tolerance " + std::to_string(tol) +
              " (error estimate " + std::to_string(total_error) + ")",
          sign * total, total_error);
    }
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Segment left = gauss_kronrod(f, worst.a, mid, worst.depth + 1);
    Segment right = gauss_kronrod(f, mid, worst.b, worst.depth + 1);
    result.evaluations += 30;
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
  }

  // Re-sum from the final partition to shed the running-update drift.
  total = 0.0;
  total_error = 0.0;
  result.intervals = static_cast<int>(queue.size());
  std::vector<Segment> parts;
  parts.reserve(queue.size());
  while (!queue.empty()) {
    parts.push_back(queue.top());
    queue.pop();
  }
  std::sort(parts.begin(), parts.end(),
            [](const Segment& x, const Segment& y) { return x.a < y.a; });
  for (const Segment& s : parts) {
    total += s.value;
    total_error += s.error;
  }
  result.value = sign * total;
  result.error = total_error;
  return result;
}

double quadrature(const std::function<double(double)>& f, double a, double b,
                  double tol, std::span<const double> breakpoints) {
  return integrate_adaptive(f, a, b, tol, breakpoints).value;
}

}  // namespace welfare_order
