#include "bandit/arms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bandit/errors.hpp"

namespace bandit {

Arm Arm::make(int id, PayoffDistribution dist) {
  Arm a{id, std::move(dist)};
  a.mean = a.distribution.mean();
  a.variance = a.distribution.variance();
  return a;
}

ArmSet compute_bounds(std::vector<Arm> arms) {
  if (arms.empty()) throw ConfigError("compute_bounds: empty arm list");
  ArmSet set;
  set.arms = std::move(arms);
  set.mu_max = set.mu_min = set.arms[0].mean;
  set.var_max = set.var_min = set.arms[0].variance;
  std::vector<std::pair<double, double>> pts;
  pts.reserve(set.arms.size());
  for (const Arm& a : set.arms) {
    set.mu_max = std::max(set.mu_max, a.mean);
    set.mu_min = std::min(set.mu_min, a.mean);
    set.var_max = std::max(set.var_max, a.variance);
    set.var_min = std::min(set.var_min, a.variance);
    pts.emplace_back(a.mean, a.variance);
  }
  set.extreme = extreme_points(pts);
  return set;
}

namespace {

constexpr double kCrossTol = 1e-12;

double cross(const std::pair<double, double>& o,
             const std::pair<double, double>& a,
             const std::pair<double, double>& b) {
  return (a.first - o.first) * (b.second - o.second) -
         (a.second - o.second) * (b.first - o.first);
}

}  // namespace

std::vector<int> extreme_points(
    const std::vector<std::pair<double, double>>& points) {
  if (points.empty()) throw ConfigError("extreme_points: empty point list");
  const int n = static_cast<int>(points.size());

  // Sort indices by coordinates, keep lowest index among exact duplicates.
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int i, int j) {
    if (points[i] != points[j]) return points[i] < points[j];
    return i < j;
  });
  std::vector<int> uniq;
  for (int i : idx)
    if (uniq.empty() || points[uniq.back()] != points[i]) uniq.push_back(i);

  if (uniq.size() == 1) return uniq;
  if (uniq.size() == 2) {
    std::sort(uniq.begin(), uniq.end());
    return uniq;
  }

  // Andrew's monotone chain, strict turns only (collinear points dropped).
  auto build = [&](auto begin, auto end) {
    std::vector<int> h;
    for (auto it = begin; it != end; ++it) {
      while (h.size() >= 2 &&
             cross(points[h[h.size() - 2]], points[h.back()], points[*it]) <=
                 kCrossTol)
        h.pop_back();
      h.push_back(*it);
    }
    return h;
  };
  std::vector<int> lower = build(uniq.begin(), uniq.end());
  std::vector<int> upper = build(uniq.rbegin(), uniq.rend());

  std::vector<int> hull(lower.begin(), lower.end() - 1);
  hull.insert(hull.end(), upper.begin(), upper.end() - 1);
  std::sort(hull.begin(), hull.end());
  hull.erase(std::unique(hull.begin(), hull.end()), hull.end());
  return hull;
}

GDriverResult g_driver(const ArmSet& set, double p, double q,
                       bool restrict_to_extreme) {
  if (set.arms.empty()) throw ConfigError("g_driver: empty arm set");
  if (!std::isfinite(p) || !std::isfinite(q))
    throw ConfigError("g_driver: non-finite gradient arguments");
  GDriverResult best;
  bool first = true;
  auto consider = [&](int k) {
    const Arm& a = set.arms[k];
    const double v = a.mean * p + 0.5 * a.variance * q;
    if (first || v > best.value) {
      best.value = v;
      best.argmax = k;
      first = false;
    }
  };
  if (restrict_to_extreme) {
    for (int k : set.extreme) consider(k);
  } else {
    for (int k = 0; k < set.size(); ++k) consider(k);
  }
  return best;
}

Thresholds thresholds(double mu1, double sigma1, double mu2, double sigma2) {
  auto fail = [](const char* ineq) {
    std::ostringstream os;
    os << "thresholds: ordering violated, requires " << ineq;
    throw ConfigError(os.str());
  };
  if (!(mu1 > mu2)) fail("mu1 > mu2");
  if (!(sigma2 > 0.0)) fail("sigma2 > 0");
  if (!(sigma1 > sigma2)) fail("sigma1 > sigma2");
  Thresholds t;
  const double dmu = mu1 - mu2;
  t.ratio = dmu / (sigma1 * sigma1 - sigma2 * sigma2);
  t.alpha_low = 2.0 * dmu / ((sigma1 + 2.0 * sigma2) * (sigma1 - sigma2));
  t.alpha_high = 2.0 * dmu / (sigma2 * (sigma1 - sigma2));
  t.alpha_low_prime = 2.0 * dmu * sigma1 / (sigma1 - sigma2);
  return t;
}

Thresholds thresholds(const Arm& arm1, const Arm& arm2) {
  return thresholds(arm1.mean, std::sqrt(arm1.variance), arm2.mean,
                    std::sqrt(arm2.variance));
}

}  // namespace bandit
