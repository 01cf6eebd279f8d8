#include "bandit/exact_dp.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <sstream>
#include <vector>

#include "bandit/errors.hpp"

namespace bandit {

namespace {

using Rational = boost::multiprecision::cpp_rational;

constexpr long long kMaxStates = 10'000'000;
constexpr int kMaxHorizon = 24;
constexpr int kMaxSupport = 4;

// C(n, k) with saturation well above kMaxStates (layer sizes stay exact).
std::vector<std::vector<std::uint64_t>> binomial_table(int rows) {
  std::vector<std::vector<std::uint64_t>> C(
      static_cast<size_t>(rows) + 1,
      std::vector<std::uint64_t>(static_cast<size_t>(rows) + 1, 0));
  for (int i = 0; i <= rows; ++i) {
    C[i][0] = 1;
    for (int j = 1; j <= i; ++j) {
      const std::uint64_t a = C[i - 1][j - 1];
      const std::uint64_t b = C[i - 1][j];
      C[i][j] = (a > (1ull << 62) - b) ? (1ull << 62) : a + b;
    }
  }
  return C;
}

struct SlotTable {
  std::vector<double> value;   // payoff of each outcome slot
  std::vector<double> prob;
  std::vector<int> arm_of;     // arm index of each slot
  std::vector<int> offset;     // first slot of each arm
  std::vector<int> width;      // support size of each arm
  int total = 0;
};

SlotTable build_slots(const ArmSet& set) {
  SlotTable t;
  for (int k = 0; k < set.size(); ++k) {
    const auto sz = set[k].distribution.support_size();
    if (!sz) {
      std::ostringstream os;
      os << "exact_value_dp: arm " << k << " ("
         << set[k].distribution.describe()
         << ") has no finite support";
      throw ConfigError(os.str());
    }
    if (*sz > kMaxSupport) {
      std::ostringstream os;
      os << "exact_value_dp: arm " << k << " support size " << *sz
         << " exceeds " << kMaxSupport;
      throw ConfigError(os.str());
    }
    t.offset.push_back(t.total);
    t.width.push_back(*sz);
    for (const auto& [v, p] : set[k].distribution.support()) {
      t.value.push_back(v);
      t.prob.push_back(p);
      t.arm_of.push_back(k);
      ++t.total;
    }
  }
  return t;
}

// Depth-first enumeration of compositions of `total` into `slots` parts.
template <class F>
void for_each_composition(int total, int slots, std::vector<int>& c, int pos,
                          int remaining, F&& f) {
  if (pos == slots - 1) {
    c[static_cast<size_t>(pos)] = remaining;
    f();
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    c[static_cast<size_t>(pos)] = v;
    for_each_composition(total, slots, c, pos + 1, remaining - v, f);
  }
}

// Numeric policies -----------------------------------------------------------

struct DoubleOps {
  using Num = double;
  const ArmSet& set;
  const UtilityIndex& u;
  const SlotTable& slots;
  int n;
  std::vector<double> prob;
  std::vector<double> mean_of_slot_arm;

  DoubleOps(const ArmSet& s, const UtilityIndex& util, const SlotTable& st,
            int horizon)
      : set(s), u(util), slots(st), n(horizon), prob(st.prob) {
    for (int j = 0; j < st.total; ++j)
      mean_of_slot_arm.push_back(s[st.arm_of[static_cast<size_t>(j)]].mean);
  }

  double terminal(const std::vector<int>& c) const {
    double sum = 0.0, dev = 0.0;
    for (int j = 0; j < slots.total; ++j) {
      const double cnt = c[static_cast<size_t>(j)];
      sum += cnt * slots.value[static_cast<size_t>(j)];
      dev += cnt * (slots.value[static_cast<size_t>(j)] -
                    mean_of_slot_arm[static_cast<size_t>(j)]);
    }
    return u(sum / n, dev / std::sqrt(static_cast<double>(n)));
  }

  static double to_double(double v) { return v; }
};

// Rational arithmetic for the kinds whose index is rational in the tallies.
struct RationalOps {
  using Num = Rational;
  const SlotTable& slots;
  UtilityKind kind;
  Rational alpha;
  int n;
  std::vector<Rational> prob;
  std::vector<Rational> value;
  std::vector<Rational> mean_of_slot_arm;

  RationalOps(const ArmSet& s, const UtilityIndex& util, const SlotTable& st,
              int horizon)
      : slots(st), kind(util.kind()), alpha(util.alpha()), n(horizon) {
    for (int j = 0; j < st.total; ++j) {
      prob.emplace_back(st.prob[static_cast<size_t>(j)]);
      value.emplace_back(st.value[static_cast<size_t>(j)]);
    }
    // Exact per-arm means recomputed from the support.
    std::vector<Rational> arm_mean(s.arms.size(), Rational(0));
    for (int j = 0; j < st.total; ++j)
      arm_mean[static_cast<size_t>(st.arm_of[static_cast<size_t>(j)])] +=
          prob[static_cast<size_t>(j)] * value[static_cast<size_t>(j)];
    for (int j = 0; j < st.total; ++j)
      mean_of_slot_arm.push_back(
          arm_mean[static_cast<size_t>(st.arm_of[static_cast<size_t>(j)])]);
  }

  Rational terminal(const std::vector<int>& c) const {
    Rational sum(0), dev(0);
    for (int j = 0; j < slots.total; ++j) {
      const int cnt = c[static_cast<size_t>(j)];
      if (cnt == 0) continue;
      sum += cnt * value[static_cast<size_t>(j)];
      dev += cnt * (value[static_cast<size_t>(j)] -
                    mean_of_slot_arm[static_cast<size_t>(j)]);
    }
    Rational x = sum / n;
    switch (kind) {
      case UtilityKind::MeanVariance:
        return x - alpha * dev * dev / n;
      case UtilityKind::MeanSemivariance:
        return dev < 0 ? Rational(x - alpha * dev * dev / n) : x;
      case UtilityKind::Shortfall:
        return dev < 0 ? Rational(x - alpha) : x;
      default:
        throw NumericalError("exact_value_dp: unexpected rational kind");
    }
  }

  static double to_double(const Rational& v) {
    return v.convert_to<double>();
  }
};

template <class Ops>
DpResult run_dp(const ArmSet& set, const SlotTable& slots, int n, Ops ops,
                bool exact) {
  using Num = typename Ops::Num;
  const int S = slots.total;
  const auto C = binomial_table(n + S + 1);

  auto layer_size = [&](int m) -> std::uint64_t {
    return C[static_cast<size_t>(m + S - 1)][static_cast<size_t>(S - 1)];
  };

  // rank of a composition: colex rank of its bar-position subset.
  std::vector<int> comp(static_cast<size_t>(S));
  std::vector<std::uint64_t> pre(static_cast<size_t>(S) + 1);
  std::vector<std::uint64_t> suf(static_cast<size_t>(S) + 1);

  // Fills pre/suf for `comp`: pre[s] ranks bars below slot s as-is, suf[s]
  // ranks bars at/above slot s shifted by one (successor after adding a pull
  // in slot s has rank pre[s] + suf[s]; the state itself is pre[S]).
  auto fill_ranks = [&]() {
    int partial = 0;
    pre[0] = 0;
    for (int t = 0; t < S - 1; ++t) {
      partial += comp[static_cast<size_t>(t)];
      const int a = partial + t;
      pre[static_cast<size_t>(t) + 1] =
          pre[static_cast<size_t>(t)] +
          C[static_cast<size_t>(a)][static_cast<size_t>(t) + 1];
    }
    pre[static_cast<size_t>(S)] = pre[static_cast<size_t>(S) - 1];
    suf[static_cast<size_t>(S)] = 0;
    suf[static_cast<size_t>(S) - 1] = 0;
    partial = 0;
    for (int t = 0; t < S - 1; ++t) partial += comp[static_cast<size_t>(t)];
    for (int t = S - 2; t >= 0; --t) {
      const int a = partial + t;
      suf[static_cast<size_t>(t)] =
          suf[static_cast<size_t>(t) + 1] +
          C[static_cast<size_t>(a) + 1][static_cast<size_t>(t) + 1];
      partial -= comp[static_cast<size_t>(t)];
    }
  };

  std::vector<Num> next(static_cast<size_t>(layer_size(n)));
  for_each_composition(n, S, comp, 0, n, [&]() {
    fill_ranks();
    next[static_cast<size_t>(pre[static_cast<size_t>(S)])] =
        ops.terminal(comp);
  });

  std::vector<Num> cur;
  int first_arm = 0;
  for (int m = n - 1; m >= 0; --m) {
    cur.assign(static_cast<size_t>(layer_size(m)), Num(0));
    for_each_composition(m, S, comp, 0, m, [&]() {
      fill_ranks();
      Num best(0);
      int best_arm = -1;
      for (int k = 0; k < set.size(); ++k) {
        Num acc(0);
        for (int j = 0; j < slots.width[static_cast<size_t>(k)]; ++j) {
          const int slot = slots.offset[static_cast<size_t>(k)] + j;
          const std::uint64_t succ = pre[static_cast<size_t>(slot)] +
                                     suf[static_cast<size_t>(slot)];
          acc += ops.prob[static_cast<size_t>(slot)] *
                 next[static_cast<size_t>(succ)];
        }
        if (best_arm < 0 || acc > best) {
          best = acc;
          best_arm = k;
        }
      }
      cur[static_cast<size_t>(pre[static_cast<size_t>(S)])] = best;
      if (m == 0) first_arm = best_arm;
    });
    next.swap(cur);
  }

  DpResult res;
  res.value = Ops::to_double(next[0]);
  res.first_arm = first_arm;
  res.exact = exact;
  return res;
}

}  // namespace

DpResult exact_value_dp(const ArmSet& set, const UtilityIndex& u, int n) {
  if (set.arms.empty()) throw ConfigError("exact_value_dp: empty arm set");
  if (n < 1) throw ConfigError("exact_value_dp: horizon must be >= 1");
  if (n > kMaxHorizon) {
    std::ostringstream os;
    os << "exact_value_dp: horizon " << n << " exceeds cap " << kMaxHorizon;
    throw ConfigError(os.str());
  }
  const SlotTable slots = build_slots(set);
  const int S = slots.total;

  // Total states C(n+S, S), computed with early bailout.
  double states = 1.0;
  for (int i = 1; i <= S; ++i)
    states *= static_cast<double>(n + i) / static_cast<double>(i);
  if (states > static_cast<double>(kMaxStates)) {
    std::ostringstream os;
    os << "exact_value_dp: state space ~" << static_cast<long long>(states)
       << " exceeds bound " << kMaxStates;
    throw ResourceError(os.str());
  }

  const bool rational_kind = u.kind() == UtilityKind::MeanVariance ||
                             u.kind() == UtilityKind::MeanSemivariance ||
                             (u.kind() == UtilityKind::Shortfall &&
                              u.smoothing_width() == 0.0);
  if (rational_kind)
    return run_dp(set, slots, n, RationalOps(set, u, slots, n), true);
  return run_dp(set, slots, n, DoubleOps(set, u, slots, n), false);
}

}  // namespace bandit
