#include "bandit/distributions.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "bandit/errors.hpp"

namespace bandit {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v))
    throw ConfigError(std::string("distribution parameter not finite: ") + what);
}

}  // namespace

PayoffDistribution::PayoffDistribution(Spec s) : spec_(std::move(s)) {
  if (const auto* d = std::get_if<DiscreteFinite>(&spec_)) {
    cdf_.resize(d->probs.size());
    std::partial_sum(d->probs.begin(), d->probs.end(), cdf_.begin());
  }
}

PayoffDistribution PayoffDistribution::two_point(double lo, double hi,
                                                 double p_hi) {
  require_finite(lo, "lo");
  require_finite(hi, "hi");
  require_finite(p_hi, "p_hi");
  require(lo <= hi, "two_point: requires lo <= hi");
  require(p_hi >= 0.0 && p_hi <= 1.0, "two_point: requires 0 <= p_hi <= 1");
  return PayoffDistribution(TwoPoint{lo, hi, p_hi});
}

PayoffDistribution PayoffDistribution::discrete_finite(
    std::vector<double> values, std::vector<double> probs) {
  require(!values.empty(), "discrete_finite: empty support");
  require(values.size() == probs.size(),
          "discrete_finite: values and probs differ in length");
  double total = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    require_finite(values[i], "values[i]");
    require_finite(probs[i], "probs[i]");
    require(probs[i] >= 0.0, "discrete_finite: requires probs[i] >= 0");
    total += probs[i];
  }
  require(std::fabs(total - 1.0) <= 1e-12,
          "discrete_finite: probs must sum to 1 (within 1e-12)");
  return PayoffDistribution(DiscreteFinite{std::move(values), std::move(probs)});
}

PayoffDistribution PayoffDistribution::normal(double mu, double sigma2) {
  require_finite(mu, "mu");
  require_finite(sigma2, "sigma2");
  require(sigma2 >= 0.0, "normal: requires sigma2 >= 0");
  return PayoffDistribution(Normal{mu, sigma2});
}

PayoffDistribution PayoffDistribution::uniform(double a, double b) {
  require_finite(a, "a");
  require_finite(b, "b");
  require(a <= b, "uniform: requires a <= b");
  return PayoffDistribution(Uniform{a, b});
}

PayoffDistribution PayoffDistribution::constant(double c) {
  require_finite(c, "c");
  return PayoffDistribution(Constant{c});
}

double PayoffDistribution::mean() const {
  return visit([](const auto& d) -> double {
    using T = std::decay_t<decltype(d)>;
    if constexpr (std::is_same_v<T, TwoPoint>) {
      return d.lo + d.p_hi * (d.hi - d.lo);
    } else if constexpr (std::is_same_v<T, DiscreteFinite>) {
      double m = 0.0;
      for (size_t i = 0; i < d.values.size(); ++i) m += d.probs[i] * d.values[i];
      return m;
    } else if constexpr (std::is_same_v<T, Normal>) {
      return d.mu;
    } else if constexpr (std::is_same_v<T, Uniform>) {
      return 0.5 * (d.a + d.b);
    } else {
      return d.c;
    }
  });
}

double PayoffDistribution::variance() const {
  return visit([](const auto& d) -> double {
    using T = std::decay_t<decltype(d)>;
    if constexpr (std::is_same_v<T, TwoPoint>) {
      const double w = d.hi - d.lo;
      return d.p_hi * (1.0 - d.p_hi) * w * w;
    } else if constexpr (std::is_same_v<T, DiscreteFinite>) {
      double m = 0.0;
      for (size_t i = 0; i < d.values.size(); ++i) m += d.probs[i] * d.values[i];
      double v = 0.0;
      for (size_t i = 0; i < d.values.size(); ++i) {
        const double dv = d.values[i] - m;
        v += d.probs[i] * dv * dv;
      }
      return v;
    } else if constexpr (std::is_same_v<T, Normal>) {
      return d.sigma2;
    } else if constexpr (std::is_same_v<T, Uniform>) {
      const double w = d.b - d.a;
      return w * w / 12.0;
    } else {
      return 0.0;
    }
  });
}

double PayoffDistribution::sample(RngStream& rng) const {
  if (const auto* t = std::get_if<TwoPoint>(&spec_)) {
    return rng.next_uniform() < 1.0 - t->p_hi ? t->lo : t->hi;
  }
  if (const auto* d = std::get_if<DiscreteFinite>(&spec_)) {
    const double u = rng.next_uniform();
    for (size_t i = 0; i + 1 < cdf_.size(); ++i)
      if (u < cdf_[i]) return d->values[i];
    return d->values.back();
  }
  if (const auto* n = std::get_if<Normal>(&spec_)) {
    return n->mu + std::sqrt(n->sigma2) * rng.next_normal();
  }
  if (const auto* u = std::get_if<Uniform>(&spec_)) {
    return u->a + (u->b - u->a) * rng.next_uniform();
  }
  return std::get<Constant>(spec_).c;
}

std::optional<int> PayoffDistribution::support_size() const {
  if (std::holds_alternative<TwoPoint>(spec_)) return 2;
  if (const auto* d = std::get_if<DiscreteFinite>(&spec_))
    return static_cast<int>(d->values.size());
  if (std::holds_alternative<Constant>(spec_)) return 1;
  return std::nullopt;
}

std::vector<std::pair<double, double>> PayoffDistribution::support() const {
  if (const auto* t = std::get_if<TwoPoint>(&spec_))
    return {{t->lo, 1.0 - t->p_hi}, {t->hi, t->p_hi}};
  if (const auto* d = std::get_if<DiscreteFinite>(&spec_)) {
    std::vector<std::pair<double, double>> out;
    for (size_t i = 0; i < d->values.size(); ++i)
      out.emplace_back(d->values[i], d->probs[i]);
    return out;
  }
  if (const auto* c = std::get_if<Constant>(&spec_)) return {{c->c, 1.0}};
  throw ConfigError("support(): distribution has no finite support");
}

std::string PayoffDistribution::describe() const {
  std::ostringstream os;
  visit([&](const auto& d) {
    using T = std::decay_t<decltype(d)>;
    if constexpr (std::is_same_v<T, TwoPoint>) {
      os << "two_point(" << d.lo << "," << d.hi << ";p=" << d.p_hi << ")";
    } else if constexpr (std::is_same_v<T, DiscreteFinite>) {
      os << "discrete(k=" << d.values.size() << ")";
    } else if constexpr (std::is_same_v<T, Normal>) {
      os << "normal(" << d.mu << "," << d.sigma2 << ")";
    } else if constexpr (std::is_same_v<T, Uniform>) {
      os << "uniform(" << d.a << "," << d.b << ")";
    } else {
      os << "constant(" << d.c << ")";
    }
  });
  return os.str();
}

}  // namespace bandit
