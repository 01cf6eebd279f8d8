#include "bandit/utility.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bandit/errors.hpp"
#include "bandit/quadrature.hpp"
#include "bandit/rng.hpp"

namespace bandit {

// ---------------------------------------------------------------------------
// Phi

Phi Phi::identity() {
  Phi p;
  p.kind_ = Kind::Identity;
  return p;
}

Phi Phi::exp_neg() {
  Phi p;
  p.kind_ = Kind::ExpNeg;
  return p;
}

Phi Phi::neg_quadratic_around(double c) {
  if (!std::isfinite(c))
    throw ConfigError("phi neg-quadratic-around: center not finite");
  Phi p;
  p.kind_ = Kind::NegQuadraticAround;
  p.center_ = c;
  return p;
}

Phi Phi::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) throw ConfigError("phi polynomial: no coefficients");
  for (double c : coeffs)
    if (!std::isfinite(c))
      throw ConfigError("phi polynomial: coefficient not finite");
  Phi p;
  p.kind_ = Kind::Polynomial;
  p.coeffs_ = std::move(coeffs);
  return p;
}

Phi Phi::callable(std::function<double(double)> f, std::string label) {
  if (!f) throw ConfigError("phi callable: empty function");
  Phi p;
  p.kind_ = Kind::Callable;
  p.fn_ = std::move(f);
  p.label_ = std::move(label);
  return p;
}

double Phi::operator()(double z) const {
  switch (kind_) {
    case Kind::Identity:
      return z;
    case Kind::ExpNeg:
      return -std::exp(-z);
    case Kind::NegQuadraticAround: {
      const double d = z - center_;
      return -d * d;
    }
    case Kind::Polynomial: {
      double acc = 0.0;
      for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
        acc = acc * z + *it;
      return acc;
    }
    case Kind::Callable:
      return fn_(z);
  }
  return 0.0;
}

std::string Phi::describe() const {
  switch (kind_) {
    case Kind::Identity:
      return "identity";
    case Kind::ExpNeg:
      return "exp(-x)";
    case Kind::NegQuadraticAround: {
      std::ostringstream os;
      os << "neg-quadratic-around(" << center_ << ")";
      return os.str();
    }
    case Kind::Polynomial: {
      std::ostringstream os;
      os << "poly[";
      for (size_t i = 0; i < coeffs_.size(); ++i)
        os << (i ? "," : "") << coeffs_[i];
      os << "]";
      return os.str();
    }
    case Kind::Callable:
      return label_;
  }
  return "";
}

// ---------------------------------------------------------------------------
// UtilityIndex

namespace {

// Polynomial growth facts for phi: |phi(z)| <= c (1 + |z|^d); d < 0 when no
// polynomial bound exists.
struct PhiGrowth {
  double c = 1.0;
  int degree = 1;
  bool bounded = true;
};

PhiGrowth phi_growth(const Phi& phi) {
  switch (phi.kind()) {
    case Phi::Kind::Identity:
      return {1.0, 1, true};
    case Phi::Kind::ExpNeg:
      return {0.0, 0, false};
    case Phi::Kind::NegQuadraticAround: {
      const double c0 = std::fabs(phi.center());
      return {2.0 * (1.0 + c0 * c0), 2, true};
    }
    case Phi::Kind::Polynomial: {
      double s = 0.0;
      for (double c : phi.coeffs()) s += std::fabs(c);
      return {s, std::max<int>(1, static_cast<int>(phi.coeffs().size())) - 1,
              true};
    }
    case Phi::Kind::Callable:
      return {0.0, 0, false};
  }
  return {0.0, 0, false};
}

}  // namespace

UtilityIndex UtilityIndex::additive(Phi phi, double alpha) {
  if (!std::isfinite(alpha)) throw ConfigError("additive index: alpha not finite");
  UtilityIndex u;
  u.kind_ = UtilityKind::Additive;
  u.alpha_ = alpha;
  u.phi_ = std::move(phi);
  const PhiGrowth g = phi_growth(u.phi_);
  if (g.bounded) {
    u.has_growth_ = true;
    u.growth_g_ = std::max(2, g.degree + 1);
    u.growth_c_ = g.c + std::fabs(alpha) + 1.0;
  }
  return u;
}

UtilityIndex UtilityIndex::blend(Phi phi, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw ConfigError("blend index: requires 0 < alpha <= 1");
  UtilityIndex u;
  u.kind_ = UtilityKind::Blend;
  u.alpha_ = alpha;
  u.phi_ = std::move(phi);
  const PhiGrowth g = phi_growth(u.phi_);
  if (g.bounded) {
    u.has_growth_ = true;
    u.growth_g_ = std::max(2, g.degree + 1);
    u.growth_c_ = g.c + 1.0;
  }
  return u;
}

UtilityIndex UtilityIndex::mean_variance(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw ConfigError("mean-variance index: requires alpha >= 0");
  UtilityIndex u;
  u.kind_ = UtilityKind::MeanVariance;
  u.alpha_ = alpha;
  u.has_growth_ = true;
  u.growth_c_ = 1.0 + alpha;
  u.growth_g_ = 3.0;
  return u;
}

UtilityIndex UtilityIndex::mean_semivariance(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw ConfigError("mean-semivariance index: requires alpha >= 0");
  UtilityIndex u;
  u.kind_ = UtilityKind::MeanSemivariance;
  u.alpha_ = alpha;
  u.has_growth_ = true;
  u.growth_c_ = 1.0 + alpha;
  u.growth_g_ = 3.0;
  return u;
}

UtilityIndex UtilityIndex::shortfall(double alpha, double delta) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw ConfigError("shortfall index: requires alpha >= 0");
  if (!(delta >= 0.0) || !std::isfinite(delta))
    throw ConfigError("shortfall index: requires delta >= 0");
  UtilityIndex u;
  u.kind_ = UtilityKind::Shortfall;
  u.alpha_ = alpha;
  u.delta_ = delta;
  u.has_growth_ = true;
  u.growth_c_ = 1.0 + alpha;
  u.growth_g_ = 2.0;
  return u;
}

UtilityIndex UtilityIndex::custom(std::function<double(double, double)> fn,
                                  double growth_constant,
                                  double growth_exponent, std::string label) {
  if (!fn) throw ConfigError("custom index: empty function");
  if (!(growth_exponent >= 1.0))
    throw ConfigError("custom index: requires growth exponent >= 1");
  UtilityIndex u;
  u.kind_ = UtilityKind::Custom;
  u.custom_ = std::move(fn);
  u.label_ = std::move(label);
  u.has_growth_ = true;
  u.growth_c_ = growth_constant;
  u.growth_g_ = growth_exponent;
  return u;
}

UtilityIndex UtilityIndex::with_smoothing(double delta) const {
  if (kind_ != UtilityKind::Shortfall)
    throw ConfigError("with_smoothing: only the shortfall kind is smoothed");
  return shortfall(alpha_, delta);
}

double UtilityIndex::operator()(double x, double y) const {
  if (!std::isfinite(x) || !std::isfinite(y))
    throw ConfigError("utility index: non-finite input");
  switch (kind_) {
    case UtilityKind::Additive:
      return phi_(x) + alpha_ * y;
    case UtilityKind::Blend:
      return phi_((1.0 - alpha_) * x + alpha_ * y);
    case UtilityKind::MeanVariance:
      return x - alpha_ * y * y;
    case UtilityKind::MeanSemivariance:
      return y < 0.0 ? x - alpha_ * y * y : x;
    case UtilityKind::Shortfall:
      if (delta_ > 0.0)
        return x - alpha_ * std::clamp(-y / delta_, 0.0, 1.0);
      return y < 0.0 ? x - alpha_ : x;
    case UtilityKind::Custom:
      return custom_(x, y);
  }
  return 0.0;
}

double eval_index(const UtilityIndex& u, double x, double y) { return u(x, y); }

std::string UtilityIndex::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case UtilityKind::Additive:
      os << "additive(phi=" << phi_.describe() << ",alpha=" << alpha_ << ")";
      break;
    case UtilityKind::Blend:
      os << "blend(phi=" << phi_.describe() << ",alpha=" << alpha_ << ")";
      break;
    case UtilityKind::MeanVariance:
      os << "mean-variance(alpha=" << alpha_ << ")";
      break;
    case UtilityKind::MeanSemivariance:
      os << "mean-semivariance(alpha=" << alpha_ << ")";
      break;
    case UtilityKind::Shortfall:
      os << "shortfall(alpha=" << alpha_ << ",delta=" << delta_ << ")";
      break;
    case UtilityKind::Custom:
      os << label_;
      break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Horizon averages and limits

double finite_horizon_utility(const UtilityIndex& u,
                              const std::vector<TrajectoryStatistics>& stats) {
  if (stats.empty())
    throw ConfigError("finite_horizon_utility: empty trajectory batch");
  const long long n = stats.front().n;
  double acc = 0.0;
  for (const TrajectoryStatistics& s : stats) {
    if (s.n != n)
      throw ConfigError("finite_horizon_utility: mixed horizons in batch");
    acc += u(s.sample_mean, s.scaled_deviation);
  }
  return acc / static_cast<double>(stats.size());
}

double single_arm_limit(const UtilityIndex& u, double mu, double sigma2,
                        int quadrature_order) {
  if (!std::isfinite(mu) || !(sigma2 >= 0.0))
    throw ConfigError("single_arm_limit: invalid moments");
  if (sigma2 == 0.0) return u(mu, 0.0);
  switch (u.kind()) {
    case UtilityKind::MeanVariance:
      return mu - u.alpha() * sigma2;
    case UtilityKind::MeanSemivariance:
      return mu - 0.5 * u.alpha() * sigma2;
    case UtilityKind::Shortfall: {
      const double delta = u.smoothing_width();
      if (delta == 0.0) return mu - 0.5 * u.alpha();
      // E clamp(-Y/delta, 0, 1) for Y ~ N(0, sigma2), integrating the ramp.
      const double s = std::sqrt(sigma2);
      const double ramp =
          normal_cdf(-delta / s) +
          s / (delta * std::sqrt(2.0 * M_PI)) *
              (1.0 - std::exp(-delta * delta / (2.0 * sigma2)));
      return mu - u.alpha() * ramp;
    }
    default:
      return gauss_hermite_expectation(
          [&](double y) { return u(mu, y); }, 0.0, sigma2, quadrature_order);
  }
}

// ---------------------------------------------------------------------------
// Specialization certificate

namespace {

SpecializationCertificate constant_condition(double c_min, double c_max,
                                             std::optional<double> ratio) {
  // AAi(arm1) ranges over [c_min, c_max] up to a positive factor; the
  // reversed condition negates the range.
  SpecializationCertificate cert;
  cert.analytic = true;
  cert.ratio_bound = ratio;
  cert.holds_for_arm1 = c_min >= 0.0 ? CertVerdict::Yes : CertVerdict::No;
  cert.holds_for_arm2 = c_max <= 0.0 ? CertVerdict::Yes : CertVerdict::No;
  if (cert.holds_for_arm1 == CertVerdict::No)
    cert.witness1 = std::make_pair(0.0, c_min < c_max ? -1.0 : 1.0);
  if (cert.holds_for_arm2 == CertVerdict::No)
    cert.witness2 = std::make_pair(0.0, c_max > c_min ? -1.0 : 1.0);
  return cert;
}

}  // namespace

SpecializationCertificate specialization_certificate(
    const UtilityIndex& u, const Arm& arm1, const Arm& arm2,
    const CertificateGrid& grid) {
  const double dmu = arm1.mean - arm2.mean;
  const double dvar = arm1.variance - arm2.variance;

  switch (u.kind()) {
    case UtilityKind::MeanVariance: {
      const double c = dmu - u.alpha() * dvar;
      return constant_condition(c, c, u.alpha());
    }
    case UtilityKind::MeanSemivariance: {
      // d_yy u is -2 alpha for y < 0 and 0 for y > 0.
      const double neg = dmu - u.alpha() * dvar;
      const double pos = dmu;
      SpecializationCertificate cert;
      cert.analytic = true;
      cert.ratio_bound = u.alpha();
      cert.holds_for_arm1 =
          std::min(neg, pos) >= 0.0 ? CertVerdict::Yes : CertVerdict::No;
      cert.holds_for_arm2 =
          std::max(neg, pos) <= 0.0 ? CertVerdict::Yes : CertVerdict::No;
      if (cert.holds_for_arm1 == CertVerdict::No)
        cert.witness1 = std::make_pair(0.0, neg < pos ? -1.0 : 1.0);
      if (cert.holds_for_arm2 == CertVerdict::No)
        cert.witness2 = std::make_pair(0.0, neg > pos ? -1.0 : 1.0);
      return cert;
    }
    case UtilityKind::Blend:
      if (u.phi().kind() == Phi::Kind::ExpNeg) {
        const double a = u.alpha();
        const double c = (1.0 - a) * dmu - 0.5 * a * a * dvar;
        std::optional<double> ratio;
        if (a < 1.0) ratio = a * a / (2.0 * (1.0 - a));
        return constant_condition(c, c, ratio);
      }
      break;
    case UtilityKind::Additive:
      if (u.phi().kind() == Phi::Kind::Identity) {
        // d_x u = 1, d_yy u = 0.
        return constant_condition(dmu, dmu, 0.0);
      }
      break;
    case UtilityKind::Shortfall:
      if (u.smoothing_width() == 0.0)
        throw ConfigError(
            "specialization_certificate: shortfall index requires delta > 0 "
            "(not twice differentiable)");
      break;
    case UtilityKind::Custom:
      break;
  }

  // Probe-grid fallback with central finite differences. A clean sweep is
  // only evidence, not a proof, hence "inconclusive".
  SpecializationCertificate cert;
  if (grid.points < 2 || !(grid.x_hi > grid.x_lo) || !(grid.y_hi > grid.y_lo))
    throw ConfigError("specialization_certificate: invalid probe grid");
  const int m = grid.points;
  bool fail1 = false, fail2 = false;
  std::pair<double, double> w1, w2;
  for (int i = 0; i < m && !(fail1 && fail2); ++i) {
    const double x = grid.x_lo + (grid.x_hi - grid.x_lo) * i / (m - 1);
    for (int j = 0; j < m && !(fail1 && fail2); ++j) {
      const double y = grid.y_lo + (grid.y_hi - grid.y_lo) * j / (m - 1);
      const double hx = 1e-5 * (1.0 + std::fabs(x));
      const double hy = 1e-4 * (1.0 + std::fabs(y));
      const double ux = (u(x + hx, y) - u(x - hx, y)) / (2.0 * hx);
      const double uyy = (u(x, y + hy) - 2.0 * u(x, y) + u(x, y - hy)) / (hy * hy);
      const double val = ux * dmu + 0.5 * uyy * dvar;
      const double tol =
          1e-6 * (1.0 + std::fabs(ux * dmu) + std::fabs(0.5 * uyy * dvar));
      if (!fail1 && val < -tol) {
        fail1 = true;
        w1 = {x, y};
      }
      if (!fail2 && val > tol) {
        fail2 = true;
        w2 = {x, y};
      }
    }
  }
  cert.holds_for_arm1 = fail1 ? CertVerdict::No : CertVerdict::Inconclusive;
  cert.holds_for_arm2 = fail2 ? CertVerdict::No : CertVerdict::Inconclusive;
  if (fail1) cert.witness1 = w1;
  if (fail2) cert.witness2 = w2;
  return cert;
}

}  // namespace bandit
