#include <algorithm>
#include <cmath>

#include "fbmlab/error.hpp"
#include "fbmlab/models.hpp"

namespace fbmlab {

ScalarForcing ScalarForcing::zero() { return {Kind::zero, 0.0, 0.0, 0.0}; }

ScalarForcing ScalarForcing::constant(double value) {
  if (!std::isfinite(value)) throw ConfigError("forcing value must be finite");
  return {Kind::constant, value, 0.0, 0.0};
}

ScalarForcing ScalarForcing::exp_decay(double amplitude, double rate) {
  if (!std::isfinite(amplitude) || !(rate >= 0.0)) throw ConfigError("exp_decay needs finite amplitude, rate >= 0");
  return {Kind::exp_decay, amplitude, rate, 0.0};
}

ScalarForcing ScalarForcing::periodic(double offset, double amplitude, double frequency) {
  if (!std::isfinite(offset) || !std::isfinite(amplitude) || !std::isfinite(frequency)) {
    throw ConfigError("periodic forcing parameters must be finite");
  }
  return {Kind::periodic, offset, amplitude, frequency};
}

ScalarForcing ScalarForcing::from_json(const nlohmann::json& j) {
  const std::string kind = j.value("kind", "");
  if (kind == "zero") return zero();
  if (kind == "constant") return constant(j.value("value", 0.0));
  if (kind == "exp_decay") return exp_decay(j.value("amplitude", 1.0), j.value("rate", 1.0));
  if (kind == "periodic") return periodic(j.value("offset", 0.0), j.value("amplitude", 1.0), j.value("frequency", 1.0));
  throw ConfigError("unknown forcing kind '" + kind + "'");
}

double ScalarForcing::operator()(double t) const {
  switch (kind_) {
    case Kind::zero: return 0.0;
    case Kind::constant: return a_;
    case Kind::exp_decay: return a_ * std::exp(-b_ * std::abs(t));
    case Kind::periodic: return a_ + b_ * std::sin(c_ * t);
  }
  return 0.0;
}

nlohmann::json ScalarForcing::to_json() const {
  switch (kind_) {
    case Kind::zero: return {{"kind", "zero"}};
    case Kind::constant: return {{"kind", "constant"}, {"value", a_}};
    case Kind::exp_decay: return {{"kind", "exp_decay"}, {"amplitude", a_}, {"rate", b_}};
    case Kind::periodic: return {{"kind", "periodic"}, {"offset", a_}, {"amplitude", b_}, {"frequency", c_}};
  }
  return {};
}

IntegrabilityCertificate certify_exponential_integrability(const std::function<double(double)>& f, double t,
                                                           std::span<const double> etas, double horizon,
                                                           double step) {
  if (!(horizon > 0.0) || !(step > 0.0)) throw DomainError("horizon and step must be positive");
  IntegrabilityCertificate cert{true, {}, {}, {}};
  const auto count = static_cast<std::size_t>(std::ceil(horizon / step));
  const double h = horizon / static_cast<double>(count);
  for (double eta : etas) {
    if (!(eta > 0.0)) throw DomainError("eta must be positive");
    double integral = 0.0;
    double peak = 0.0;
    double far = 0.0;
    for (std::size_t i = 0; i <= count; ++i) {
      double r = t - horizon + h * static_cast<double>(i);
      double v = std::abs(f(r)) * std::exp(eta * (r - t));
      if (!std::isfinite(v)) {
        cert.certified = false;
        v = std::numeric_limits<double>::infinity();
      }
      double w = (i == 0 || i == count) ? 0.5 : 1.0;
      integral += w * h * v;
      peak = std::max(peak, v);
      if (i == 0) far = v;
    }
    double ratio = peak > 0.0 ? far / peak : 0.0;
    if (!(ratio <= 1e-6)) cert.certified = false;
    cert.etas.push_back(eta);
    cert.integrals.push_back(integral * std::exp(eta * t));
    cert.tail_ratio.push_back(ratio);
  }
  return cert;
}

}  // namespace fbmlab
