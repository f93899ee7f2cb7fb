#include <cmath>

#include "fbmlab/error.hpp"
#include "fbmlab/models.hpp"

namespace fbmlab {

void TripleConstants::validate() const {
  auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!(std::isfinite(alpha) && alpha >= 2.0)) throw ConfigError("alpha must be >= 2");
  if (!(std::isfinite(lambda_embed) && lambda_embed > 0.0)) throw ConfigError("lambda must be positive");
  if (!(std::isfinite(gamma_coercive) && gamma_coercive > 0.0)) throw ConfigError("gamma must be positive");
  if (!finite_nonneg(k_coercive) || !finite_nonneg(c_bound) || !finite_nonneg(c_monotone) ||
      !finite_nonneg(varpi) || !finite_nonneg(vartheta)) {
    throw ConfigError("triple constants must be finite and nonnegative");
  }
  if (alpha == 2.0 && !(k_coercive < gamma_coercive * lambda_embed)) {
    throw ConfigError("alpha == 2 requires K < gamma * lambda");
  }
}

nlohmann::json to_json(const TripleConstants& c) {
  return {{"lambda", c.lambda_embed}, {"alpha", c.alpha},          {"gamma", c.gamma_coercive},
          {"K", c.k_coercive},        {"C", c.c_bound},            {"C_monotone", c.c_monotone},
          {"varpi", c.varpi},         {"vartheta", c.vartheta}};
}

GelfandModel::GelfandModel(TripleConstants constants) : constants_(constants) { constants_.validate(); }

double GelfandModel::norm_h(std::span<const double> u) const { return std::sqrt(std::max(0.0, inner_h(u, u))); }

double GelfandModel::forcing_level(double) const { return constants_.c_bound; }

double GelfandModel::monotone_level(double) const { return constants_.c_monotone; }

void GelfandModel::validate_state(std::span<const double> u) const {
  if (u.size() != dimension()) {
    throw DomainError("state has dimension " + std::to_string(u.size()) + ", model expects " +
                      std::to_string(dimension()));
  }
  for (double v : u) {
    if (!std::isfinite(v)) throw DomainError("state contains a non-finite value");
  }
}

State GelfandModel::solve_shifted_jacobian(double, std::span<const double>, double, std::span<const double>) const {
  throw ConfigError("model '" + std::string(id()) + "' provides no Jacobian for implicit stepping");
}

ModelPtr make_model(const nlohmann::json& block) {
  if (!block.is_object()) throw ConfigError("model block must be an object");
  const std::string type = block.value("type", "");
  auto allow = [&](std::initializer_list<const char*> keys) {
    for (const auto& [key, _] : block.items()) {
      bool ok = key == "type";
      for (const char* k : keys) ok = ok || key == k;
      if (!ok) throw ConfigError("unknown key in model block: " + key);
    }
  };
  try {
    if (type == "linear") {
      allow({"a", "g"});
      double a = block.value("a", 1.0);
      if (!(a > 0.0)) throw ConfigError("linear model requires a > 0");
      return std::make_shared<LinearModel>(a, block.value("g", 0.0));
    }
    if (type == "pme") {
      allow({"r", "nodes", "C"});
      double r = block.value("r", 2.0);
      auto nodes = block.value("nodes", std::size_t{16});
      auto constants = PorousMediumModel::default_constants(r, nodes);
      if (block.contains("C")) constants.c_bound = block.at("C").get<double>();
      return std::make_shared<PorousMediumModel>(r, nodes, constants);
    }
    if (type == "nse") {
      allow({"nu", "truncation", "forcing", "C"});
      double nu = block.value("nu", 1.0);
      auto truncation = block.value("truncation", std::size_t{8});
      auto constants = NavierStokesModel::default_constants(nu);
      if (block.contains("C")) constants.c_bound = block.at("C").get<double>();
      std::optional<VelocityForcing> forcing;
      if (block.contains("forcing")) {
        const auto& f = block.at("forcing");
        for (const auto& [key, _] : f.items()) {
          if (key != "mode" && key != "amplitude" && key != "envelope") {
            throw ConfigError("unknown key in forcing block: " + key);
          }
        }
        // A single shear mode sin(k x_2) e_1, which is divergence free.
        NavierStokesModel probe(nu, truncation);
        int k = f.value("mode", 1);
        if (k < 1 || static_cast<std::size_t>(k) > truncation) throw ConfigError("forcing mode out of range");
        State shape(probe.dimension(), 0.0);
        const auto& modes = probe.modes();
        for (std::size_t i = 0; i < modes.size(); ++i) {
          if (modes[i].first == 0 && modes[i].second == k) shape[4 * i + 1] = -0.5 * f.value("amplitude", 1.0);
        }
        forcing = VelocityForcing{shape, ScalarForcing::from_json(f.value("envelope", nlohmann::json{{"kind", "constant"}, {"value", 1.0}}))};
      }
      return std::make_shared<NavierStokesModel>(nu, truncation, forcing, constants);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model block: ") + e.what());
  }
  throw ConfigError("unknown model type '" + type + "'");
}

}  // namespace fbmlab
