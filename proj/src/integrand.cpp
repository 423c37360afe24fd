#include "shapehom/integrand.hpp"

#include <cmath>
#include <sstream>

#include "shapehom/errors.hpp"

namespace shapehom {

Jet2 EllipseIntegrand::eval(Vec2 p, int order) const {
  Jet2 x = Jet2::seed_x(order, p.x);
  Jet2 y = Jet2::seed_y(order, p.y);
  double b = 1.0 / a_;
  return jet_powi(x, 2) * (1.0 / (a_ * a_)) + jet_powi(y, 2) * (1.0 / (b * b)) -
         radius_ * radius_;
}

Jet2 RotatedEllipseIntegrand::eval(Vec2 p, int order) const {
  Jet2 x = Jet2::seed_x(order, p.x);
  Jet2 y = Jet2::seed_y(order, p.y);
  double b = 1.0 / a_;
  return jet_powi(x, 2) * (1.0 / (b * b)) + jet_powi(y, 2) * (1.0 / (a_ * a_)) -
         radius_ * radius_;
}

Jet2 PEllipseIntegrand::eval(Vec2 p, int order) const {
  Jet2 x = Jet2::seed_x(order, p.x);
  Jet2 y = Jet2::seed_y(order, p.y);
  return jet_powi(x * (1.0 / a_), p_) + jet_powi(y * (1.0 / b_), p_) -
         std::pow(R_, p_);
}

Jet2 DiskIntegrand::eval(Vec2 p, int order) const {
  Jet2 x = Jet2::seed_x(order, p.x);
  Jet2 y = Jet2::seed_y(order, p.y);
  return jet_powi(x, 2) + jet_powi(y, 2) - r_ * r_;
}

Jet2 CloverIntegrand::eval(Vec2 p, int order) const {
  Jet2 x = Jet2::seed_x(order, p.x);
  Jet2 y = Jet2::seed_y(order, p.y);
  Jet2 bx2 = jet_powi(x, 2) * b_;
  Jet2 by2 = jet_powi(y, 2) * b_;

  auto factor = [&](const Jet2& arg) -> Jet2 {
    if (!(arg.value() > 1e-30))
      throw DomainError("clover integrand: sqrt argument not positive");
    return jet_sqrt(arg) - 1.0;
  };

  Jet2 f1 = factor(jet_powi(x - a_, 2) + by2);
  Jet2 f2 = factor(jet_powi(x + a_, 2) + by2);
  Jet2 f3 = factor(bx2 + jet_powi(y - a_, 2));
  Jet2 f4 = factor(bx2 + jet_powi(y + a_, 2));
  return (f1 * f2) * (f3 * f4) - eps_;
}

Jet2 CombinationIntegrand::eval(Vec2 p, int order) const {
  Jet2 acc(order);
  for (const auto& [w, f] : terms_) acc += w * f->eval(p, order);
  return acc;
}

namespace {

double get_param(const std::map<std::string, double>& params,
                 const std::string& key, double fallback,
                 bool required = false) {
  auto it = params.find(key);
  if (it != params.end()) return it->second;
  if (required) throw ConfigError("integrand: missing parameter '" + key + "'");
  return fallback;
}

}  // namespace

std::shared_ptr<const Integrand> make_integrand(
    const std::string& id, const std::map<std::string, double>& params) {
  if (id == "ellipse") {
    return std::make_shared<EllipseIntegrand>(get_param(params, "a", 1.25),
                                              get_param(params, "R", 1.0));
  }
  if (id == "ellipse_rot") {
    return std::make_shared<RotatedEllipseIntegrand>(
        get_param(params, "a", 1.3), get_param(params, "R", 2.0));
  }
  if (id == "p_ellipse") {
    int p = static_cast<int>(get_param(params, "p", 4.0));
    if (p < 1) throw ConfigError("p_ellipse: p must be a positive integer");
    return std::make_shared<PEllipseIntegrand>(p, get_param(params, "a", 2.0),
                                               get_param(params, "b", 0.5),
                                               get_param(params, "R", 4.0));
  }
  if (id == "clover") {
    return std::make_shared<CloverIntegrand>(get_param(params, "a", 0.8),
                                             get_param(params, "b", 2.0),
                                             get_param(params, "eps", 0.01));
  }
  if (id == "disk") {
    return std::make_shared<DiskIntegrand>(get_param(params, "r", 1.0));
  }
  throw ConfigError("unknown integrand id '" + id + "'");
}

std::shared_ptr<const Integrand> parse_integrand_spec(const std::string& spec) {
  auto brace = spec.find('{');
  std::string id = spec.substr(0, brace);
  std::map<std::string, double> params;
  if (brace != std::string::npos) {
    if (spec.back() != '}')
      throw ConfigError("integrand spec '" + spec + "': missing '}'");
    std::string body = spec.substr(brace + 1, spec.size() - brace - 2);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      auto eq = item.find('=');
      if (eq == std::string::npos) eq = item.find(':');
      if (eq == std::string::npos)
        throw ConfigError("integrand spec: expected key=value in '" + item +
                          "'");
      std::string key = item.substr(0, eq);
      try {
        params[key] = std::stod(item.substr(eq + 1));
      } catch (const std::exception&) {
        throw ConfigError("integrand spec: bad number in '" + item + "'");
      }
    }
  }
  return make_integrand(id, params);
}

}  // namespace shapehom
