#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "shapehom/jet.hpp"
#include "shapehom/vec2.hpp"

namespace shapehom {

// A scalar integrand f(x,y) whose negative sublevel set is the target
// shape of the volume objective J(Omega) = int_Omega f dx. Evaluation
// returns the full jet of f at a point up to the requested order.
class Integrand {
 public:
  virtual ~Integrand() = default;
  virtual Jet2 eval(Vec2 p, int order) const = 0;
  virtual std::string id() const = 0;

  double value(Vec2 p) const { return eval(p, 0).value(); }
  Vec2 gradient(Vec2 p) const {
    Jet2 j = eval(p, 1);
    return {j.coeff(1, 0), j.coeff(0, 1)};
  }
};

// f = x^2/a^2 + y^2/b^2 - R^2 with b = 1/a.
class EllipseIntegrand : public Integrand {
 public:
  explicit EllipseIntegrand(double a, double radius = 1.0)
      : a_(a), radius_(radius) {}
  Jet2 eval(Vec2 p, int order) const override;
  std::string id() const override { return "ellipse"; }
  double a() const { return a_; }
  double radius() const { return radius_; }

 private:
  double a_, radius_;
};

// Axis-swapped variant: f = x^2/b^2 + y^2/a^2 - R^2 with b = 1/a.
class RotatedEllipseIntegrand : public Integrand {
 public:
  explicit RotatedEllipseIntegrand(double a, double radius = 2.0)
      : a_(a), radius_(radius) {}
  Jet2 eval(Vec2 p, int order) const override;
  std::string id() const override { return "ellipse_rot"; }
  double a() const { return a_; }
  double radius() const { return radius_; }

 private:
  double a_, radius_;
};

// f = (x/a)^p + (y/b)^p - R^p for even integer p.
class PEllipseIntegrand : public Integrand {
 public:
  PEllipseIntegrand(int p, double a, double b, double R)
      : p_(p), a_(a), b_(b), R_(R) {}
  Jet2 eval(Vec2 p, int order) const override;
  std::string id() const override { return "p_ellipse"; }

 private:
  int p_;
  double a_, b_, R_;
};

// f = x^2 + y^2 - r^2, the level set of the disk B_r(0).
class DiskIntegrand : public Integrand {
 public:
  explicit DiskIntegrand(double r) : r_(r) {}
  Jet2 eval(Vec2 p, int order) const override;
  std::string id() const override { return "disk"; }
  double r() const { return r_; }

 private:
  double r_;
};

// Four-lobed integrand
//   f = (sqrt((x-a)^2 + b y^2) - 1)(sqrt((x+a)^2 + b y^2) - 1)
//       (sqrt(b x^2 + (y-a)^2) - 1)(sqrt(b x^2 + (y+a)^2) - 1) - eps.
// The square-root arguments must stay positive; evaluation throws
// DomainError when a quadrature point hits one of the four centers.
class CloverIntegrand : public Integrand {
 public:
  CloverIntegrand(double a, double b, double eps) : a_(a), b_(b), eps_(eps) {}
  Jet2 eval(Vec2 p, int order) const override;
  std::string id() const override { return "clover"; }

 private:
  double a_, b_, eps_;
};

// Fixed linear combination sum_i w_i f_i. Holds shared ownership of the
// component integrands.
class CombinationIntegrand : public Integrand {
 public:
  using Term = std::pair<double, std::shared_ptr<const Integrand>>;
  explicit CombinationIntegrand(std::vector<Term> terms)
      : terms_(std::move(terms)) {}
  Jet2 eval(Vec2 p, int order) const override;
  std::string id() const override { return "combination"; }

 private:
  std::vector<Term> terms_;
};

// Factory from a string id and a parameter map; unknown ids or missing
// parameters raise ConfigError. Recognized ids: ellipse{a,R}, ellipse_rot{a,R},
// p_ellipse{p,a,b,R}, clover{a,b,eps}, disk{r}.
std::shared_ptr<const Integrand> make_integrand(
    const std::string& id, const std::map<std::string, double>& params);

// Parses the inline CLI form "id" or "id{key=val,key=val}".
std::shared_ptr<const Integrand> parse_integrand_spec(const std::string& spec);

}  // namespace shapehom
