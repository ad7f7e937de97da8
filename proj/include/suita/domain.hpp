#pragma once

// Planar domain descriptions: unit disc, disc, annulus q < |z| < 1,
// Green sublevel sets {G_base(z, pole) < level}, finite puncture sets.
// All values are immutable after construction; operations are pure.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "core.hpp"
#include "detail/images.hpp"

namespace suita {

struct DomainSpec;
using DomainPtr = std::shared_ptr<const DomainSpec>;

struct UnitDisc {};

struct Disc {
  Complex center;
  double radius = 1.0;
};

struct Annulus {
  double q = 0.5;  // inner radius; outer radius fixed at 1
};

// {z in base : G_base(z, pole) < level}, level < 0
struct Sublevel {
  DomainPtr base;
  Complex pole;
  double level = -1.0;
};

// base minus closed eps-disks around finitely many punctures
struct Punctured {
  DomainPtr base;
  std::vector<Complex> punctures;
  double excision_radius = 0.0;
};

struct DomainSpec {
  std::variant<UnitDisc, Disc, Annulus, Sublevel, Punctured> v;

  template <class T>
  bool is() const {
    return std::holds_alternative<T>(v);
  }
  template <class T>
  const T& as() const {
    return std::get<T>(v);
  }
};

inline DomainSpec make_unit_disc() { return {UnitDisc{}}; }
inline DomainSpec make_disc(Complex center, double radius) { return {Disc{center, radius}}; }
inline DomainSpec make_annulus(double q) { return {Annulus{q}}; }
inline DomainSpec make_sublevel(const DomainSpec& base, Complex pole, double level) {
  return {Sublevel{std::make_shared<const DomainSpec>(base), pole, level}};
}
inline DomainSpec make_punctured(const DomainSpec& base, std::vector<Complex> punctures,
                                 double excision_radius) {
  return {Punctured{std::make_shared<const DomainSpec>(base), std::move(punctures),
                    excision_radius}};
}

namespace detail {

inline bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Green function of `domain` with pole at `pole`, by the closed disc form,
// the annulus image series, the sublevel shift rule, or puncture passthrough.
// Sublevel bases demand a matching pole: the shift rule G_sub = G_base - level
// only applies to the sublevel's own defining pole.
inline double green_on(const DomainSpec& d, Complex z, Complex pole, double tol = 1e-12);

inline Complex green_on_dz(const DomainSpec& d, Complex z, Complex pole, double tol = 1e-12);

inline double disc_green(Complex c, double R, Complex z, Complex w) {
  return std::log(R * std::abs(z - w)) -
         std::log(std::abs(R * R - std::conj(w - c) * (z - c)));
}

inline Complex disc_green_dz(Complex c, double R, Complex z, Complex w) {
  return 0.5 / (z - w) + 0.5 * std::conj(w - c) / (R * R - std::conj(w - c) * (z - c));
}

inline double green_on(const DomainSpec& d, Complex z, Complex pole, double tol) {
  if (d.is<UnitDisc>()) return disc_green(0.0, 1.0, z, pole);
  if (d.is<Disc>()) {
    const auto& dd = d.as<Disc>();
    return disc_green(dd.center, dd.radius, z, pole);
  }
  if (d.is<Annulus>()) return detail::annulus_green(d.as<Annulus>().q, z, pole, tol);
  if (d.is<Punctured>()) return green_on(*d.as<Punctured>().base, z, pole, tol);
  const auto& s = d.as<Sublevel>();
  if (pole != s.pole)
    fail_numeric("green-eval-failed", "sublevel Green known only at its defining pole");
  return green_on(*s.base, z, pole, tol) - s.level;
}

inline Complex green_on_dz(const DomainSpec& d, Complex z, Complex pole, double tol) {
  if (d.is<UnitDisc>()) return disc_green_dz(0.0, 1.0, z, pole);
  if (d.is<Disc>()) {
    const auto& dd = d.as<Disc>();
    return disc_green_dz(dd.center, dd.radius, z, pole);
  }
  if (d.is<Annulus>()) return detail::annulus_green_dz(d.as<Annulus>().q, z, pole, tol);
  if (d.is<Punctured>()) return green_on_dz(*d.as<Punctured>().base, z, pole, tol);
  const auto& s = d.as<Sublevel>();
  if (pole != s.pole)
    fail_numeric("green-eval-failed", "sublevel Green known only at its defining pole");
  return green_on_dz(*s.base, z, pole, tol);
}

}  // namespace detail

inline bool contains(const DomainSpec& d, Complex z) {
  if (!detail::finite(z)) return false;
  if (d.is<UnitDisc>()) return std::abs(z) < 1.0;
  if (d.is<Disc>()) {
    const auto& dd = d.as<Disc>();
    return std::abs(z - dd.center) < dd.radius;
  }
  if (d.is<Annulus>()) {
    const double r = std::abs(z);
    return d.as<Annulus>().q < r && r < 1.0;
  }
  if (d.is<Punctured>()) {
    const auto& p = d.as<Punctured>();
    for (Complex q : p.punctures)
      if (std::abs(z - q) <= p.excision_radius) return false;
    return contains(*p.base, z);
  }
  const auto& s = d.as<Sublevel>();
  if (!contains(*s.base, z)) return false;
  if (std::abs(z - s.pole) < 1e-14) return true;  // G = -inf side
  return detail::green_on(*s.base, z, s.pole) < s.level;
}

/// The disc a domain literally is: unit disc, disc, or a Green sublevel of a
/// disc (which a Mobius map identifies as another round disc). Punctures do
/// not qualify; annulus-family domains return nothing.
inline std::optional<Disc> equivalent_disc(const DomainSpec& d) {
  if (d.is<UnitDisc>()) return Disc{0.0, 1.0};
  if (d.is<Disc>()) return d.as<Disc>();
  if (!d.is<Sublevel>()) return std::nullopt;
  const auto& s = d.as<Sublevel>();
  const auto base = equivalent_disc(*s.base);
  if (!base) return std::nullopt;
  // {G_disc < s} maps through zeta = (z-c)/R to the unit-disc sublevel
  // {|m(zeta)| < e^s}, a round disc with known center and radius.
  const Complex zeta0 = (s.pole - base->center) / base->radius;
  const double rho = std::exp(s.level);
  const double den = 1.0 - rho * rho * std::norm(zeta0);
  const Complex cz = zeta0 * (1.0 - rho * rho) / den;
  const double rz = rho * (1.0 - std::norm(zeta0)) / den;
  return Disc{base->center + base->radius * cz, base->radius * rz};
}

/// Innermost structural base of a domain, unwrapping sublevels and punctures.
inline const DomainSpec& root_base(const DomainSpec& d) {
  if (d.is<Sublevel>()) return root_base(*d.as<Sublevel>().base);
  if (d.is<Punctured>()) return root_base(*d.as<Punctured>().base);
  return d;
}

/// A representative of the bounded complementary component, when the domain
/// family has one (annulus and its sublevels/punctures): fixed at 0.
inline std::optional<Complex> hole_point(const DomainSpec& d) {
  if (root_base(d).is<Annulus>()) return Complex{0.0, 0.0};
  return std::nullopt;
}

struct PolarCap {
  Complex center;
  double radius;
};

struct FlatDomain {
  DomainSpec clean;            // same domain with all punctures removed
  std::vector<PolarCap> caps;  // excised disks that lie inside `clean`
};

/// Strips Punctured wrappers at every nesting level, collecting the excised
/// caps that survive inside the resulting clean domain.
inline FlatDomain flatten_punctures(const DomainSpec& d) {
  if (d.is<Punctured>()) {
    const auto& p = d.as<Punctured>();
    FlatDomain f = flatten_punctures(*p.base);
    for (Complex q : p.punctures) f.caps.push_back({q, p.excision_radius});
    return f;
  }
  if (d.is<Sublevel>()) {
    const auto& s = d.as<Sublevel>();
    FlatDomain f = flatten_punctures(*s.base);
    DomainSpec clean = make_sublevel(f.clean, s.pole, s.level);
    std::vector<PolarCap> caps;
    for (const auto& cap : f.caps)
      if (contains(clean, cap.center)) caps.push_back(cap);
    return {std::move(clean), std::move(caps)};
  }
  return {d, {}};
}

/// Area when known in closed form; annulus sublevels have none.
inline std::optional<double> domain_area(const DomainSpec& d) {
  if (d.is<Annulus>()) return pi * (1.0 - sq(d.as<Annulus>().q));
  if (d.is<Punctured>()) {
    const auto& p = d.as<Punctured>();
    auto base = domain_area(*p.base);
    if (!base) return std::nullopt;
    double a = *base;
    for (const auto& cap : flatten_punctures(d).caps) a -= pi * sq(cap.radius);
    return a;
  }
  if (auto e = equivalent_disc(d)) return pi * sq(e->radius);
  return std::nullopt;
}

/// Distance from z to the domain boundary, when the boundary is explicit.
inline std::optional<double> boundary_distance(const DomainSpec& d, Complex z) {
  if (d.is<Annulus>()) {
    const double r = std::abs(z);
    return std::min(r - d.as<Annulus>().q, 1.0 - r);
  }
  if (d.is<Punctured>()) {
    const auto& p = d.as<Punctured>();
    auto base = boundary_distance(*p.base, z);
    if (!base) return std::nullopt;
    double m = *base;
    for (Complex q : p.punctures) m = std::min(m, std::abs(z - q) - p.excision_radius);
    return m;
  }
  if (auto e = equivalent_disc(d)) return e->radius - std::abs(z - e->center);
  return std::nullopt;
}

inline void validate(const DomainSpec& d) {
  if (d.is<UnitDisc>()) return;
  if (d.is<Disc>()) {
    const auto& dd = d.as<Disc>();
    if (!detail::finite(dd.center) || !std::isfinite(dd.radius) || dd.radius <= 0.0)
      fail_validation("invalid-domain", "disc needs finite center and radius > 0");
    return;
  }
  if (d.is<Annulus>()) {
    const double q = d.as<Annulus>().q;
    if (!std::isfinite(q) || q <= 0.0 || q >= 1.0)
      fail_validation("invalid-domain", "annulus needs 0 < q < 1");
    return;
  }
  if (d.is<Sublevel>()) {
    const auto& s = d.as<Sublevel>();
    if (!s.base) fail_validation("invalid-domain", "sublevel needs a base domain");
    validate(*s.base);
    if (!std::isfinite(s.level) || s.level >= 0.0)
      fail_validation("invalid-domain", "sublevel level must be < 0");
    if (!contains(*s.base, s.pole))
      fail_validation("invalid-domain", "sublevel pole must lie in the base domain");
    return;
  }
  const auto& p = d.as<Punctured>();
  if (!p.base) fail_validation("invalid-domain", "punctured needs a base domain");
  validate(*p.base);
  if (!std::isfinite(p.excision_radius) || p.excision_radius < 0.0)
    fail_validation("invalid-domain", "excision radius must be >= 0");
  double min_sep = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < p.punctures.size(); ++i) {
    if (!contains(*p.base, p.punctures[i]))
      fail_validation("invalid-puncture", "puncture outside the base domain");
    for (size_t j = i + 1; j < p.punctures.size(); ++j) {
      if (p.punctures[i] == p.punctures[j])
        fail_validation("invalid-puncture", "punctures must be pairwise distinct");
      min_sep = std::min(min_sep, std::abs(p.punctures[i] - p.punctures[j]));
    }
    if (auto bd = boundary_distance(*p.base, p.punctures[i])) min_sep = std::min(min_sep, *bd);
    for (const DomainSpec* b = p.base.get(); b->is<Sublevel>(); b = b->as<Sublevel>().base.get())
      min_sep = std::min(min_sep, std::abs(p.punctures[i] - b->as<Sublevel>().pole));
  }
  if (!p.punctures.empty() && p.excision_radius >= 0.5 * min_sep)
    fail_validation("invalid-puncture", "excision radius too large for this configuration");
}

/// Wraps `domain` with punctures after checking the excision radius is
/// admissible: strictly under half the least puncture-to-puncture and
/// puncture-to-boundary distance.
inline DomainSpec puncture(const DomainSpec& d, const std::vector<Complex>& points, double eps) {
  validate(d);
  if (!std::isfinite(eps) || eps < 0.0)
    fail_validation("invalid-puncture", "excision radius must be >= 0");
  double min_sep = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < points.size(); ++i) {
    if (!contains(d, points[i]))
      fail_validation("invalid-puncture", "puncture outside the domain");
    if (auto bd = boundary_distance(d, points[i]))
      min_sep = std::min(min_sep, *bd);
    else
      fail_validation("invalid-puncture", "domain has no explicit boundary metric");
    for (size_t j = i + 1; j < points.size(); ++j)
      min_sep = std::min(min_sep, std::abs(points[i] - points[j]));
  }
  if (!points.empty() && eps >= 0.5 * min_sep)
    fail_validation("invalid-puncture", "excision radius too large for this configuration");
  DomainSpec out = make_punctured(d, points, eps);
  validate(out);
  return out;
}

// ---- JSON (complex values serialize as [re, im]) ----

namespace detail {

inline nlohmann::ordered_json complex_json(Complex z) {
  return nlohmann::ordered_json::array({z.real(), z.imag()});
}

inline Complex complex_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    fail_validation("invalid-domain", "complex values must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace detail

inline nlohmann::ordered_json domain_to_json(const DomainSpec& d) {
  using nlohmann::ordered_json;
  ordered_json j;
  if (d.is<UnitDisc>()) {
    j["type"] = "unit_disc";
  } else if (d.is<Disc>()) {
    j["type"] = "disc";
    j["center"] = detail::complex_json(d.as<Disc>().center);
    j["radius"] = d.as<Disc>().radius;
  } else if (d.is<Annulus>()) {
    j["type"] = "annulus";
    j["q"] = d.as<Annulus>().q;
  } else if (d.is<Sublevel>()) {
    const auto& s = d.as<Sublevel>();
    j["type"] = "sublevel";
    j["base"] = domain_to_json(*s.base);
    j["pole"] = detail::complex_json(s.pole);
    j["level"] = s.level;
  } else {
    const auto& p = d.as<Punctured>();
    j["type"] = "punctured";
    j["base"] = domain_to_json(*p.base);
    auto arr = ordered_json::array();
    for (Complex q : p.punctures) arr.push_back(detail::complex_json(q));
    j["punctures"] = arr;
    j["excision_radius"] = p.excision_radius;
  }
  return j;
}

inline DomainSpec domain_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    fail_validation("invalid-domain", "domain JSON needs a \"type\" string");
  const std::string type = j["type"].get<std::string>();
  auto need = [&](const char* key) -> const nlohmann::json& {
    if (!j.contains(key))
      fail_validation("invalid-domain", std::string("domain JSON missing \"") + key + "\"");
    return j[key];
  };
  DomainSpec d;
  if (type == "unit_disc") {
    d = make_unit_disc();
  } else if (type == "disc") {
    if (!need("radius").is_number()) fail_validation("invalid-domain", "radius must be a number");
    d = make_disc(detail::complex_from_json(need("center")), j["radius"].get<double>());
  } else if (type == "annulus") {
    if (!need("q").is_number()) fail_validation("invalid-domain", "q must be a number");
    d = make_annulus(j["q"].get<double>());
  } else if (type == "sublevel") {
    if (!need("level").is_number()) fail_validation("invalid-domain", "level must be a number");
    d = make_sublevel(domain_from_json(need("base")), detail::complex_from_json(need("pole")),
                      j["level"].get<double>());
  } else if (type == "punctured") {
    if (!need("punctures").is_array())
      fail_validation("invalid-domain", "punctures must be an array");
    if (!need("excision_radius").is_number())
      fail_validation("invalid-domain", "excision_radius must be a number");
    std::vector<Complex> pts;
    for (const auto& e : j["punctures"]) pts.push_back(detail::complex_from_json(e));
    d = make_punctured(domain_from_json(need("base")), std::move(pts),
                       j["excision_radius"].get<double>());
  } else {
    fail_validation("invalid-domain", "unknown domain type \"" + type + "\"");
  }
  validate(d);
  return d;
}

}  // namespace suita
