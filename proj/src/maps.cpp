#include "ulamnet/maps.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

namespace ulamnet {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDomainTol = 1e-12;

double right_branch(const MapSpec& spec, double x) {
  if (spec.model == MapModel::Model1) {
    const double p = std::pow(2.0, -spec.z2);
    return (2.0 * x - 1.0 - std::pow(1.0 - x, spec.z2) + p) / (1.0 + p);
  }
  return spec.a * std::sin(kPi * (x - 0.5));
}

}  // namespace

void MapSpec::validate() const {
  if (!(z1 > 0.0)) throw std::invalid_argument("map: z1 must be positive");
  if (model == MapModel::Model1) {
    if (!(z2 > 0.0)) throw std::invalid_argument("map: z2 must be positive");
  } else {
    if (!(a > 0.0 && a < 1.0))
      throw std::invalid_argument("map: a must lie in (0, 1)");
  }
}

double eval_map(const MapSpec& spec, double x) {
  if (x < -kDomainTol || x > 1.0 + kDomainTol)
    throw std::domain_error("eval_map: x outside [0, 1]");
  x = std::clamp(x, 0.0, 1.0);
  double y;
  if (x < 0.5) {
    y = x + 0.5 * std::pow(2.0 * x, spec.z1);
  } else {
    y = right_branch(spec, x);
  }
  return std::clamp(y, 0.0, 1.0);
}

std::optional<FixedPoint> find_fixed_point_attractor(const MapSpec& spec) {
  spec.validate();
  if (spec.model != MapModel::Model2) return std::nullopt;

  const auto g = [&](double x) { return right_branch(spec, x) - x; };

  // Bracket roots of f2(x) = x on a fine grid, then bisect each bracket.
  constexpr int kGrid = 20000;
  constexpr double kLo = 0.5;
  constexpr double kHi = 1.0;
  std::vector<double> roots;
  double x0 = kLo;
  double g0 = g(x0);
  for (int i = 1; i <= kGrid; ++i) {
    const double x1 = kLo + (kHi - kLo) * static_cast<double>(i) / kGrid;
    const double g1 = g(x1);
    if (g0 == 0.0) roots.push_back(x0);
    if (g0 * g1 < 0.0) {
      double lo = x0, hi = x1;
      while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (g(lo) * g(mid) <= 0.0)
          hi = mid;
        else
          lo = mid;
      }
      roots.push_back(0.5 * (lo + hi));
    }
    x0 = x1;
    g0 = g1;
  }

  constexpr double kStep = 1e-6;
  for (auto it = roots.rbegin(); it != roots.rend(); ++it) {
    const double x = *it;
    const double lo = std::max(0.5, x - kStep);
    const double hi = std::min(1.0, x + kStep);
    const double slope = (right_branch(spec, hi) - right_branch(spec, lo)) / (hi - lo);
    if (std::abs(slope) < 1.0) return FixedPoint{x, slope};
  }
  return std::nullopt;
}

const char* model_name(MapModel model) {
  return model == MapModel::Model1 ? "f1" : "f2";
}

std::string map_spec_to_json(const MapSpec& spec) {
  nlohmann::json j;
  j["model"] = model_name(spec.model);
  j["z1"] = spec.z1;
  if (spec.model == MapModel::Model1)
    j["z2"] = spec.z2;
  else
    j["a"] = spec.a;
  return j.dump();
}

MapSpec map_spec_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.is_object()) throw std::invalid_argument("map json: expected an object");
  MapSpec spec;
  bool have_model = false;
  for (const auto& [key, value] : j.items()) {
    if (key == "model") {
      const std::string name = value.get<std::string>();
      if (name == "f1")
        spec.model = MapModel::Model1;
      else if (name == "f2")
        spec.model = MapModel::Model2;
      else
        throw std::invalid_argument("map json: model must be \"f1\" or \"f2\"");
      have_model = true;
    } else if (key == "z1") {
      spec.z1 = value.get<double>();
    } else if (key == "z2") {
      spec.z2 = value.get<double>();
    } else if (key == "a") {
      spec.a = value.get<double>();
    } else {
      throw std::invalid_argument("map json: unknown key \"" + key + "\"");
    }
  }
  if (!have_model) throw std::invalid_argument("map json: missing \"model\"");
  spec.validate();
  return spec;
}

}  // namespace ulamnet
