#pragma once

#include <optional>
#include <string>

namespace ulamnet {

enum class MapModel { Model1, Model2 };

// One-parameter family of interval maps with an intermittent left branch
// x + (2x)^z1 / 2 on [0, 1/2). Model1 closes the interval with a branch whose
// derivative diverges at x = 1; Model2 uses the sine cap a*sin(pi*(x - 1/2)),
// which develops a stable fixed point once a is large enough.
struct MapSpec {
  MapModel model = MapModel::Model1;
  double z1 = 2.0;
  double z2 = 0.2;  // Model1 right-branch exponent; ignored for Model2
  double a = 0.9;   // Model2 amplitude; ignored for Model1

  // Throws std::invalid_argument on out-of-range parameters.
  void validate() const;
};

struct FixedPoint {
  double x;      // location in (1/2, 1]
  double slope;  // map derivative at x (central difference)
};

// Single map step. x must lie in [0, 1] up to a 1e-12 rounding tolerance;
// the result is clamped back into [0, 1].
double eval_map(const MapSpec& spec, double x);

// Stable fixed point of the Model2 right branch, if one exists. Model1 has
// none. Located by bisection to 1e-12.
std::optional<FixedPoint> find_fixed_point_attractor(const MapSpec& spec);

// JSON form {"model": "f1"|"f2", "z1": ..., "z2": ...} / {"model": "f2",
// "z1": ..., "a": ...}; unknown keys are rejected.
std::string map_spec_to_json(const MapSpec& spec);
MapSpec map_spec_from_json(const std::string& text);

const char* model_name(MapModel model);

}  // namespace ulamnet
