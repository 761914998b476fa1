#pragma once

// JSON file formats, report serialisation and SVG output.

#include <string>
#include <vector>

#include "json.hpp"

#include "gaussmink/gaussian.hpp"
#include "gaussmink/geometry.hpp"
#include "gaussmink/report.hpp"

namespace gaussmink {

using Json = nlohmann::json;

/// Round to 9 significant digits (the echo precision of reports).
double sig9(double x);

Json body_to_json(const SupportPolygon& body, bool round = false);
/// {"dimension":2,"normals":[[x,y],...],"support":[...]}, reduced through wulff_shape.
SupportPolygon body_from_json(const Json& j);

struct MeasureFile {
  DiscreteMeasure mu;
  double p = 1.0;
};
Json measure_to_json(const DiscreteMeasure& mu, double p);
MeasureFile measure_from_json(const Json& j);

Json edge_measure_to_json(const EdgeMeasure& m);

/// {"resolution":N,"values":[...]}
Json density_to_json(std::span<const double> values);
std::vector<double> density_from_json(const Json& j);

Json field_to_json(const SupportField& field, bool round = false);

Json report_to_json(const SolveReport& report);

/// key=value lines.
std::string constants_text(const GaussConstants& c);

/// Closed polyline through 1024 radial boundary samples in a [-4,4]^2 view box, with the
/// unit circle for reference.
std::string boundary_svg(const SupportPolygon& body);

Json read_json_file(const std::string& path);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace gaussmink
