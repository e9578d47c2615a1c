#pragma once

#include <iosfwd>
#include <string>

#include "cslr/isotonic.hpp"
#include "cslr/model.hpp"

namespace cslr {

inline constexpr int kSchemaVersion = 1;

// Shortest decimal string that parses back to the same double.
std::string format_double(double v);
double parse_double(const std::string& text);

// Sample CSV: a "# schema: 1" comment line, header t,x1..xk,delta, then one
// row per observation.
void write_sample_csv(std::ostream& os, const Sample& sample);
Sample read_sample_csv(std::istream& is);
void write_sample_csv_file(const std::string& path, const Sample& sample);
Sample read_sample_csv_file(const std::string& path);

// {"schema":1,"rows":[{"t":..,"x1":..,"delta":..},..]}
std::string sample_to_json(const Sample& sample);
Sample sample_from_json(const std::string& text);

// Step function as ascending knot,value rows.
void write_step_csv(std::ostream& os, const StepDistribution& F);
StepDistribution read_step_csv(std::istream& is);

}  // namespace cslr
