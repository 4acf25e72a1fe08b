#pragma once

#include "efie/adapt.hpp"

#include "json.hpp"

#include <iosfwd>
#include <string>

namespace efie {

enum class Mode { solve, estimate, uniform_study, adapt };

Mode parse_mode(const std::string& name);
std::string to_string(Mode m);

/// Everything a run needs. Parsed from a flat `key = value` file; every field
/// has a default and all of them are echoed into summary.json.
struct RunConfig {
    std::string geometry = "cube";  ///< canonical shape name or path to an .off/.msh file
    double scale = 1.0;
    int initial_refinements = 0;
    double k = 1.0;
    Vec3 polarization = Vec3(1, 0, 0);
    Vec3 polarization_imag = Vec3::Zero();
    Vec3 direction = Vec3(0, 0, 1);
    QuadOrders orders;
    double near_factor = 3.0;
    Mode mode = Mode::solve;
    double theta = 0.5;
    int levels = 3;
    int max_iters = 4;
    int max_dofs = 20000;
    std::string out = "out";
    int threads = 1;

    IncidentWave wave() const;
    AdaptConfig adapt_config() const;
    /// Checks every precondition of the pipeline; throws InputError naming the field.
    void validate() const;
    nlohmann::json to_json() const;
};

/// Sets one field from its textual value. Throws InputError naming the key.
void set_field(RunConfig& cfg, const std::string& key, const std::string& value);

/// Parses `key = value` lines; '#' starts a comment. `source` is used in messages.
RunConfig parse_config(std::istream& in, const std::string& source = "config");
RunConfig load_config(const std::string& path);

}  // namespace efie
