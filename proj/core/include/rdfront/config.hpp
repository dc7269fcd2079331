#ifndef RDFRONT_CONFIG_HPP
#define RDFRONT_CONFIG_HPP

#include <map>
#include <string>
#include <vector>

#include "rdfront/errors.hpp"
#include "rdfront/vec.hpp"

namespace rdfront {

/**
 * Experiment description parsed from the plain-text config format:
 * [section] headers and key = value lines, '#' comments. Unknown keys are
 * rejected against the per-kind schema before any compute runs.
 */
struct ExperimentConfig {
    std::string kind;          // validate-medium | front-speed | speed-map |
                               // surface | conditions | build-front |
                               // verify-bounds | stability
    unsigned long seed = 0;
    int workers = 1;
    std::string out_dir = "out";

    // medium
    std::string preset = "cubic-homogeneous";
    int dim = 2;
    double theta = 0.25;
    double contrast = 0.0;
    double diffusion = 1.0;
    Vec2 periods{1.0, 1.0};

    // geometry
    Vec2 e0{0.0, 1.0};
    std::vector<double> facet_angles; // degrees, e0 frame

    // numerics
    double h = 0.05;
    double strip_length = 60.0;
    double T = 60.0;
    double snapshot_dt = 0.25;
    int direction_count = 8;
    double eps = 0.0;    // 0 means "auto" (calibrate)
    double alpha = 0.0;  // 0 means "auto"
    double horizon = 12.0;
    double stability_T = 20.0;
    Vec2 direction{1.0, 0.0}; // front-speed direction
    double surface_alpha = 1.0;
    double surface_half_width = 20.0;
    double surface_step = 0.1;
    std::string map_csv;  // conditions: reuse a previously computed map
    std::string variant = "V"; // conditions/build-front: V | W

    static ExperimentConfig parse_file(const std::string& path);
    static ExperimentConfig parse_text(const std::string& text);
    std::string echo() const; // canonical re-serialization for the manifest
};

} // namespace rdfront

#endif
