#include "rdfront/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace rdfront {

namespace {

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r");
    auto b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (...) {
        throw ConfigFault("config: bad numeric value for " + key + ": '" + v + "'");
    }
}

long to_long(const std::string& key, const std::string& v) {
    try {
        std::size_t pos;
        long d = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (...) {
        throw ConfigFault("config: bad integer value for " + key + ": '" + v + "'");
    }
}

Vec2 to_vec(const std::string& key, const std::string& v) {
    auto comma = v.find(',');
    if (comma == std::string::npos)
        throw ConfigFault("config: expected 'x,y' for " + key);
    return {to_double(key, trim(v.substr(0, comma))),
            to_double(key, trim(v.substr(comma + 1)))};
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
    if (out.empty()) throw ConfigFault("config: empty list for " + key);
    return out;
}

const std::set<std::string> kKinds = {
    "validate-medium", "front-speed", "speed-map", "surface",
    "conditions",      "build-front", "verify-bounds", "stability"};

// section.key -> universal schema; per-kind requirements checked after parse.
const std::set<std::string> kKeys = {
    "experiment.kind",        "experiment.seed",
    "experiment.workers",     "experiment.out",
    "medium.preset",          "medium.dim",
    "medium.theta",           "medium.contrast",
    "medium.diffusion",       "medium.period_x",
    "medium.period_y",        "geometry.e0",
    "geometry.facets",        "numerics.h",
    "numerics.strip_length",  "numerics.T",
    "numerics.snapshot_dt",   "numerics.direction_count",
    "numerics.eps",           "numerics.alpha",
    "numerics.horizon",       "numerics.stability_T",
    "numerics.direction",     "numerics.surface_alpha",
    "numerics.surface_half_width", "numerics.surface_step",
    "conditions.map_csv",     "conditions.variant"};

} // namespace

ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    bool kind_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigFault("config: malformed section at line " +
                                  std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigFault("config: expected key = value at line " +
                              std::to_string(lineno));
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        std::string full = section + "." + key;
        if (!kKeys.count(full))
            throw ConfigFault("config: unknown key '" + full + "'");

        if (full == "experiment.kind") {
            if (!kKinds.count(val)) throw ConfigFault("config: unknown kind '" + val + "'");
            cfg.kind = val;
            kind_seen = true;
        } else if (full == "experiment.seed") cfg.seed = (unsigned long)to_long(full, val);
        else if (full == "experiment.workers") cfg.workers = int(to_long(full, val));
        else if (full == "experiment.out") cfg.out_dir = val;
        else if (full == "medium.preset") cfg.preset = val;
        else if (full == "medium.dim") cfg.dim = int(to_long(full, val));
        else if (full == "medium.theta") cfg.theta = to_double(full, val);
        else if (full == "medium.contrast") cfg.contrast = to_double(full, val);
        else if (full == "medium.diffusion") cfg.diffusion = to_double(full, val);
        else if (full == "medium.period_x") cfg.periods.x = to_double(full, val);
        else if (full == "medium.period_y") cfg.periods.y = to_double(full, val);
        else if (full == "geometry.e0") cfg.e0 = to_vec(full, val);
        else if (full == "geometry.facets") cfg.facet_angles = to_list(full, val);
        else if (full == "numerics.h") cfg.h = to_double(full, val);
        else if (full == "numerics.strip_length") cfg.strip_length = to_double(full, val);
        else if (full == "numerics.T") cfg.T = to_double(full, val);
        else if (full == "numerics.snapshot_dt") cfg.snapshot_dt = to_double(full, val);
        else if (full == "numerics.direction_count")
            cfg.direction_count = int(to_long(full, val));
        else if (full == "numerics.eps")
            cfg.eps = val == "auto" ? 0.0 : to_double(full, val);
        else if (full == "numerics.alpha")
            cfg.alpha = val == "auto" ? 0.0 : to_double(full, val);
        else if (full == "numerics.horizon") cfg.horizon = to_double(full, val);
        else if (full == "numerics.stability_T") cfg.stability_T = to_double(full, val);
        else if (full == "numerics.direction") cfg.direction = to_vec(full, val);
        else if (full == "numerics.surface_alpha") cfg.surface_alpha = to_double(full, val);
        else if (full == "numerics.surface_half_width")
            cfg.surface_half_width = to_double(full, val);
        else if (full == "numerics.surface_step") cfg.surface_step = to_double(full, val);
        else if (full == "conditions.map_csv") cfg.map_csv = val;
        else if (full == "conditions.variant") {
            if (val != "V" && val != "W")
                throw ConfigFault("config: variant must be V or W");
            cfg.variant = val;
        }
    }
    if (!kind_seen) throw ConfigFault("config: missing experiment.kind");

    const bool needs_geometry = cfg.kind == "surface" || cfg.kind == "conditions" ||
                                cfg.kind == "build-front" ||
                                cfg.kind == "verify-bounds" || cfg.kind == "stability";
    if (needs_geometry && cfg.facet_angles.empty())
        throw ConfigFault("config: kind '" + cfg.kind + "' requires geometry.facets");
    if (needs_geometry && cfg.e0.norm() == 0.0)
        throw ConfigFault("config: kind '" + cfg.kind + "' requires geometry.e0");
    return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFault("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str());
}

std::string ExperimentConfig::echo() const {
    std::ostringstream os;
    os << "[experiment]\n"
       << "kind = " << kind << "\nseed = " << seed << "\nworkers = " << workers
       << "\nout = " << out_dir << "\n\n[medium]\npreset = " << preset
       << "\ndim = " << dim << "\ntheta = " << theta << "\ncontrast = " << contrast
       << "\ndiffusion = " << diffusion << "\nperiod_x = " << periods.x
       << "\nperiod_y = " << periods.y << "\n";
    if (!facet_angles.empty()) {
        os << "\n[geometry]\ne0 = " << e0.x << "," << e0.y << "\nfacets = ";
        for (std::size_t i = 0; i < facet_angles.size(); ++i)
            os << (i ? "," : "") << facet_angles[i];
        os << "\n";
    }
    os << "\n[numerics]\nh = " << h << "\nstrip_length = " << strip_length
       << "\nT = " << T << "\nsnapshot_dt = " << snapshot_dt
       << "\ndirection_count = " << direction_count << "\neps = "
       << (eps > 0 ? std::to_string(eps) : "auto") << "\nalpha = "
       << (alpha > 0 ? std::to_string(alpha) : "auto") << "\nhorizon = " << horizon
       << "\nstability_T = " << stability_T << "\ndirection = " << direction.x << ","
       << direction.y << "\nsurface_alpha = " << surface_alpha
       << "\nsurface_half_width = " << surface_half_width
       << "\nsurface_step = " << surface_step << "\n";
    return os.str();
}

} // namespace rdfront
