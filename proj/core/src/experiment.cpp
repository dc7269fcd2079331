#include "rdfront/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rdfront/csv.hpp"
#include "rdfront/fronts.hpp"
#include "rdfront/geometry.hpp"
#include "rdfront/heatmap.hpp"
#include "rdfront/medium.hpp"
#include "rdfront/pulsating.hpp"
#include "rdfront/snapshot_io.hpp"
#include "rdfront/speed_map.hpp"

namespace rdfront {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Artifacts {
    std::string dir;
    std::vector<std::string> files;

    std::string path(const std::string& name) {
        files.push_back(name);
        return dir + "/" + name;
    }
};

double now_seconds() {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

PeriodicMedium medium_from(const ExperimentConfig& cfg) {
    return make_preset_medium(cfg.preset, cfg.theta, cfg.contrast, cfg.diffusion,
                              cfg.periods, cfg.dim);
}

FrontRunConfig front_run_config(const ExperimentConfig& cfg) {
    FrontRunConfig rc;
    rc.h = cfg.h;
    rc.strip_length = cfg.strip_length;
    rc.T_max = cfg.T;
    rc.snapshot_dt = cfg.snapshot_dt;
    rc.workers = cfg.workers;
    return rc;
}

SpeedMap load_speed_map_csv(const std::string& path, Vec2 e0) {
    std::ifstream in(path);
    if (!in) throw IoFault("conditions: cannot open map csv " + path);
    SpeedMap map;
    map.e0 = e0.normalized();
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
        if (vals.size() < 4) throw IoFault("conditions: malformed map csv row");
        SpeedSample s;
        s.e = map.to_frame(Vec2{vals[0], vals[1]});
        s.c = vals[2];
        s.stderr_ = vals[3];
        s.outcome = FrontOutcome::converged;
        map.samples.push_back(s);
    }
    std::sort(map.samples.begin(), map.samples.end(),
              [](const SpeedSample& a, const SpeedSample& b) {
                  return std::atan2(a.e.y, a.e.x) < std::atan2(b.e.y, b.e.x);
              });
    return map;
}

// Facet fronts needed by an assembly; homogeneous media reuse one run.
std::vector<PulsatingFront> facet_fronts(const PeriodicMedium& medium,
                                         const PolytopeSpec& poly,
                                         const ExperimentConfig& cfg) {
    std::vector<PulsatingFront> fronts;
    ValidationReport vr = validate_medium(medium, 8);
    FrontRunConfig rc = front_run_config(cfg);
    if (vr.homogeneous) {
        PulsatingFront f = compute_front(medium, poly.from_frame(poly.facets[0]), rc);
        fronts.push_back(std::move(f));
        return fronts;
    }
    for (int i = 0; i < poly.n(); ++i)
        fronts.push_back(compute_front(medium, poly.from_frame(poly.facets[i]), rc));
    return fronts;
}

SpeedMap map_for(const PeriodicMedium& medium, const ExperimentConfig& cfg) {
    if (!cfg.map_csv.empty()) return load_speed_map_csv(cfg.map_csv, cfg.e0);
    return build_speed_map(medium, cfg.e0, cfg.direction_count, front_run_config(cfg),
                           cfg.workers);
}

const char* outcome_str(FrontOutcome o) {
    switch (o) {
        case FrontOutcome::converged: return "converged";
        case FrontOutcome::near_stationary: return "near-stationary";
        default: return "no-front-detected";
    }
}

void write_profile_file(const PulsatingFront& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFault("profile: cannot open " + path);
    out.write("RDPROFL1", 8);
    auto put_u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<char*>(&v), 4); };
    auto put_f64 = [&](double v) { out.write(reinterpret_cast<char*>(&v), 8); };
    put_u32(std::uint32_t(f.table.dim));
    put_f64(f.direction.x);
    put_f64(f.direction.y);
    put_f64(f.speed);
    put_f64(f.shift);
    put_u32(std::uint32_t(f.table.n_xi));
    put_f64(f.table.xi0);
    put_f64(f.table.dxi);
    put_u32(std::uint32_t(f.table.cells[0]));
    put_u32(std::uint32_t(f.table.cells[1]));
    put_f64(f.table.cell_h.x);
    put_f64(f.table.cell_h.y);
    out.write(reinterpret_cast<const char*>(f.table.U.data()),
              std::streamsize(f.table.U.size() * 8));
    if (!out) throw IoFault("profile: write failed for " + path);
}

} // namespace

std::string file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFault("checksum: cannot open " + path);
    std::uint64_t h = 1469598103934665603ULL;
    char buf[8192];
    while (in.read(buf, sizeof buf) || in.gcount()) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
    }
    char hex[20];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
    RunResult result;
    result.out_dir = cfg.out_dir;
    Artifacts art{cfg.out_dir, {}};
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) {
        result.status = 1;
        result.fault = "cannot create output directory " + cfg.out_dir;
        return result;
    }

    double t_start = now_seconds();
    std::ostringstream timings;
    auto assert_line = [&](const std::string& name, bool ok) {
        result.assertions.push_back({name, ok});
    };

    try {
        PeriodicMedium medium = medium_from(cfg);

        if (cfg.kind == "validate-medium") {
            ValidationReport rep = validate_medium(medium, 16);
            std::ofstream txt(art.path("validation.txt"));
            txt << rep.summary();
            CsvWriter csv(art.path("checks.csv"));
            csv.header({"check", "pass", "margin", "witness_x", "witness_y"});
            for (const auto& c : rep.checks)
                csv.row({c.name, c.pass ? "1" : "0"},
                        {c.margin, c.witness.x, c.witness.y});
            for (const auto& c : rep.checks) assert_line(c.name, c.pass);
            assert_line("H1 integral sign determined", !rep.h1_boundary);
        } else if (cfg.kind == "front-speed") {
            PulsatingFront f = compute_front(medium, cfg.direction, front_run_config(cfg));
            CsvWriter csv(art.path("speed.csv"));
            csv.header({"outcome", "e_x", "e_y", "speed", "stderr"});
            csv.row({outcome_str(f.outcome)},
                    {f.direction.x, f.direction.y, f.speed, f.speed_stderr});
            CsvWriter diag(art.path("diagnostics.csv"));
            diag.header({"shift", "decay_mu", "decay_C", "decay_r2", "delta",
                         "interior_r"});
            diag.row({f.shift, f.decay_mu, f.decay_C, f.decay_r2, f.delta,
                      f.interior_r});
            if (f.has_profile()) write_profile_file(f, art.path("profile.bin"));
            assert_line("front detected", f.outcome != FrontOutcome::no_front);
        } else if (cfg.kind == "speed-map") {
            SpeedMap map = map_for(medium, cfg);
            CsvWriter csv(art.path("speedmap.csv"));
            csv.header({"e_x", "e_y", "speed", "stderr", "g"});
            for (const auto& s : map.samples) {
                Vec2 ew = map.from_frame(s.e);
                double g = s.e.y > 0.05 ? s.c / s.e.y : 0.0;
                csv.row({ew.x, ew.y, s.c, s.stderr_, g});
            }
            assert_line("map complete", !map.partial);
        } else if (cfg.kind == "surface") {
            PolytopeSpec poly = build_polytope_from_angles(cfg.e0, cfg.facet_angles);
            CsvWriter csv(art.path("surface.csv"));
            csv.header({"x", "phi", "dphi", "h", "e_x", "e_y"});
            for (double x = -cfg.surface_half_width; x <= cfg.surface_half_width + 1e-12;
                 x += cfg.surface_step) {
                SurfaceEval ev = surface_height(poly, x, cfg.surface_alpha);
                csv.row({x, ev.phi_scaled, ev.dphi, ev.h, ev.normal.x, ev.normal.y});
            }
            assert_line("surface sampled", true);
        } else if (cfg.kind == "conditions") {
            PolytopeSpec poly = build_polytope_from_angles(cfg.e0, cfg.facet_angles);
            SpeedMap map = map_for(medium, cfg);
            TheoremVariant variant = cfg.variant == "W" ? TheoremVariant::existence_W
                                                        : TheoremVariant::existence_V;
            ConditionReport rep = check_theorem_conditions(map, poly, variant);
            std::ofstream txt(art.path("conditions.txt"));
            txt << rep.summary();
            CsvWriter csv(art.path("conditions.csv"));
            csv.header({"condition", "verdict", "value"});
            auto vs = [](Verdict v) {
                return v == Verdict::pass ? "pass"
                                          : (v == Verdict::fail ? "fail" : "indeterminate");
            };
            csv.row({"i", vs(rep.cond_i)}, {0.0});
            csv.row({"ii", vs(rep.cond_ii)}, {rep.dev_ii});
            csv.row({"iii", vs(rep.cond_iii)}, {rep.margin_iii});
            csv.row({"iv", vs(rep.cond_iv)}, {rep.noise_floor_iv});
            assert_line("conditions pass", rep.pass());
        } else if (cfg.kind == "verify-bounds" || cfg.kind == "build-front" ||
                   cfg.kind == "stability") {
            PolytopeSpec poly = build_polytope_from_angles(cfg.e0, cfg.facet_angles);
            SpeedMap map = map_for(medium, cfg);
            FrontVariant variant = cfg.variant == "W" ? FrontVariant::W_family
                                                      : FrontVariant::V_family;
            std::vector<PulsatingFront> fronts = facet_fronts(medium, poly, cfg);
            FrontAssembly assembly =
                FrontAssembly::build(medium, poly, map, fronts, variant);

            CalibrationResult cal;
            if (cfg.eps > 0 && cfg.alpha > 0) {
                assembly.set_eps_alpha(cfg.eps, cfg.alpha);
                cal.eps = cfg.eps;
                cal.alpha = cfg.alpha;
                cal.ok = true;
            } else {
                cal = calibrate_eps_alpha(assembly);
            }
            {
                CsvWriter csv(art.path("calibration.csv"));
                csv.header({"eps", "alpha", "worst_super", "worst_sub", "ok"});
                for (const auto& e : cal.scan)
                    csv.row({e.eps, e.alpha, e.worst_super, e.worst_sub,
                             e.ok ? 1.0 : 0.0});
            }
            assert_line("calibration admits (eps, alpha)", cal.ok);

            if (cfg.kind == "verify-bounds") {
                std::vector<double> lattice;
                for (double x = -20.0; x <= 20.0; x += 0.25) lattice.push_back(x);
                MarginReport mr = verify_speed_margin(assembly, lattice);
                CsvWriter csv(art.path("margins.csv"));
                csv.header({"min_ratio", "at_x", "points", "vacuous", "pass"});
                csv.row({mr.min_ratio, mr.at_x, double(mr.points),
                         mr.vacuous ? 1.0 : 0.0, mr.pass ? 1.0 : 0.0});
                assert_line("speed margin positive", mr.pass);
            } else if (cfg.kind == "build-front") {
                WindowSpec window;
                window.workers = cfg.workers;
                FrontBundle bundle = construct_front(assembly, cfg.horizon, window);
                Trajectory traj;
                traj.snapshots = bundle.kept;
                traj.dt = window.keep_dt;
                write_trajectory(traj, art.dir + "/snapshots");
                art.files.push_back("snapshots/index.csv");
                {
                    CsvWriter csv(art.path("interfaces.csv"));
                    csv.header({"t", "x", "y"});
                    for (const auto& [t, pts] : bundle.interfaces)
                        for (const Vec2& p : pts) csv.row({t, p.x, p.y});
                }
                TransitionMetrics tm =
                    transition_metrics(bundle, assembly, {0.2, 0.1, 0.05});
                {
                    CsvWriter csv(art.path("metrics.csv"));
                    csv.header({"eps", "M", "drift_speed", "inf_rate"});
                    for (const auto& [e, M] : tm.M_of_eps)
                        csv.row({e, M, tm.drift_speed, tm.inf_distance_rate});
                }
                emit_heatmap(bundle.final_field, art.path("final.pgm"));
                assert_line("sandwich lower", bundle.min_gap_lower >= -1e-8);
                assert_line("sandwich upper", bundle.min_gap_upper >= -1e-8);
                assert_line("monotone in time", bundle.min_monotone >= -1e-8);
                assert_line("drift speed within 2% of chat",
                            std::abs(tm.drift_speed - bundle.chat) <=
                                0.02 * std::abs(bundle.chat));
            } else { // stability
                WindowSpec window;
                window.workers = cfg.workers;
                FrontBundle bundle = construct_front(assembly, cfg.horizon, window);
                SpaceTimeFn u0 = [&assembly](double, Vec2 p) {
                    Vec2 pf = assembly.poly().to_frame(p);
                    double bump = 0.2 * std::exp(-0.25 * pf.dot(pf));
                    return std::clamp(assembly.planar_mix(0.0, p) + bump, 0.0, 1.0);
                };
                StabilityConfig scfg;
                scfg.T = cfg.stability_T;
                scfg.window.workers = cfg.workers;
                StabilitySeries series = run_stability(assembly, bundle, u0, scfg);
                CsvWriter csv(art.path("stability.csv"));
                csv.header({"t", "s", "tau"});
                for (std::size_t k = 0; k < series.t.size(); ++k)
                    csv.row({series.t[k], series.s[k], series.tau[k]});
                assert_line("gap below threshold", series.s_final <= scfg.gap_threshold);
                assert_line("eventually decreasing", series.eventually_decreasing);
            }
        } else {
            throw ConfigFault("unknown experiment kind " + cfg.kind);
        }
    } catch (const Fault& f) {
        result.fault = f.what();
        result.status = 1;
    }

    timings << "total_seconds = " << now_seconds() - t_start << "\n";

    // summary.txt: one pass/fail line per assertion
    {
        std::ofstream sum(cfg.out_dir + "/summary.txt");
        for (const auto& [name, ok] : result.assertions) {
            sum << (ok ? "[pass] " : "[FAIL] ") << name << "\n";
            if (!ok) result.status = 1;
        }
        if (!result.fault.empty()) sum << "[FAIL] fault: " << result.fault << "\n";
    }
    art.files.push_back("summary.txt");

    // manifest.txt: config echo, version, timings, artifact checksums
    {
        std::ofstream man(cfg.out_dir + "/manifest.txt");
        man << "rdfront " << kVersion << "\n\n--- config ---\n" << cfg.echo();
        man << "\n--- timings ---\n" << timings.str();
        if (!result.fault.empty()) man << "\n--- fault ---\n" << result.fault << "\n";
        man << "\n--- artifacts ---\n";
        for (const auto& f : art.files) {
            std::string full = cfg.out_dir + "/" + f;
            if (fs::exists(full)) man << f << "  " << file_checksum(full) << "\n";
        }
    }
    return result;
}

} // namespace rdfront
