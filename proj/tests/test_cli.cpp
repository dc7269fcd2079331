#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rdfront/config.hpp"
#include "rdfront/experiment.hpp"
#include "rdfront/heatmap.hpp"

using namespace rdfront;
namespace fs = std::filesystem;

namespace {

std::string scratch_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("rdfront_cli_" + name);
    fs::remove_all(p);
    return p.string();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(bool(in));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("config parse and schema enforcement") {
    auto cfg = ExperimentConfig::parse_text(
        "[experiment]\nkind = surface\nseed = 7\n"
        "[geometry]\ne0 = 0,1\nfacets = 45, 135\n"
        "[numerics]\nsurface_alpha = 1\nsurface_half_width = 5\n");
    CHECK(cfg.kind == "surface");
    CHECK(cfg.seed == 7);
    CHECK(cfg.facet_angles.size() == 2);

    CHECK_THROWS_AS(ExperimentConfig::parse_text("[experiment]\nkind = surface\n"
                                                 "[geometry]\ne0 = 0,1\n"
                                                 "facets = 45,135\nbogus = 1\n"),
                    ConfigFault);
    CHECK_THROWS_AS(ExperimentConfig::parse_text("[experiment]\nseed = 1\n"),
                    ConfigFault);
    CHECK_THROWS_AS(ExperimentConfig::parse_text("[experiment]\nkind = wat\n"),
                    ConfigFault);
    // missing e0/facets for geometry kinds
    CHECK_THROWS_AS(ExperimentConfig::parse_text("[experiment]\nkind = surface\n"),
                    ConfigFault);
}

TEST_CASE("surface experiment emits the closed form") {
    ExperimentConfig cfg = ExperimentConfig::parse_text(
        "[experiment]\nkind = surface\n"
        "[geometry]\ne0 = 0,1\nfacets = 45,135\n"
        "[numerics]\nsurface_alpha = 1\nsurface_half_width = 4\nsurface_step = 0.5\n");
    cfg.out_dir = scratch_dir("surface");
    RunResult res = run_experiment(cfg);
    REQUIRE(res.status == 0);

    std::ifstream in(cfg.out_dir + "/surface.csv");
    REQUIRE(bool(in));
    std::string line;
    std::getline(in, line); // header
    int rows = 0;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
        REQUIRE(v.size() == 6);
        double expect = std::sqrt(2.0) * std::log(2.0 * std::cosh(v[0] / std::sqrt(2.0)));
        CHECK(std::abs(v[1] - expect) <= 1e-10);
        ++rows;
    }
    CHECK(rows == 17);
    CHECK(fs::exists(cfg.out_dir + "/manifest.txt"));
    CHECK(fs::exists(cfg.out_dir + "/summary.txt"));
}

TEST_CASE("identical config and seed give bit-identical CSV artifacts") {
    auto run_once = [&](const std::string& tag) {
        ExperimentConfig cfg = ExperimentConfig::parse_text(
            "[experiment]\nkind = surface\nseed = 3\n"
            "[geometry]\ne0 = 0,1\nfacets = 40,90,140\n"
            "[numerics]\nsurface_alpha = 0.5\nsurface_half_width = 6\n"
            "surface_step = 0.25\n");
        cfg.out_dir = scratch_dir("det_" + tag);
        RunResult res = run_experiment(cfg);
        REQUIRE(res.status == 0);
        return file_checksum(cfg.out_dir + "/surface.csv");
    };
    CHECK(run_once("a") == run_once("b"));
}

TEST_CASE("validate-medium experiment") {
    ExperimentConfig cfg = ExperimentConfig::parse_text(
        "[experiment]\nkind = validate-medium\n"
        "[medium]\npreset = cubic-striped\ntheta = 0.3\ncontrast = 0.1\ndim = 2\n");
    cfg.out_dir = scratch_dir("validate");
    RunResult res = run_experiment(cfg);
    CHECK(res.status == 0);
    std::string summary = read_file(cfg.out_dir + "/summary.txt");
    CHECK(summary.find("[pass]") != std::string::npos);
    CHECK(summary.find("[FAIL]") == std::string::npos);
}

TEST_CASE("front-speed experiment on a short 1D run") {
    ExperimentConfig cfg = ExperimentConfig::parse_text(
        "[experiment]\nkind = front-speed\n"
        "[medium]\npreset = cubic-homogeneous\ntheta = 0.25\ndim = 1\n"
        "[numerics]\nh = 0.1\nstrip_length = 50\nT = 120\ndirection = 1,0\n");
    cfg.out_dir = scratch_dir("speed");
    RunResult res = run_experiment(cfg);
    REQUIRE(res.fault.empty());
    REQUIRE(res.status == 0);
    std::string csv = read_file(cfg.out_dir + "/speed.csv");
    CHECK(csv.find("converged") != std::string::npos);
    CHECK(fs::exists(cfg.out_dir + "/profile.bin"));
    std::string bin = read_file(cfg.out_dir + "/profile.bin");
    CHECK(bin.substr(0, 8) == "RDPROFL1");
}

TEST_CASE("conditions experiment from a stored speed map") {
    std::string dir = scratch_dir("conditions");
    fs::create_directories(dir);
    {
        std::ofstream map(dir + "/map.csv");
        map << "e_x,e_y,speed,stderr,g\n";
        for (int k = 1; k <= 16; ++k) {
            double b = M_PI * k / 17.0;
            map << std::cos(b) << "," << std::sin(b) << ",0.35355339059327373,1e-4,0\n";
        }
    }
    ExperimentConfig cfg = ExperimentConfig::parse_text(
        "[experiment]\nkind = conditions\n"
        "[geometry]\ne0 = 0,1\nfacets = 45,135\n"
        "[conditions]\nmap_csv = " + dir + "/map.csv\nvariant = V\n");
    cfg.out_dir = dir;
    RunResult res = run_experiment(cfg);
    REQUIRE(res.fault.empty());
    CHECK(res.status == 0);
    std::string txt = read_file(dir + "/conditions.txt");
    CHECK(txt.find("(iv)") != std::string::npos);
}

TEST_CASE("faults surface in the manifest and exit status") {
    ExperimentConfig cfg = ExperimentConfig::parse_text(
        "[experiment]\nkind = conditions\n"
        "[geometry]\ne0 = 0,1\nfacets = 45,135\n"
        "[conditions]\nmap_csv = /nonexistent/map.csv\n");
    cfg.out_dir = scratch_dir("fault");
    RunResult res = run_experiment(cfg);
    CHECK(res.status == 1);
    CHECK(!res.fault.empty());
    std::string man = read_file(cfg.out_dir + "/manifest.txt");
    CHECK(man.find("fault") != std::string::npos);
}

TEST_CASE("heatmap endpoints and guard") {
    Grid g = Grid::make_2d(0, 1, 0.5, 0, 1, 0.5, BC::zero_flux, BC::zero_flux,
                           BC::zero_flux, BC::zero_flux);
    std::string dir = scratch_dir("heatmap");
    fs::create_directories(dir);

    Field black(g, 0.0);
    emit_heatmap(black, dir + "/black.pgm");
    std::string pb = read_file(dir + "/black.pgm");
    CHECK(pb.substr(0, 2) == "P5");
    for (int k = 0; k < 9; ++k)
        CHECK(static_cast<unsigned char>(pb[pb.size() - 9 + k]) == 0);

    Field white(g, 1.0);
    emit_heatmap(white, dir + "/white.pgm");
    std::string pw = read_file(dir + "/white.pgm");
    for (int k = 0; k < 9; ++k)
        CHECK(static_cast<unsigned char>(pw[pw.size() - 9 + k]) == 255);

    Field bad(g, 1.5);
    CHECK_THROWS_AS(emit_heatmap(bad, dir + "/bad.pgm"), NumericsFault);
}

TEST_CASE("manifest lists artifacts with checksums") {
    ExperimentConfig cfg = ExperimentConfig::parse_text(
        "[experiment]\nkind = surface\n"
        "[geometry]\ne0 = 0,1\nfacets = 45,135\n"
        "[numerics]\nsurface_half_width = 2\nsurface_step = 0.5\n");
    cfg.out_dir = scratch_dir("manifest");
    RunResult res = run_experiment(cfg);
    REQUIRE(res.status == 0);
    std::string man = read_file(cfg.out_dir + "/manifest.txt");
    CHECK(man.find("surface.csv") != std::string::npos);
    CHECK(man.find("summary.txt") != std::string::npos);
    // checksum field is 16 hex chars
    auto pos = man.find("surface.csv");
    auto hex = man.substr(man.find("  ", pos) + 2, 16);
    CHECK(hex.find_first_not_of("0123456789abcdef") == std::string::npos);
}
