#include "rdfront/snapshot_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "rdfront/csv.hpp"

namespace rdfront {

namespace {

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian; byte swapping not implemented");

void put_u32(std::ofstream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), 4);
}
void put_f64(std::ofstream& out, double v) {
    out.write(reinterpret_cast<const char*>(&v), 8);
}
std::uint32_t get_u32(std::ifstream& in) {
    std::uint32_t v;
    in.read(reinterpret_cast<char*>(&v), 4);
    return v;
}
double get_f64(std::ifstream& in) {
    double v;
    in.read(reinterpret_cast<char*>(&v), 8);
    return v;
}

} // namespace

void write_snapshot(const Field& u, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFault("snapshot: cannot open " + path);
    out.write("RDFRONT1", 8);
    put_u32(out, std::uint32_t(u.grid.dim));
    for (int k = 0; k < u.grid.dim; ++k) {
        put_f64(out, u.grid.a[k]);
        put_f64(out, u.grid.b[k]);
        put_f64(out, u.grid.h[k]);
    }
    put_f64(out, u.t);
    out.write(reinterpret_cast<const char*>(u.v.data()),
              std::streamsize(u.v.size() * 8));
    if (!out) throw IoFault("snapshot: write failed for " + path);
}

Field read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFault("snapshot: cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (std::memcmp(magic, "RDFRONT1", 8) != 0)
        throw IoFault("snapshot: bad magic in " + path);
    int dim = int(get_u32(in));
    if (dim != 1 && dim != 2) throw IoFault("snapshot: bad dim in " + path);
    double a[2] = {0, 0}, b[2] = {0, 0}, h[2] = {0, 0};
    for (int k = 0; k < dim; ++k) {
        a[k] = get_f64(in);
        b[k] = get_f64(in);
        h[k] = get_f64(in);
    }
    double t = get_f64(in);
    Grid g = dim == 1 ? Grid::make_1d(a[0], b[0], h[0], BC::zero_flux, BC::zero_flux)
                      : Grid::make_2d(a[0], b[0], h[0], a[1], b[1], h[1],
                                      BC::zero_flux, BC::zero_flux, BC::zero_flux,
                                      BC::zero_flux);
    Field u(g, 0.0, t);
    in.read(reinterpret_cast<char*>(u.v.data()), std::streamsize(u.v.size() * 8));
    if (!in) throw IoFault("snapshot: truncated data in " + path);
    return u;
}

void write_trajectory(const Trajectory& traj, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoFault("trajectory: cannot create " + dir);
    CsvWriter index(dir + "/index.csv");
    index.header({"index", "time", "filename"});
    char name[64];
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        std::snprintf(name, sizeof name, "snapshot_%05zu.bin", k);
        write_snapshot(traj.snapshots[k], dir + "/" + name);
        index.row({std::to_string(k), format_g17(traj.snapshots[k].t), name}, {});
    }
}

} // namespace rdfront
