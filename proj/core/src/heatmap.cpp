#include "rdfront/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "rdfront/errors.hpp"

namespace rdfront {

void emit_heatmap(const Field& snapshot, const std::string& path) {
    for (double v : snapshot.v)
        if (!std::isfinite(v) || v < -0.1 || v > 1.1)
            throw NumericsFault("heatmap: value outside [-0.1, 1.1]");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFault("heatmap: cannot open " + path);
    const int nx = snapshot.grid.nx(), ny = snapshot.grid.ny();
    out << "P5\n" << nx << " " << ny << "\n255\n";
    std::vector<unsigned char> row(nx);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            double v = std::clamp(snapshot.at(i, j), 0.0, 1.0);
            row[i] = static_cast<unsigned char>(std::lround(v * 255.0));
        }
        out.write(reinterpret_cast<const char*>(row.data()), nx);
    }
    if (!out) throw IoFault("heatmap: write failed for " + path);
}

} // namespace rdfront
