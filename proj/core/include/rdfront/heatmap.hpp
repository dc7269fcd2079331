#ifndef RDFRONT_HEATMAP_HPP
#define RDFRONT_HEATMAP_HPP

#include <string>

#include "rdfront/grid.hpp"

namespace rdfront {

/**
 * Grayscale portable-pixmap image of a field: linear map [0,1] -> [black,
 * white], row order matching grid rows. Values outside the divergence
 * guard band [-0.1, 1.1] fault.
 */
void emit_heatmap(const Field& snapshot, const std::string& path);

} // namespace rdfront

#endif
