#pragma once

#include <bilu/sparse.hpp>

namespace bilu {

/// 7-point finite-difference Laplacian on an nx x ny x nz grid with
/// Dirichlet truncation: 6 on the diagonal, -1 for each axis neighbour that
/// exists. Node (x, y, z) is row x + nx * (y + ny * z).
CsrMatrix gen_poisson_3d(index_t nx, index_t ny, index_t nz);

}  // namespace bilu
