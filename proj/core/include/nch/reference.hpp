#pragma once

#include <vector>

#include "nch/grid.hpp"
#include "nch/kernel.hpp"

/// Dense O(N^2)-storage counterparts of the spectral operators, assembled
/// from their defining sums without any FFT. For cross-checking on small
/// grids only.
namespace nch::reference {

/// Row-major (nx ny) x (nx ny) matrix of the spectral Laplacian.
std::vector<double> laplacian_matrix(const PeriodicGrid& grid);

/// Row-major matrix of L_N = (J*1) I - hx hy [J_{a-b}].
std::vector<double> nonlocal_matrix(const Kernel& kernel);

/// Solves [I - dt Lap (A I + eps^2 L)] u = u_n + dt Lap (u_n^3 - u_n - A u_n)
/// with a dense LU factorization.
GridFunction dense_step(const GridFunction& u_n, const Kernel& kernel,
                        double epsilon, double dt, double a);

}  // namespace nch::reference
