#pragma once

#include "nss/grid.hpp"

// OpenMP pointwise kernels. Serial counterparts live in nss/reference.hpp.
namespace nss::kernels {

/// beta(v) = v / (1 + |v|^2), pointwise.
VectorField2D beta(const VectorField2D& v);

/// sum_{i,j} -1/2 log(1 + |v_{i,j}|^2), without the h^2 weight.
double log_density_sum(const VectorField2D& v);

/// a - b
RealField2D difference(const RealField2D& a, const RealField2D& b);

/// y += alpha * x
void axpy(double alpha, const RealField2D& x, RealField2D& y);

/// u * factor + offset
RealField2D affine(const RealField2D& u, double factor, double offset);

}  // namespace nss::kernels
