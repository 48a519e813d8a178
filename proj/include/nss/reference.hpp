#pragma once

#include "nss/grid.hpp"
#include "nss/model.hpp"
#include "nss/stepper.hpp"

// Serial reference implementation: direct (matrix) DFTs and plain loops, no
// FFTW and no OpenMP. Slow, O(N^3) per transform; used as a test oracle and as
// the baseline in the benchmarks.
namespace nss::reference {

Spectrum2D forward(const RealField2D& f);
RealField2D inverse(const Spectrum2D& s);

VectorField2D gradient(const RealField2D& f);
RealField2D divergence(const VectorField2D& v);
RealField2D laplacian(const RealField2D& f);
RealField2D biharmonic(const RealField2D& f);

VectorField2D beta(const VectorField2D& v);
RealField2D nonlinear_divergence(const RealField2D& u);
double discrete_energy(const RealField2D& u, const ModelParams& params);

/// One BDF3 step computed straight from the update formula (no caching).
HistoryWindow step(const HistoryWindow& window, const SchemeConfig& config, double dt);

}  // namespace nss::reference
