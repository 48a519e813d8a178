#pragma once

#include "nss/grid.hpp"
#include "nss/spectral.hpp"

namespace nss {

struct ModelParams {
  double epsilon = 0.05;  ///< transition-layer width, > 0
  double length = 1.0;    ///< domain side L
  double A = 1.0;         ///< Douglas-Dupont regularisation, >= 0

  void validate() const;
};

struct EnergyBreakdown {
  double nonlinear_part = 0.0;  ///< h^2 sum -1/2 ln(1 + |grad u|^2)
  double diffusion_part = 0.0;  ///< eps^2/2 ||Lap u||^2
  double total = 0.0;
};

/// Pointwise v / (1 + |v|^2).
VectorField2D beta(const VectorField2D& v);

/// div_N beta(grad_N u).
RealField2D nonlinear_divergence(const SpectralGrid& ops, const RealField2D& u);
/// Spectrum of div_N beta(grad_N u), optionally 2/3-filtered.
Spectrum2D nonlinear_divergence_spectrum(const SpectralGrid& ops, const RealField2D& u,
                                         bool dealias = false);
/// Same, starting from u_hat = ops.forward(u).
Spectrum2D nonlinear_divergence_spectrum(const SpectralGrid& ops, const Spectrum2D& u_hat,
                                         bool dealias = false);

/// div_N (3 beta(grad u_n) - 3 beta(grad u_nm1) + beta(grad u_nm2)).
RealField2D extrapolated_nonlinear(const SpectralGrid& ops, const RealField2D& u_n,
                                   const RealField2D& u_nm1, const RealField2D& u_nm2);

EnergyBreakdown discrete_energy(const SpectralGrid& ops, const RealField2D& u,
                                const ModelParams& params);

/// E_N(u_np1) + 3/(4dt)|u_np1-u_n|^2 + 1/(6dt)|u_n-u_nm1|^2
///   + 3/2|grad(u_np1-u_n)|^2 + 1/2|grad(u_n-u_nm1)|^2
double modified_energy(const SpectralGrid& ops, const RealField2D& u_np1,
                       const RealField2D& u_n, const RealField2D& u_nm1, double dt,
                       const ModelParams& params);

/// Smallest A for which modified-energy decay is guaranteed: (9/32)(49/16)^4 / eps^2.
double min_stable_A(double epsilon);

/// gamma = L^2/2 (ln(4 eps^2 pi^2 / L^2) - 4 eps^2 pi^2 / L^2 + 1).
double energy_lower_bound(double epsilon, double length);

// Manufactured solution U(x, y, t) = sin(2 pi x / L) cos(2 pi y / L) cos(t).

enum class ForcingMode {
  discrete,  ///< spatial terms from the collocation operators applied to sampled U
  analytic,  ///< spatial terms from closed-form continuum derivatives of U
};

RealField2D exact_profile(double t, const GridSpec& grid);
/// dU/dt sampled on the grid.
RealField2D exact_profile_rate(double t, const GridSpec& grid);

/// f = dU/dt + div beta(grad U) + eps^2 Lap^2 U, so that U solves the forced equation.
/// Time-independent pieces of U are sampled once at construction.
class ManufacturedForcing {
 public:
  ManufacturedForcing(const SpectralGrid& ops, const ModelParams& params,
                      ForcingMode mode = ForcingMode::discrete);

  RealField2D operator()(const SpectralGrid& ops, double t) const;

 private:
  ModelParams params_;
  ForcingMode mode_;
  RealField2D shape_;        // sin(a x) cos(a y)
  RealField2D biharmonic_;   // Lap^2 of shape_
  // analytic mode: Lap S, |grad S|^2 and grad S . (Hess S) grad S
  RealField2D lap_, grad2_, hess_;
};

RealField2D manufactured_forcing(const SpectralGrid& ops, double t, const ModelParams& params,
                                 ForcingMode mode = ForcingMode::discrete);

}  // namespace nss
