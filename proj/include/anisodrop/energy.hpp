#pragma once

#include "anisodrop/nonlocal.hpp"

namespace anisodrop {

enum class NonlocalTerm { V, Vf, U1, U2, U3 };

struct EnergyBreakdown {
  double perimeter = 0.0;
  double nonlocal = 0.0;
  double weight = 1.0;  // epsilon in the rescaled form, 1 in the mass form
  double total = 0.0;   // perimeter + weight * nonlocal, exactly
  double error = 0.0;
  bool rescaled = false;
};

/// P_f(E) + weight * (nonlocal term). The workhorse behind the CLI and the
/// optimizers.
EnergyBreakdown energy_with_term(const Shape& E, const SurfaceTension& f,
                                 NonlocalTerm term, double weight,
                                 const EnergyParams& params,
                                 const QuadratureSpec& spec);

/// The aniso-drop energy in both forms: E_f(E) = P_f + V at the shape's own
/// mass, and the rescaled E_{eps,f} on the volume-1 dilate with
/// eps = m^((n+1-alpha)/n). mass_total = m^((n-1)/n) * rescaled_total.
struct TotalEnergy {
  EnergyBreakdown mass_form;
  EnergyBreakdown rescaled_form;
};

TotalEnergy total_energy(const Shape& E, const SurfaceTension& f,
                         const EnergyParams& params,
                         const QuadratureSpec& spec);

/// E_{eps,f}(R_a) = (a + 1/a) + eps V(R_a) on the volume-1 rectangle family.
double rectangle_energy(double a, double alpha, double eps,
                        const QuadratureSpec& spec);

/// The box family of the half-l1 tension: free sides s_1..s_{n-1}, last side
/// 1/prod(s). Perimeter term is the exact facet sum.
double box_energy(const VecX& free_sides, int n, double alpha, double eps,
                  const QuadratureSpec& spec);

/// Anisotropic curvature H^f = div^dE (grad f o nu) along a sampled smooth
/// curve, via FD4 in the curve parameter; equals (n-1)/r on dilated Wulff
/// boundaries.
VecX aniso_curvature(const ClosedCurve& c, const SurfaceTension& f);

struct VariationReport {
  VecX arclength;   // cumulative boundary parameter per sample
  VecX curvature;   // H^f
  VecX potential;   // v_E
  VecX combined;    // g = H^f + eps v_E
  double mu_hat = 0.0;    // weighted mean of g (Lagrange multiplier estimate)
  double residual = 0.0;  // max g - min g
  double stddev = 0.0;    // weighted standard deviation of g
};

/// Euler-Lagrange residual of the rescaled energy on the boundary of E.
VariationReport el_residual(const Shape& E, const SurfaceTension& f,
                            const EnergyParams& params,
                            const QuadratureSpec& spec, int samples = 512);

/// Analytic first variations of U_i at K along u nu_K: +int u for U1,
/// -int u for U2 (U2 carries a leading minus sign), 0 for U3.
double first_variation_Ui(const WulffShape& K, const VecX& u,
                          DualPotentialKind kind);

/// Central-difference companion at t = +-fd_step on the star family.
double fd_first_variation_Ui(const WulffShape& K, const VecX& u,
                             DualPotentialKind kind, double exponent,
                             const QuadratureSpec& spec,
                             double fd_step = 1e-3);

struct FugledeReport {
  double deficit = 0.0;  // P_f(E) - P_f(K) after volume + barycenter fixes
  double h1_sq = 0.0;    // ||u||^2_{H^1(dK)} of the corrected graph field
  double ratio = 0.0;    // deficit / h1_sq; meaningless when degenerate
  bool degenerate = false;
  StarNorms corrected_norms;
};

/// Quantitative-isoperimetry diagnostic: volume-renormalizes (by dilation)
/// and recenters the star perturbation, reprojects it as a graph over dK,
/// and reports the perimeter deficit against ||u||_{H^1}^2.
FugledeReport fuglede_ratio(const WulffShape& K, const VecX& u,
                            const SurfaceTension& f);

/// Graph offsets of a closed curve over dK: intersects each normal ray with
/// the curve polyline. Throws ConvergenceError when the curve is not a
/// graph within half the inradius.
VecX reproject_graph(const WulffShape& K, const ClosedCurve& target);

/// N^(1/n) |K|^(1/n) n + eps c_{n,alpha} N^((alpha-n)/n): the split-into-N
/// components upper bound.
double split_bound_energy(long N, double eps, double alpha, int n,
                          double wulff_volume);

struct SplitBoundMin {
  long argmin = 1;
  double value = 0.0;
};

SplitBoundMin minimize_split_bound(double eps, double alpha, int n,
                                   double wulff_volume, long n_max = 1000000);

}  // namespace anisodrop
