#pragma once

#include <cstdint>
#include <optional>

#include "anisodrop/shapes.hpp"
#include "anisodrop/types.hpp"

namespace anisodrop {

/// Parameters of the liquid-drop energies. Exactly one of mass/epsilon is
/// prescribed; the other follows from eps = m^((n+1-alpha)/n).
struct EnergyParams {
  int n = 2;
  double alpha = 1.0;
  double beta = 1.0;  // U2 exponent
  double mass = 1.0;
  double epsilon = 1.0;
  bool mass_given = true;
  std::optional<double> confinement_radius;

  static EnergyParams from_mass(int n, double alpha, double mass);
  static EnergyParams from_epsilon(int n, double alpha, double epsilon);
};

struct QuadratureSpec {
  int angular_order = 12;  // fan nodes per wedge in fixed mode
  int outer_order = 8;     // outer Gauss order per triangle / axis
  double rel_tol = 1e-7;   // adaptive target, relative
  long mc_samples = 10000000;
  std::uint64_t seed = 20240817;
  bool adaptive_fan = true;
};

struct EnergyValue {
  double value = 0.0;
  double error = 0.0;  // node-doubling estimate
};

/// Riesz-type kernel evaluated by the signed radial fan: the radial part of
/// W(u) r^{-q} (or log(f_*(u) r)) integrates in closed form, so only smooth
/// angular integrals remain and the r-singularity never meets a quadrature
/// node.
struct FanKernel {
  double q = 1.0;            // radial exponent, q < 2
  bool log_kernel = false;   // integrand log(f_*(u) r)
  const SurfaceTension* dual_of = nullptr;  // angular gauge; nullptr = 1
  double dual_exponent = 0.0;  // weight f_*(u)^dual_exponent
  bool negate_dir = false;     // gauge evaluated at -u (kernel f_*(x - y)
                               // with y the integration variable)
};

/// integral over E of W((y-x)/|y-x|) |y-x|^{-q} dy (or the log kernel) for a
/// polygonal E; exact in the radial direction for any x, inside or outside.
EnergyValue fan_integral(const Polygon2D& E, const Vec2& x,
                         const FanKernel& kernel, const QuadratureSpec& spec);

/// Interaction energy of an axis-aligned box via the correlation integral
/// and a Duffy split; smooth in the side lengths.
EnergyValue box_interaction(const VecX& sides, double alpha, int order);

/// v_E(x) = integral over E of |x-y|^(-alpha) dy. Checks the ball bound
/// ||v_E||_inf <= n omega_n r^(n-alpha) / (n-alpha) with omega_n r^n = |E|.
double riesz_potential(const Shape& E, const VecX& x, double alpha,
                       const QuadratureSpec& spec);

/// V(E): double integral of the Riesz kernel.
EnergyValue interaction_energy(const Shape& E, double alpha,
                               const QuadratureSpec& spec);

/// V of the region enclosed by a smooth sampled curve, reduced to a double
/// boundary integral through Phi(r) = r^(2-alpha)/(2-alpha)^2 with
/// Delta Phi(|z|) = |z|^(-alpha). O(M^2) and smooth in the curve points, so
/// it is the route of choice inside shape optimizers (n = 2, alpha < 2).
double interaction_energy_boundary(const ClosedCurve& c, double alpha);

/// V_f(E): kernel f_*(x-y)^(-alpha).
EnergyValue interaction_energy_aniso(const Shape& E, const SurfaceTension& f,
                                     double alpha, const QuadratureSpec& spec);

enum class DualPotentialKind { U1 = 1, U2 = 2, U3 = 3 };

struct DualPotentialResult {
  double value = 0.0;
  Vec2 y_star = Vec2::Zero();
  double error = 0.0;
  bool converged = true;
  bool in_paper_range = true;  // U1 outside alpha in (0,1) is flagged
  long evals = 0;
};

/// U_1 = sup_y int_E f_*(x-y)^(-alpha); U_2 = -inf_y int_E f_*(x-y)^beta;
/// U_3 = -inf_y int_E log f_*(x-y). The inner optimization is coordinate
/// descent with shrinking steps from the barycenter, guarded by a 5x5
/// coarse grid over the bounding box.
DualPotentialResult dual_potential(const Shape& E, const SurfaceTension& f,
                                   DualPotentialKind kind, double exponent,
                                   const QuadratureSpec& spec);

struct ConstancyResidual {
  double v_max = 0.0;
  double v_min = 0.0;
  double residual = 0.0;  // v_max - v_min
  double error = 0.0;
};

/// Spread of v_E over >= `boundary_samples` boundary points (Thm direction:
/// zero spread only for balls).
ConstancyResidual potential_constancy_residual(const Shape& E, double alpha,
                                               const QuadratureSpec& spec,
                                               int boundary_samples = 256);

/// c_{n,alpha} = 2 n omega_n^(alpha/n) / (n - alpha).
double riesz_lipschitz_constant(int n, double alpha);

struct LipschitzGap {
  double bound = 0.0;     // c_{n,alpha} m^((n-alpha)/n) |E sym-diff F|
  double gap = 0.0;       // |V(E) - V(F)|
  double sym_diff = 0.0;
  bool holds = false;
};

LipschitzGap lipschitz_gap_bound(const Shape& E, const Shape& F, double alpha,
                                 const QuadratureSpec& spec);

/// 2 omega_{n-1} int int |x-y|^(1-alpha); n = 2, alpha in (0,2).
EnergyValue slicing_interaction_lhs(const Shape& E, double alpha,
                                    const QuadratureSpec& spec);

struct SlicingBound {
  double lhs = 0.0;
  double rhs = 0.0;  // 2 P_f(B_1) m
  bool holds = false;
};

SlicingBound slicing_bound_check(const Shape& E, const SurfaceTension& f,
                                 double alpha, const QuadratureSpec& spec);

/// Worker cap honoring ANISODROP_THREADS (>=1).
int worker_count();

}  // namespace anisodrop
