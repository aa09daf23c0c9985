#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "sfp/network.hpp"
#include "sfp/relu_spectral.hpp"

namespace sfp {

/// Pointwise error D(tau, phi) = forward(params, .) - h.
using ErrorField = std::function<double(const SpherePoint&)>;

ErrorField error_field(const NetworkParams& params, const TargetFunction& h);

/// Spectrum of D = forward - h on the grid.
HarmonicSpectrum error_spectrum(const NetworkParams& params, const TargetFunction& h,
                                const SphereGrid& grid, int ell_max);

/// Quadrature of D(p) * ReLU(w . x(p)) over S^2 (integrand supported on the cap).
double cap_integral_scalar(const ErrorField& D, const Direction& w,
                           const SphereGrid& grid);

/// Quadrature of D(p) * x(p) over the active cap {w . x > 0}.
Vec3 cap_integral_vector(const ErrorField& D, const Direction& w,
                         const SphereGrid& grid);

/// C(h) = int_0^{2pi} int_0^{pi/2} h cos(tau) sin(tau) dtau dphi.
double c_of_h(const TargetFunction& h, int n_tau = 64, int n_phi = 129);
double c_of_h(const std::function<double(const SpherePoint&)>& h, int n_tau = 64,
              int n_phi = 129);

/// D_l = m (2pi/3 sum_k a_k - C(h)) c_l for polar-aligned directions.
/// Throws unless every w_i is aligned with (0,0,1).
std::vector<double> fixed_mode_d_ell(const NetworkParams& params,
                                     const TargetFunction& h,
                                     const SphereGrid& grid, int ell_max);

struct EvolutionTerms {
    int ell_max = 0;
    std::vector<Complex> C;               // flat (l,j) layout
    std::vector<Complex> G;               // zero in fixed mode
    std::vector<std::size_t> skipped;     // neurons skipped in G (polar w)

    Complex c_at(int ell, int j) const { return C[HarmonicSpectrum::flat_index(ell, j)]; }
    Complex g_at(int ell, int j) const { return G[HarmonicSpectrum::flat_index(ell, j)]; }
};

/// Amplitude-update term C(l,j) = -sum_i s_i c_l D_{j0}(R_{w_i}) and rotation
/// term G(l,j) = -sum_i a_i^2 v_i . grad(c_l D_{j0}(R_{w_i})), where s_i / v_i
/// are the exact cap integrals of the current error field.
EvolutionTerms evolution_terms(const NetworkParams& params, const TargetFunction& h,
                               const SphereGrid& grid, int ell_max,
                               CapCoefficientKind kind = CapCoefficientKind::exact);

/// Same computation with the error field pre-evaluated at the grid nodes
/// (cheap enough to call at every recorded epoch).
EvolutionTerms evolution_terms_from_values(const NetworkParams& params,
                                           const std::vector<double>& d_values,
                                           const SphereGrid& grid, int ell_max,
                                           CapCoefficientKind kind =
                                               CapCoefficientKind::exact);

struct DecayFit {
    double exponent = 0.0;
    double r_squared = 0.0;
    int n_points = 0;
};

/// Least squares of log2|v_l| + l = k log2(l) + b over ell_lo..ell_hi.
/// Non-positive values are excluded; fewer than 4 surviving points throws.
DecayFit decay_fit(const std::vector<double>& values_by_ell, int ell_lo, int ell_hi);

enum class FpLabel { adheres, partial, violates };

const char* to_string(FpLabel label);

struct FpVerdict {
    int j = 0;
    FpLabel label = FpLabel::adheres;
    int n_pairs = 0;
    int n_inverted = 0;
    std::vector<std::pair<int, int>> witnesses;             // (l1, l2), l2 first
    std::vector<std::optional<int>> convergence_epoch;      // per ell, index 0..ell_hi
};

/// Trajectory-level FP classification at order j: per degree with initial
/// error >= floor, the first recorded epoch where the error falls to
/// threshold x initial; adheres when those epochs are non-decreasing in ell,
/// violates when at least half of the comparable pairs are inverted.
/// Pairs where neither degree converges compare final/initial ratios.
FpVerdict classify_fp(const ErrorTrace& trace, int j, double threshold = 0.2,
                      double negligible_floor = 1e-8, int ell_lo = 1,
                      int ell_hi = 10);

/// Per-epoch instantaneous inequality series on the real parts of the
/// rate-of-change estimates between consecutive recorded epochs.
struct FpInequalitySample {
    int epoch = 0;
    int ell_lo = 0, ell_hi = 0;
    bool both_decreasing = false;
    bool low_dominates = false;  // |rate(l1)| > |rate(l2)|
};

std::vector<FpInequalitySample> fp_inequality_series(const ErrorTrace& trace, int j,
                                                     int ell_1, int ell_2);

}  // namespace sfp
