#pragma once

#include <array>
#include <vector>

#include "sfp/harmonics.hpp"

namespace sfp {

/// Exact axisymmetric coefficient of the north-pole cap ReLU(z) on S^2:
///   c_l = 2 pi sqrt((2l+1)/4pi) * I_l,  I_l = int_0^1 t P_l(t) dt.
/// I_l has the exact values 1/2 (l=0), 1/3 (l=1), 0 (odd l >= 3) and
///   (-1)^{(l-2)/2} (l-2)! / (2^l (l/2-1)! (l/2+1)!)   for even l >= 2.
/// Signs alternate from l=4 on; magnitudes decay polynomially (~l^{-2}).
double relu_coefficient(int ell);

/// Reference decay model for the cap coefficients:
///   pi/2 (l=0), sqrt(3 pi)/3 (l=1), (sqrt(pi)/24) 2^{-l} sqrt(2l+1)(l^2+3l+2).
/// Agrees with relu_coefficient only at l = 1, 2; used as the l^{5/2}/2^l
/// asymptotic envelope in decay-rate fits and printed next to the exact
/// values by the expand-relu report.
double relu_coefficient_asymptotic(int ell);

/// Oracle: Gauss-Legendre evaluation of 2 pi sqrt((2l+1)/4pi) int_0^1 t P_l dt.
/// The rule must be exact to degree 2l+2 at least.
double relu_coefficient_quadrature(int ell, const GaussLegendreRule& rule);
double relu_coefficient_quadrature(int ell);  // picks a sufficient rule

enum class CapCoefficientKind { exact, asymptotic_model };

struct CapCoefficients {
    int ell_max = 0;
    std::vector<double> c;
};

CapCoefficients cap_coefficients(int ell_max,
                                 CapCoefficientKind kind = CapCoefficientKind::exact);

/// Rotation-mixing element D_{j0}^{(l)}(R_w) under the convention fixed by
///   Y_l^0(R_w^{-1} x) = sum_j D_{j0}^{(l)}(R_w) Y_l^j(x),
/// which resolves (via the addition theorem, verified by the projection
/// oracle) to sqrt(4pi/(2l+1)) * conj(Y_l^j(tau_w, phi_w)).
Complex wigner_d_j0(int ell, int j, const Direction& w);

struct NeuronSpectrum {
    HarmonicSpectrum spectrum;
    Direction direction;
};

/// Global spectrum of a single neuron: coeff(l,j) = c_l D_{j0}^{(l)}(R_w).
NeuronSpectrum neuron_spectrum(const Direction& w, int ell_max);

/// Gradient of c_l D_{j0}^{(l)}(R_w) with respect to the Cartesian components
/// of w, evaluated at ||w|| = 1. Requires w off the poles (sin tau_w > 1e-8).
std::array<Complex, 3> neuron_spectrum_grad(const Direction& w, int ell, int j);

/// Same gradient with an explicit coefficient in place of relu_coefficient(l);
/// lets diagnostics substitute the asymptotic model for rate studies.
std::array<Complex, 3> neuron_spectrum_grad_with_coefficient(const Direction& w,
                                                             int ell, int j,
                                                             double c_ell);

}  // namespace sfp
