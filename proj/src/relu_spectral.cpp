#include "sfp/relu_spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace sfp {

namespace {

// I_l = int_0^1 t P_l(t) dt through the stable route
//   (2l+1) t P_l = (l+1) P_{l+1} + l P_{l-1}
//   int_0^1 P_k = [P_{k-1}(0) - P_{k+1}(0)] / (2k+1)
// with P_k(0) by downward products. Avoids factorial overflow entirely.
double legendre_at_zero(int k) {
    if (k % 2 == 1) return 0.0;
    double p = 1.0;
    for (int i = 2; i <= k; i += 2) p *= -(i - 1.0) / i;
    return p;
}

double unit_interval_legendre_moment(int ell) {
    if (ell == 0) return 0.5;
    if (ell == 1) return 1.0 / 3.0;
    if (ell % 2 == 1) return 0.0;
    const auto A = [](int k) {  // int_0^1 P_k, k odd here
        return (legendre_at_zero(k - 1) - legendre_at_zero(k + 1)) / (2.0 * k + 1.0);
    };
    return ((ell + 1.0) * A(ell + 1) + ell * A(ell - 1)) / (2.0 * ell + 1.0);
}

double front_factor(int ell) {
    return 2.0 * M_PI * std::sqrt((2.0 * ell + 1.0) / (4.0 * M_PI));
}

}  // namespace

double relu_coefficient(int ell) {
    if (ell < 0) throw std::invalid_argument("relu_coefficient: ell must be >= 0");
    return front_factor(ell) * unit_interval_legendre_moment(ell);
}

double relu_coefficient_asymptotic(int ell) {
    if (ell < 0)
        throw std::invalid_argument("relu_coefficient_asymptotic: ell must be >= 0");
    if (ell == 0) return M_PI / 2.0;
    if (ell == 1) return std::sqrt(3.0 * M_PI) / 3.0;
    return std::sqrt(M_PI) / 24.0 * std::pow(0.5, ell) *
           std::sqrt(2.0 * ell + 1.0) *
           (static_cast<double>(ell) * ell + 3.0 * ell + 2.0);
}

double relu_coefficient_quadrature(int ell, const GaussLegendreRule& rule) {
    if (ell < 0)
        throw std::invalid_argument("relu_coefficient_quadrature: ell must be >= 0");
    if (rule.exactness_degree() < 2 * ell + 2)
        throw std::invalid_argument(
            "relu_coefficient_quadrature: rule exactness below 2*ell+2");
    // t = (x+1)/2 maps [-1,1] -> [0,1], dt = dx/2.
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double t = 0.5 * (rule.nodes[i] + 1.0);
        // P_l(t) by the plain recurrence
        double p0 = 1.0, p1 = t;
        double p = (ell == 0) ? 1.0 : t;
        for (int k = 2; k <= ell; ++k) {
            p = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p;
        }
        sum += rule.weights[i] * 0.5 * t * p;
    }
    return front_factor(ell) * sum;
}

double relu_coefficient_quadrature(int ell) {
    return relu_coefficient_quadrature(ell, gauss_legendre(ell + 2));
}

CapCoefficients cap_coefficients(int ell_max, CapCoefficientKind kind) {
    if (ell_max < 0)
        throw std::invalid_argument("cap_coefficients: ell_max must be >= 0");
    CapCoefficients out;
    out.ell_max = ell_max;
    out.c.resize(static_cast<std::size_t>(ell_max + 1));
    for (int l = 0; l <= ell_max; ++l)
        out.c[l] = (kind == CapCoefficientKind::exact)
                       ? relu_coefficient(l)
                       : relu_coefficient_asymptotic(l);
    return out;
}

Complex wigner_d_j0(int ell, int j, const Direction& w) {
    if (std::abs(j) > ell)
        throw std::invalid_argument("wigner_d_j0: requires |j| <= ell");
    const SpherePoint angles = from_cartesian(w.v);
    return std::sqrt(4.0 * M_PI / (2.0 * ell + 1.0)) *
           std::conj(sph_harm(ell, j, angles));
}

NeuronSpectrum neuron_spectrum(const Direction& w, int ell_max) {
    NeuronSpectrum out{HarmonicSpectrum(ell_max), w};
    const SpherePoint angles = from_cartesian(w.v);
    const std::vector<Complex> y = sph_harm_table(ell_max, angles);
    for (int l = 0; l <= ell_max; ++l) {
        const double cl = relu_coefficient(l);
        if (cl == 0.0) continue;
        const double f = cl * std::sqrt(4.0 * M_PI / (2.0 * l + 1.0));
        for (int j = -l; j <= l; ++j)
            out.spectrum.at(l, j) =
                f * std::conj(y[HarmonicSpectrum::flat_index(l, j)]);
    }
    return out;
}

std::array<Complex, 3> neuron_spectrum_grad(const Direction& w, int ell, int j) {
    return neuron_spectrum_grad_with_coefficient(w, ell, j, relu_coefficient(ell));
}

std::array<Complex, 3> neuron_spectrum_grad_with_coefficient(const Direction& w,
                                                             int ell, int j,
                                                             double c_ell) {
    if (std::abs(j) > ell)
        throw std::invalid_argument("neuron_spectrum_grad: requires |j| <= ell");
    const double r = w.v.norm();
    const double ct = w.v.z / r;
    const double st2 = (w.v.x * w.v.x + w.v.y * w.v.y) / (r * r);
    if (st2 <= 1e-16)
        throw std::invalid_argument("neuron_spectrum_grad: polar direction");
    const double st = std::sqrt(st2);
    const double phi = std::atan2(w.v.y, w.v.x);
    const double cp = std::cos(phi), sp = std::sin(phi);
    const double cl = c_ell;
    if (cl == 0.0 || ell == 0) return {Complex{}, Complex{}, Complex{}};

    const int m = std::abs(j);
    // Both bracket terms carry the degree-l normalization N_l^m.
    const double nlm = sph_harm_norm(ell, m);
    const double np_l = nlm * assoc_legendre(ell, m, ct);
    const double np_lm1 = (m <= ell - 1) ? nlm * assoc_legendre(ell - 1, m, ct) : 0.0;

    // N_l^m d/dtau P_l^m(cos tau) = [l ct (N P_l^m) - (l+m) (N P_{l-1}^m)] / st
    const double ndp = (ell * ct * np_l - (ell + m) * np_lm1) / st;

    const Complex eim = std::polar(1.0, m * phi);
    const Complex dy_dtau = ndp * eim;                       // dY_l^m/dtau
    const Complex y = np_l * eim;                            // Y_l^m
    const Complex dy_dphi = Complex(0.0, static_cast<double>(m)) * y;

    // grad tau = e_tau / r, grad phi = e_phi / (r sin tau)
    const Vec3 e_tau{ct * cp / r, ct * sp / r, -st / r};
    const Vec3 e_phi_scaled{-sp / (r * st), cp / (r * st), 0.0};

    const double f = cl * std::sqrt(4.0 * M_PI / (2.0 * ell + 1.0));
    // d/dw [ f conj(Y_l^m(tau(w), phi(w))) ]
    std::array<Complex, 3> g;
    const Complex ct_term = f * std::conj(dy_dtau);
    const Complex cp_term = f * std::conj(dy_dphi);
    g[0] = ct_term * e_tau.x + cp_term * e_phi_scaled.x;
    g[1] = ct_term * e_tau.y + cp_term * e_phi_scaled.y;
    g[2] = ct_term * e_tau.z + cp_term * e_phi_scaled.z;

    if (j < 0) {
        // D_{-m,0} = (-1)^m conj(D_{m,0}) carries over to the gradient.
        const double sgn = (m & 1) ? -1.0 : 1.0;
        for (auto& gi : g) gi = sgn * std::conj(gi);
    }
    return g;
}

}  // namespace sfp
