#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sfp/fp_diagnostics.hpp"
#include "sfp/relu_spectral.hpp"
#include "sfp/rng.hpp"

using namespace sfp;

namespace {

Direction random_direction(Rng& rng, double pole_margin = 0.0) {
    while (true) {
        const double ct = rng.uniform(-1.0, 1.0);
        if (std::abs(ct) > 1.0 - pole_margin) continue;
        const double phi = rng.uniform(0.0, 2.0 * M_PI);
        return Direction{to_cartesian({std::acos(ct), phi})};
    }
}

// Composite Simpson for int_0^1 t P_l(t) dt, independent of the GL machinery.
double simpson_moment(int ell, int n) {
    const auto f = [ell](double t) {
        double p0 = 1.0, p1 = t, p = (ell == 0) ? 1.0 : t;
        for (int k = 2; k <= ell; ++k) {
            p = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p;
        }
        return t * p;
    };
    const double h = 1.0 / n;
    double s = f(0.0) + f(1.0);
    for (int i = 1; i < n; ++i) s += f(i * h) * ((i % 2) ? 4.0 : 2.0);
    return s * h / 3.0;
}

// Cap-aligned quadrature grid: GL in cos(tau') on [0,1] rotated so the cap
// axis sits at w. Exact for ReLU(w.x) against harmonics up to the band limit.
SphereGrid rotated_cap_grid(const Direction& w, int ell_max) {
    const Rotation3 r = rotation_to(w);
    const GaussLegendreRule rule = gauss_legendre(2 * ell_max + 2);
    const int n_phi = 2 * ell_max + 1;
    const double wphi = 2.0 * M_PI / n_phi;
    std::vector<GridNode> nodes;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double t = 0.5 * (rule.nodes[i] + 1.0);
        const double tau = std::acos(t);
        for (int k = 0; k < n_phi; ++k) {
            const Vec3 local = to_cartesian({tau, wphi * k});
            nodes.push_back(
                {from_cartesian(r.apply(local).normalized()),
                 0.5 * rule.weights[i] * wphi});
        }
    }
    return SphereGrid(std::move(nodes), 2 * ell_max);
}

}  // namespace

TEST_CASE("relu_coefficient special values") {
    CHECK(relu_coefficient(0) ==
          doctest::Approx(std::sqrt(M_PI) / 2.0).epsilon(1e-14));
    CHECK(relu_coefficient(1) ==
          doctest::Approx(std::sqrt(3.0 * M_PI) / 3.0).epsilon(1e-14));
    CHECK(relu_coefficient(2) ==
          doctest::Approx(std::sqrt(5.0 * M_PI) / 8.0).epsilon(1e-14));
    CHECK(relu_coefficient(3) == 0.0);
    CHECK(relu_coefficient(5) == 0.0);
    // signs alternate for even degrees from 4 on
    CHECK(relu_coefficient(4) < 0.0);
    CHECK(relu_coefficient(6) > 0.0);
    CHECK(relu_coefficient(8) < 0.0);
    CHECK_THROWS_AS((void)relu_coefficient(-1), std::invalid_argument);
}

TEST_CASE("closed form vs Gauss-Legendre oracle") {
    for (int l = 0; l <= 24; ++l)
        CHECK(std::abs(relu_coefficient(l) - relu_coefficient_quadrature(l)) <
              1e-10);
    CHECK_THROWS_AS((void)relu_coefficient_quadrature(8, gauss_legendre(4)),
                    std::invalid_argument);
}

TEST_CASE("closed form vs independent Simpson oracle") {
    for (const int l : {0, 1, 2, 4, 7, 10, 15}) {
        const double front =
            2.0 * M_PI * std::sqrt((2.0 * l + 1.0) / (4.0 * M_PI));
        CHECK(std::abs(relu_coefficient(l) - front * simpson_moment(l, 4096)) <
              1e-9);
    }
}

TEST_CASE("asymptotic model values and decay law") {
    CHECK(relu_coefficient_asymptotic(0) == doctest::Approx(M_PI / 2.0));
    CHECK(relu_coefficient_asymptotic(1) ==
          doctest::Approx(std::sqrt(3.0 * M_PI) / 3.0));
    CHECK(relu_coefficient_asymptotic(2) ==
          doctest::Approx(relu_coefficient(2)).epsilon(1e-14));
    // l^{5/2}/2^l envelope: positive, bounded ratios over the working range
    const CapCoefficients model =
        cap_coefficients(24, CapCoefficientKind::asymptotic_model);
    for (int l = 0; l <= 24; ++l) CHECK(model.c[l] > 0.0);
    double rmin = 1e300, rmax = 0.0;
    for (int l = 4; l <= 24; ++l) {
        const double envelope = std::pow(l, 2.5) / std::pow(2.0, l);
        const double ratio = model.c[l] / envelope;
        rmin = std::min(rmin, ratio);
        rmax = std::max(rmax, ratio);
    }
    CHECK(rmin > 0.05);
    CHECK(rmax < 1.0);

    const DecayFit fit = decay_fit(model.c, 6, 24);
    CHECK(fit.exponent == doctest::Approx(2.5).epsilon(0.12));  // 2.5 +- 0.3
    CHECK(fit.r_squared > 0.99);
}

TEST_CASE("wigner_d_j0 at the identity rotation") {
    const Direction north{{0.0, 0.0, 1.0}};
    for (int l = 0; l <= 6; ++l)
        for (int j = -l; j <= l; ++j) {
            const Complex d = wigner_d_j0(l, j, north);
            CHECK(std::abs(d - (j == 0 ? 1.0 : 0.0)) < 1e-12);
        }
    CHECK_THROWS_AS((void)wigner_d_j0(2, 3, north), std::invalid_argument);
}

TEST_CASE("wigner_d_j0 unit row property") {
    Rng rng(9);
    for (int rep = 0; rep < 10; ++rep) {
        const Direction w = random_direction(rng);
        for (int l = 0; l <= 8; ++l) {
            double sum = 0.0;
            for (int j = -l; j <= l; ++j) sum += std::norm(wigner_d_j0(l, j, w));
            CHECK(std::abs(sum - 1.0) < 1e-9);
        }
    }
    CHECK(std::abs(wigner_d_j0(1, 0, Direction{{1.0, 0.0, 0.0}})) < 1e-14);
}

TEST_CASE("neuron_spectrum at the pole reduces to the axisymmetric expansion") {
    const NeuronSpectrum ns = neuron_spectrum(Direction{{0.0, 0.0, 1.0}}, 10);
    for (int l = 0; l <= 10; ++l) {
        CHECK(std::abs(ns.spectrum(l, 0) - relu_coefficient(l)) < 1e-12);
        for (int j = 1; j <= l; ++j) {
            CHECK(std::abs(ns.spectrum(l, j)) < 1e-12);
            CHECK(std::abs(ns.spectrum(l, -j)) < 1e-12);
        }
    }
}

TEST_CASE("rotation consistency: projected cap equals the Wigner-mixed spectrum") {
    Rng rng(14);
    for (int rep = 0; rep < 5; ++rep) {
        const Direction w = random_direction(rng, 1e-3);
        const int L = 10;
        const SphereGrid grid = rotated_cap_grid(w, L);
        const HarmonicSpectrum projected = project_real(
            [&w](const SpherePoint& p) {
                return std::max(0.0, w.v.dot(to_cartesian(p)));
            },
            grid, L);
        const NeuronSpectrum analytic = neuron_spectrum(w, L);
        for (int l = 0; l <= L; ++l)
            for (int j = -l; j <= l; ++j)
                CHECK(std::abs(projected(l, j) - analytic.spectrum(l, j)) < 1e-8);
    }
}

TEST_CASE("neuron spectrum conjugate symmetry") {
    Rng rng(25);
    const NeuronSpectrum ns = neuron_spectrum(random_direction(rng), 8);
    for (int l = 0; l <= 8; ++l)
        for (int j = 0; j <= l; ++j) {
            const Complex a = ns.spectrum(l, -j);
            const Complex b =
                ((j % 2 == 0) ? 1.0 : -1.0) * std::conj(ns.spectrum(l, j));
            CHECK(std::abs(a - b) < 1e-12);
        }
}

TEST_CASE("truncated neuron spectrum converges to the cap pointwise") {
    Rng rng(5);
    const Direction w = random_direction(rng);
    std::vector<SpherePoint> pts;
    for (int i = 0; i < 200; ++i)
        pts.push_back({std::acos(rng.uniform(-1.0, 1.0)),
                       rng.uniform(0.0, 2.0 * M_PI)});
    double prev = 1e300;
    for (const int L : {8, 12, 16}) {
        const NeuronSpectrum ns = neuron_spectrum(w, L);
        double worst = 0.0;
        for (const SpherePoint& p : pts) {
            const double truth = std::max(0.0, w.v.dot(to_cartesian(p)));
            const Complex approx = evaluate(ns.spectrum, p);
            worst = std::max(worst, std::abs(approx.real() - truth));
            CHECK(std::abs(approx.imag()) < 1e-12);
        }
        CHECK(worst < prev);
        prev = worst;
        if (L == 16) CHECK(worst < 0.02);
    }
}

TEST_CASE("neuron_spectrum_grad edge cases") {
    Rng rng(33);
    const Direction w = random_direction(rng, 1e-2);
    const auto g0 = neuron_spectrum_grad(w, 0, 0);
    for (const Complex& c : g0) CHECK(std::abs(c) == 0.0);
    // j = 0: real gradient (no azimuthal term)
    const auto g = neuron_spectrum_grad(w, 2, 0);
    for (const Complex& c : g) CHECK(std::abs(c.imag()) < 1e-14);
    CHECK_THROWS_AS((void)neuron_spectrum_grad(Direction{{0.0, 0.0, 1.0}}, 2, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)neuron_spectrum_grad(w, 2, 3), std::invalid_argument);
}

TEST_CASE("neuron_spectrum_grad matches finite differences") {
    Rng rng(44);
    const double h = 1e-6;
    for (int rep = 0; rep < 8; ++rep) {
        const Direction w = random_direction(rng, 5e-2);
        for (int l = 1; l <= 6; ++l) {
            if (relu_coefficient(l) == 0.0) continue;
            for (int j = -l; j <= l; ++j) {
                const auto grad = neuron_spectrum_grad(w, l, j);
                double worst_fd = 0.0, worst_diff = 0.0;
                for (int k = 0; k < 3; ++k) {
                    Vec3 wp = w.v, wm = w.v;
                    (k == 0 ? wp.x : k == 1 ? wp.y : wp.z) += h;
                    (k == 0 ? wm.x : k == 1 ? wm.y : wm.z) -= h;
                    const Complex fp =
                        relu_coefficient(l) *
                        wigner_d_j0(l, j, Direction{wp.normalized()});
                    const Complex fm =
                        relu_coefficient(l) *
                        wigner_d_j0(l, j, Direction{wm.normalized()});
                    const Complex fd = (fp - fm) / (2.0 * h);
                    worst_fd = std::max(worst_fd, std::abs(fd));
                    worst_diff = std::max(worst_diff, std::abs(grad[k] - fd));
                }
                CHECK(worst_diff <= 1e-4 * std::max(worst_fd, 1e-6));
            }
        }
    }
}

TEST_CASE("cap_coefficients exact kind mirrors relu_coefficient") {
    const CapCoefficients caps = cap_coefficients(16);
    for (int l = 0; l <= 16; ++l) CHECK(caps.c[l] == relu_coefficient(l));
}
