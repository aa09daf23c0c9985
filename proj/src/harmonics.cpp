#include "sfp/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sfp {

Complex& HarmonicSpectrum::at(int ell, int j) {
    if (ell < 0 || ell > ell_max_ || std::abs(j) > ell)
        throw std::invalid_argument("HarmonicSpectrum::at: index out of range");
    return coeffs_[flat_index(ell, j)];
}

const Complex& HarmonicSpectrum::at(int ell, int j) const {
    if (ell < 0 || ell > ell_max_ || std::abs(j) > ell)
        throw std::invalid_argument("HarmonicSpectrum::at: index out of range");
    return coeffs_[flat_index(ell, j)];
}

GaussLegendreRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Tricomi-type initial guess, then Newton on P_n.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[n - 1 - i] = x;
        rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

double assoc_legendre(int ell, int j, double x) {
    if (j < 0 || j > ell)
        throw std::invalid_argument("assoc_legendre: requires 0 <= j <= ell");
    if (std::abs(x) > 1.0)
        throw std::invalid_argument("assoc_legendre: |x| must be <= 1");
    // P_j^j = (-1)^j (2j-1)!! (1-x^2)^{j/2}
    double pjj = 1.0;
    if (j > 0) {
        const double omx2 = (1.0 - x) * (1.0 + x);
        double fact = 1.0;
        const double s = std::sqrt(omx2);
        for (int i = 1; i <= j; ++i) {
            pjj *= -fact * s;
            fact += 2.0;
        }
    }
    if (ell == j) return pjj;
    double pm1 = pjj;
    double p = x * (2.0 * j + 1.0) * pjj;  // P_{j+1}^j
    for (int l = j + 2; l <= ell; ++l) {
        const double pn =
            ((2.0 * l - 1.0) * x * p - (l + j - 1.0) * pm1) / (l - j);
        pm1 = p;
        p = pn;
    }
    return p;
}

double assoc_legendre_dtau(int ell, int j, double tau) {
    if (j < 0 || j > ell)
        throw std::invalid_argument("assoc_legendre_dtau: requires 0 <= j <= ell");
    const double st = std::sin(tau);
    if (!(tau > 0.0 && tau < M_PI) || st < 1e-12)
        throw std::invalid_argument("assoc_legendre_dtau: tau at a pole");
    if (ell == 0) return 0.0;
    const double ct = std::cos(tau);
    const double pl = assoc_legendre(ell, j, ct);
    const double plm1 = (j <= ell - 1) ? assoc_legendre(ell - 1, j, ct) : 0.0;
    return (ell * ct * pl - (ell + j) * plm1) / st;
}

double sph_harm_norm(int ell, int j) {
    if (j < 0 || j > ell)
        throw std::invalid_argument("sph_harm_norm: requires 0 <= j <= ell");
    const double lg = std::lgamma(ell - j + 1.0) - std::lgamma(ell + j + 1.0);
    return std::sqrt((2.0 * ell + 1.0) / (4.0 * M_PI) * std::exp(lg));
}

namespace {

// Fully normalized N_l^m P_l^m(x) for l = m..ell_max, written to out[l - m].
// Overflow-free at any degree we use.
void normalized_legendre_row(int m, int ell_max, double x, double* out) {
    const double omx2 = (1.0 - x) * (1.0 + x);
    double pmm = 1.0;
    double fact = 1.0;
    for (int i = 1; i <= m; ++i) {
        pmm *= omx2 * fact / (fact + 1.0);
        fact += 2.0;
    }
    pmm = std::sqrt((2.0 * m + 1.0) * pmm / (4.0 * M_PI));
    if (m & 1) pmm = -pmm;  // Condon-Shortley
    out[0] = pmm;
    if (ell_max == m) return;
    double pk = x * std::sqrt(2.0 * m + 3.0) * pmm;  // ~P_{m+1}^m
    out[1] = pk;
    double oldf = std::sqrt(2.0 * m + 3.0);
    double pkm1 = pmm;
    for (int l = m + 2; l <= ell_max; ++l) {
        const double f = std::sqrt((4.0 * l * l - 1.0) /
                                   (static_cast<double>(l) * l - static_cast<double>(m) * m));
        const double pl = (x * pk - pkm1 / oldf) * f;
        out[l - m] = pl;
        oldf = f;
        pkm1 = pk;
        pk = pl;
    }
}

}  // namespace

Complex sph_harm(int ell, int j, const SpherePoint& p) {
    if (std::abs(j) > ell)
        throw std::invalid_argument("sph_harm: requires |j| <= ell");
    const int m = std::abs(j);
    std::vector<double> row(static_cast<std::size_t>(ell - m + 1));
    normalized_legendre_row(m, ell, std::cos(p.tau), row.data());
    const Complex e = std::polar(1.0, m * p.phi);
    Complex y = row[ell - m] * e;
    if (j < 0) {
        y = std::conj(y);
        if (m & 1) y = -y;
    }
    return y;
}

std::vector<Complex> sph_harm_table(int ell_max, const SpherePoint& p) {
    const std::size_t n = static_cast<std::size_t>((ell_max + 1) * (ell_max + 1));
    std::vector<Complex> table(n);
    const double x = std::cos(p.tau);
    std::vector<double> row(static_cast<std::size_t>(ell_max + 1));
    const Complex estep = std::polar(1.0, p.phi);
    Complex e = 1.0;  // e^{i m phi}
    for (int m = 0; m <= ell_max; ++m) {
        normalized_legendre_row(m, ell_max, x, row.data());
        const double sgn = (m & 1) ? -1.0 : 1.0;
        for (int l = m; l <= ell_max; ++l) {
            const Complex y = row[l - m] * e;
            table[HarmonicSpectrum::flat_index(l, m)] = y;
            if (m > 0)
                table[HarmonicSpectrum::flat_index(l, -m)] = sgn * std::conj(y);
        }
        e *= estep;
    }
    return table;
}

SphereGrid build_grid(int ell_max) {
    if (ell_max < 0) throw std::invalid_argument("build_grid: ell_max must be >= 0");
    return build_product_grid(ell_max + 1, 2 * ell_max + 1);
}

SphereGrid build_product_grid(int n_tau, int n_phi) {
    if (n_tau < 1 || n_phi < 1)
        throw std::invalid_argument("build_product_grid: node counts must be >= 1");
    const GaussLegendreRule rule = gauss_legendre(n_tau);
    std::vector<GridNode> nodes;
    nodes.reserve(static_cast<std::size_t>(n_tau) * n_phi);
    const double wphi = 2.0 * M_PI / n_phi;
    for (int i = 0; i < n_tau; ++i) {
        const double tau = std::acos(std::clamp(rule.nodes[i], -1.0, 1.0));
        for (int k = 0; k < n_phi; ++k)
            nodes.push_back({{tau, wphi * k}, rule.weights[i] * wphi});
    }
    return SphereGrid(std::move(nodes), std::min(2 * n_tau - 1, n_phi - 1));
}

HarmonicSpectrum project_values(const std::vector<Complex>& values,
                                const SphereGrid& grid, int ell_max) {
    if (2 * ell_max > grid.exactness_degree())
        throw std::invalid_argument("project: grid exactness insufficient for ell_max");
    if (values.size() != grid.nodes().size())
        throw std::invalid_argument("project_values: size mismatch with grid");
    HarmonicSpectrum spec(ell_max);
    std::vector<Complex>& c = spec.coeffs();
    for (std::size_t k = 0; k < values.size(); ++k) {
        const GridNode& node = grid.nodes()[k];
        const Complex wf = node.weight * values[k];
        const std::vector<Complex> y = sph_harm_table(ell_max, node.p);
        for (std::size_t i = 0; i < c.size(); ++i) c[i] += wf * std::conj(y[i]);
    }
    return spec;
}

HarmonicSpectrum project_values(const std::vector<double>& values,
                                const SphereGrid& grid, int ell_max) {
    std::vector<Complex> cv(values.begin(), values.end());
    return project_values(cv, grid, ell_max);
}

HarmonicSpectrum project(const std::function<Complex(const SpherePoint&)>& f,
                         const SphereGrid& grid, int ell_max) {
    std::vector<Complex> vals;
    vals.reserve(grid.nodes().size());
    for (const GridNode& n : grid.nodes()) vals.push_back(f(n.p));
    return project_values(vals, grid, ell_max);
}

HarmonicSpectrum project_real(const std::function<double(const SpherePoint&)>& f,
                              const SphereGrid& grid, int ell_max) {
    std::vector<Complex> vals;
    vals.reserve(grid.nodes().size());
    for (const GridNode& n : grid.nodes()) vals.push_back(f(n.p));
    return project_values(vals, grid, ell_max);
}

Complex evaluate(const HarmonicSpectrum& spec, const SpherePoint& p) {
    const std::vector<Complex> y = sph_harm_table(spec.ell_max(), p);
    Complex sum = 0.0;
    const std::vector<Complex>& c = spec.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) sum += c[i] * y[i];
    return sum;
}

}  // namespace sfp
