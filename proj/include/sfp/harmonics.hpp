#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "sfp/geometry.hpp"

namespace sfp {

using Complex = std::complex<double>;

struct HarmonicIndex {
    int ell = 0;
    int j = 0;
};

/// Dense complex coefficients for degrees 0..ell_max, orders |j| <= ell.
/// Flat layout: (ell, j) -> ell*(ell+1) + j, total (ell_max+1)^2 entries.
class HarmonicSpectrum {
  public:
    HarmonicSpectrum() = default;
    explicit HarmonicSpectrum(int ell_max)
        : ell_max_(ell_max),
          coeffs_(static_cast<std::size_t>((ell_max + 1) * (ell_max + 1))) {}

    int ell_max() const { return ell_max_; }
    std::size_t size() const { return coeffs_.size(); }

    static std::size_t flat_index(int ell, int j) {
        return static_cast<std::size_t>(ell * (ell + 1) + j);
    }

    Complex& at(int ell, int j);
    const Complex& at(int ell, int j) const;
    Complex operator()(int ell, int j) const { return at(ell, j); }

    const std::vector<Complex>& coeffs() const { return coeffs_; }
    std::vector<Complex>& coeffs() { return coeffs_; }

  private:
    int ell_max_ = -1;
    std::vector<Complex> coeffs_;
};

struct GridNode {
    SpherePoint p;
    double weight = 0.0;
};

/// Product quadrature on S^2: Gauss-Legendre in cos(tau) x uniform phi.
/// Integrates Y_l^j * conj(Y_l'^j') exactly for l + l' <= exactness_degree.
class SphereGrid {
  public:
    SphereGrid() = default;
    SphereGrid(std::vector<GridNode> nodes, int exactness)
        : nodes_(std::move(nodes)), exactness_(exactness) {}

    const std::vector<GridNode>& nodes() const { return nodes_; }
    int exactness_degree() const { return exactness_; }

  private:
    std::vector<GridNode> nodes_;
    int exactness_ = -1;
};

/// 1D Gauss-Legendre rule on [-1,1], exact for polynomials of degree 2n-1.
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    int exactness_degree() const { return 2 * static_cast<int>(nodes.size()) - 1; }
};

GaussLegendreRule gauss_legendre(int n);

/// Associated Legendre P_l^j(x), Condon-Shortley phase included
/// (P_1^1(0) = -1). Stable three-term recurrence. Requires 0 <= j <= l.
double assoc_legendre(int ell, int j, double x);

/// d/dtau [P_l^j(cos tau)] via the degree-lowering identity
///   [l cos(tau) P_l^j(cos tau) - (l+j) P_{l-1}^j(cos tau)] / sin(tau).
/// tau must be strictly inside (0, pi).
double assoc_legendre_dtau(int ell, int j, double tau);

/// Orthonormalization constant N_l^j = sqrt((2l+1)(l-j)!/(4pi (l+j)!)), j >= 0.
double sph_harm_norm(int ell, int j);

/// Orthonormal complex spherical harmonic Y_l^j(tau, phi), any |j| <= l.
/// Negative orders via Y_l^{-j} = (-1)^j conj(Y_l^j).
Complex sph_harm(int ell, int j, const SpherePoint& p);

/// All Y_l^j(p) for l <= ell_max in one recurrence sweep.
/// Indexing matches HarmonicSpectrum::flat_index.
std::vector<Complex> sph_harm_table(int ell_max, const SpherePoint& p);

/// Grid with >= ell_max+1 polar nodes and >= 2 ell_max+1 azimuthal nodes;
/// exactness degree >= 2 ell_max.
SphereGrid build_grid(int ell_max);

/// Grid with explicit node counts (finer than the band limit requires).
SphereGrid build_product_grid(int n_tau, int n_phi);

/// coeff(l,j) = sum_nodes w * f(p) * conj(Y_l^j(p)).
HarmonicSpectrum project(const std::function<Complex(const SpherePoint&)>& f,
                         const SphereGrid& grid, int ell_max);
HarmonicSpectrum project_real(const std::function<double(const SpherePoint&)>& f,
                              const SphereGrid& grid, int ell_max);

/// Projection of values already evaluated at the grid nodes (same order).
HarmonicSpectrum project_values(const std::vector<Complex>& values,
                                const SphereGrid& grid, int ell_max);
HarmonicSpectrum project_values(const std::vector<double>& values,
                                const SphereGrid& grid, int ell_max);

/// sum_{l,j} coeff(l,j) Y_l^j(p).
Complex evaluate(const HarmonicSpectrum& spec, const SpherePoint& p);

}  // namespace sfp
