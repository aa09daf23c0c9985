#include "sfp/fp_diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sfp {

ErrorField error_field(const NetworkParams& params, const TargetFunction& h) {
    return [params, h](const SpherePoint& p) { return forward(params, p) - h(p); };
}

HarmonicSpectrum error_spectrum(const NetworkParams& params, const TargetFunction& h,
                                const SphereGrid& grid, int ell_max) {
    return project_real(error_field(params, h), grid, ell_max);
}

double cap_integral_scalar(const ErrorField& D, const Direction& w,
                           const SphereGrid& grid) {
    double sum = 0.0;
    for (const GridNode& node : grid.nodes()) {
        const double z = w.v.dot(to_cartesian(node.p));
        if (z > 0.0) sum += node.weight * D(node.p) * z;
    }
    return sum;
}

Vec3 cap_integral_vector(const ErrorField& D, const Direction& w,
                         const SphereGrid& grid) {
    Vec3 sum{};
    for (const GridNode& node : grid.nodes()) {
        const Vec3 x = to_cartesian(node.p);
        if (w.v.dot(x) > 0.0) sum += (node.weight * D(node.p)) * x;
    }
    return sum;
}

double c_of_h(const std::function<double(const SpherePoint&)>& h, int n_tau,
              int n_phi) {
    // Gauss-Legendre in tau itself: the targets are trigonometric in tau, so
    // this converges to machine precision (a cos(tau) substitution would hit
    // the sqrt(1-t^2) branch point and stall at ~1e-6).
    const GaussLegendreRule rule = gauss_legendre(n_tau);
    const double wphi = 2.0 * M_PI / n_phi;
    double sum = 0.0;
    for (int i = 0; i < n_tau; ++i) {
        const double tau = 0.25 * M_PI * (rule.nodes[i] + 1.0);  // [0, pi/2]
        const double wt = 0.25 * M_PI * rule.weights[i] * std::cos(tau) * std::sin(tau);
        for (int k = 0; k < n_phi; ++k) sum += wt * wphi * h({tau, wphi * k});
    }
    return sum;
}

double c_of_h(const TargetFunction& h, int n_tau, int n_phi) {
    return c_of_h([&h](const SpherePoint& p) { return h(p); }, n_tau, n_phi);
}

std::vector<double> fixed_mode_d_ell(const NetworkParams& params,
                                     const TargetFunction& h,
                                     const SphereGrid& grid, int ell_max) {
    for (const Direction& w : params.w)
        if (w.v.z < 1.0 - 1e-9)
            throw std::invalid_argument(
                "fixed_mode_d_ell: directions must align with the polar axis");
    (void)grid;
    double sum_a = 0.0;
    for (double ai : params.a) sum_a += ai;
    const double factor = static_cast<double>(params.m()) *
                          (2.0 * M_PI / 3.0 * sum_a - c_of_h(h));
    std::vector<double> d(static_cast<std::size_t>(ell_max + 1));
    for (int l = 0; l <= ell_max; ++l) d[l] = factor * relu_coefficient(l);
    return d;
}

EvolutionTerms evolution_terms(const NetworkParams& params, const TargetFunction& h,
                               const SphereGrid& grid, int ell_max,
                               CapCoefficientKind kind) {
    const ErrorField D = error_field(params, h);
    std::vector<double> d_values;
    d_values.reserve(grid.nodes().size());
    for (const GridNode& node : grid.nodes()) d_values.push_back(D(node.p));
    return evolution_terms_from_values(params, d_values, grid, ell_max, kind);
}

EvolutionTerms evolution_terms_from_values(const NetworkParams& params,
                                           const std::vector<double>& d_values,
                                           const SphereGrid& grid, int ell_max,
                                           CapCoefficientKind kind) {
    if (d_values.size() != grid.nodes().size())
        throw std::invalid_argument("evolution_terms_from_values: size mismatch");
    const CapCoefficients caps = cap_coefficients(ell_max, kind);
    const bool trainable = params.mode == WeightMode::trainable_directions;

    std::vector<Vec3> xs;
    xs.reserve(grid.nodes().size());
    for (const GridNode& node : grid.nodes()) xs.push_back(to_cartesian(node.p));

    EvolutionTerms out;
    out.ell_max = ell_max;
    const std::size_t n = static_cast<std::size_t>((ell_max + 1) * (ell_max + 1));
    out.C.assign(n, Complex{});
    out.G.assign(n, Complex{});

    for (std::size_t i = 0; i < params.m(); ++i) {
        const Direction& w = params.w[i];
        double s_i = 0.0;
        Vec3 v_i{};
        for (std::size_t k = 0; k < xs.size(); ++k) {
            const double z = w.v.dot(xs[k]);
            if (z > 0.0) {
                const double wd = grid.nodes()[k].weight * d_values[k];
                s_i += wd * z;
                if (trainable) v_i += wd * xs[k];
            }
        }
        const SpherePoint angles = from_cartesian(w.v);
        const std::vector<Complex> y = sph_harm_table(ell_max, angles);
        for (int l = 0; l <= ell_max; ++l) {
            const double cl = caps.c[l];
            if (cl == 0.0) continue;
            const double f = cl * std::sqrt(4.0 * M_PI / (2.0 * l + 1.0));
            for (int j = -l; j <= l; ++j) {
                const std::size_t idx = HarmonicSpectrum::flat_index(l, j);
                out.C[idx] -= s_i * f * std::conj(y[idx]);
            }
        }
        if (!trainable) continue;

        const double st2 = w.v.x * w.v.x + w.v.y * w.v.y;
        if (st2 <= 1e-16) {
            out.skipped.push_back(i);  // polar direction, G term singular
            continue;
        }
        const double a2 = params.a[i] * params.a[i];
        for (int l = 1; l <= ell_max; ++l) {
            if (caps.c[l] == 0.0) continue;
            for (int j = -l; j <= l; ++j) {
                const std::array<Complex, 3> grad =
                    neuron_spectrum_grad_with_coefficient(w, l, j, caps.c[l]);
                const std::size_t idx = HarmonicSpectrum::flat_index(l, j);
                out.G[idx] -= a2 * (v_i.x * grad[0] + v_i.y * grad[1] + v_i.z * grad[2]);
            }
        }
    }
    return out;
}

DecayFit decay_fit(const std::vector<double>& values_by_ell, int ell_lo, int ell_hi) {
    if (ell_lo < 1 || ell_hi < ell_lo ||
        static_cast<std::size_t>(ell_hi) >= values_by_ell.size())
        throw std::invalid_argument("decay_fit: ell range outside values");
    std::vector<double> xs, ys;
    for (int l = ell_lo; l <= ell_hi; ++l) {
        const double v = values_by_ell[static_cast<std::size_t>(l)];
        if (v > 0.0) {
            xs.push_back(std::log2(static_cast<double>(l)));
            ys.push_back(std::log2(v) + l);
        }
    }
    if (xs.size() < 4)
        throw std::invalid_argument("decay_fit: fewer than 4 positive points");
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double k = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double b = (sy - k * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / n;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (k * xs[i] + b);
        ss_res += r * r;
        ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
    }
    return {k, ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0,
            static_cast<int>(xs.size())};
}

const char* to_string(FpLabel label) {
    switch (label) {
        case FpLabel::adheres: return "adheres";
        case FpLabel::partial: return "partial";
        case FpLabel::violates: return "violates";
    }
    return "adheres";
}

FpVerdict classify_fp(const ErrorTrace& trace, int j, double threshold,
                      double negligible_floor, int ell_lo, int ell_hi) {
    if (trace.entries.size() < 2)
        throw std::invalid_argument("classify_fp: need at least 2 recorded epochs");
    if (!(threshold > 0.0 && threshold < 1.0))
        throw std::invalid_argument("classify_fp: threshold must be in (0,1)");
    ell_hi = std::min(ell_hi, trace.ell_max);

    FpVerdict verdict;
    verdict.j = j;
    verdict.convergence_epoch.assign(static_cast<std::size_t>(ell_hi + 1),
                                     std::nullopt);

    std::vector<int> ells;                 // tracked degrees
    std::vector<std::optional<int>> conv;  // first epoch at threshold
    std::vector<double> final_ratio;
    for (int l = std::max(ell_lo, std::abs(j)); l <= ell_hi; ++l) {
        const std::size_t idx = HarmonicSpectrum::flat_index(l, j);
        const double e0 = trace.entries.front().harmonic_errors[idx];
        if (e0 < negligible_floor) continue;
        std::optional<int> T;
        for (const TraceEntry& e : trace.entries) {
            if (e.harmonic_errors[idx] <= threshold * e0) {
                T = e.epoch;
                break;
            }
        }
        ells.push_back(l);
        conv.push_back(T);
        final_ratio.push_back(trace.entries.back().harmonic_errors[idx] / e0);
        verdict.convergence_epoch[static_cast<std::size_t>(l)] = T;
    }

    for (std::size_t i1 = 0; i1 < ells.size(); ++i1) {
        for (std::size_t i2 = i1 + 1; i2 < ells.size(); ++i2) {
            ++verdict.n_pairs;
            const auto& t1 = conv[i1];
            const auto& t2 = conv[i2];
            bool inverted = false;
            if (!t1 && !t2)
                inverted = final_ratio[i2] < final_ratio[i1];
            else if (!t1)
                inverted = true;  // higher degree converged, lower never did
            else if (t2)
                inverted = *t2 < *t1;
            if (inverted) {
                ++verdict.n_inverted;
                verdict.witnesses.emplace_back(ells[i1], ells[i2]);
            }
        }
    }
    if (verdict.n_inverted == 0)
        verdict.label = FpLabel::adheres;
    else if (2 * verdict.n_inverted >= verdict.n_pairs)
        verdict.label = FpLabel::violates;
    else
        verdict.label = FpLabel::partial;
    return verdict;
}

std::vector<FpInequalitySample> fp_inequality_series(const ErrorTrace& trace, int j,
                                                     int ell_1, int ell_2) {
    if (ell_1 > trace.ell_max || ell_2 > trace.ell_max || std::abs(j) > ell_1 ||
        std::abs(j) > ell_2)
        throw std::invalid_argument("fp_inequality_series: degrees outside trace");
    std::vector<FpInequalitySample> out;
    const std::size_t i1 = HarmonicSpectrum::flat_index(ell_1, j);
    const std::size_t i2 = HarmonicSpectrum::flat_index(ell_2, j);
    for (std::size_t k = 1; k < trace.entries.size(); ++k) {
        const TraceEntry& prev = trace.entries[k - 1];
        const TraceEntry& cur = trace.entries[k];
        const double dt = cur.epoch - prev.epoch;
        if (dt <= 0) continue;
        const double r1 = (cur.harmonic_errors[i1] - prev.harmonic_errors[i1]) / dt;
        const double r2 = (cur.harmonic_errors[i2] - prev.harmonic_errors[i2]) / dt;
        out.push_back({cur.epoch, ell_1, ell_2, r1 < 0.0 && r2 < 0.0,
                       std::abs(r1) > std::abs(r2)});
    }
    return out;
}

}  // namespace sfp
