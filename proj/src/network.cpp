#include "sfp/network.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "sfp/relu_spectral.hpp"
#include "sfp/rng.hpp"

namespace sfp {

double TargetFunction::operator()(const SpherePoint& p) const {
    switch (kind) {
        case Kind::zero:
            return 0.0;
        case Kind::trig_paper:
            return std::sin(p.tau) * std::cos(3.0 * p.phi) +
                   std::sin(3.0 * p.tau) * std::cos(5.0 * p.phi);
        case Kind::harmonic_sum: {
            double s = 0.0;
            for (const Term& t : terms)
                s += t.amp * std::sin(t.p * p.tau) * std::cos(t.q * p.phi);
            return s;
        }
    }
    return 0.0;
}

std::string TargetFunction::name() const {
    switch (kind) {
        case Kind::zero: return "zero";
        case Kind::trig_paper: return "trig_paper";
        case Kind::harmonic_sum: {
            std::ostringstream os;
            os << "harmonic_sum";
            for (const Term& t : terms)
                os << ":" << t.amp << "," << t.p << "," << t.q;
            return os.str();
        }
    }
    return "zero";
}

double forward(const NetworkParams& params, const SpherePoint& p) {
    const Vec3 x = to_cartesian(p);
    double u = 0.0;
    for (std::size_t i = 0; i < params.m(); ++i) {
        const double z = params.w[i].v.dot(x);
        if (z > 0.0) u += params.a[i] * z;
    }
    return u;
}

double loss(const NetworkParams& params, const std::vector<SpherePoint>& samples,
            const TargetFunction& h) {
    if (samples.empty()) throw std::invalid_argument("loss: samples empty");
    double s = 0.0;
    for (const SpherePoint& p : samples) {
        const double d = forward(params, p) - h(p);
        s += d * d * std::sin(p.tau);
    }
    return s / static_cast<double>(samples.size());
}

Gradients gradient(const NetworkParams& params,
                   const std::vector<SpherePoint>& samples,
                   const TargetFunction& h) {
    if (samples.empty()) throw std::invalid_argument("gradient: samples empty");
    const std::size_t m = params.m();
    Gradients g;
    g.da.assign(m, 0.0);
    const bool trainable = params.mode == WeightMode::trainable_directions;
    if (trainable) g.dw.assign(m, Vec3{});
    const double inv_n = 1.0 / static_cast<double>(samples.size());
    for (const SpherePoint& p : samples) {
        const Vec3 x = to_cartesian(p);
        const double st = std::sin(p.tau);
        const double d = forward(params, p) - h(p);
        const double c = 2.0 * inv_n * d * st;
        for (std::size_t i = 0; i < m; ++i) {
            const double z = params.w[i].v.dot(x);
            if (z > 0.0) {
                g.da[i] += c * z;
                if (trainable) g.dw[i] += (c * params.a[i]) * x;
            }
        }
    }
    return g;
}

NetworkParams init_default(const TrainingConfig& config) {
    if (config.m < 1) throw std::invalid_argument("init_default: m must be >= 1");
    NetworkParams params;
    params.mode = config.mode;
    const std::vector<SpherePoint> dirs =
        sample_uniform(static_cast<std::size_t>(config.m), config.seed);
    params.w.reserve(dirs.size());
    for (const SpherePoint& p : dirs) params.w.push_back(Direction{to_cartesian(p)});
    Rng rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    const double sigma = 1.0 / std::sqrt(static_cast<double>(config.m));
    params.a.resize(static_cast<std::size_t>(config.m));
    for (double& ai : params.a) ai = sigma * rng.normal();
    return params;
}

NetworkParams init_high_frequency(const TrainingConfig& config,
                                  const SphereGrid& grid,
                                  HighFreqInitReport* report) {
    NetworkParams params = init_default(config);
    const std::size_t m = params.m();
    const std::size_t n = grid.nodes().size();

    Eigen::MatrixXd phi(n, m);
    Eigen::VectorXd wgt(n), g(n);
    for (std::size_t k = 0; k < n; ++k) {
        const GridNode& node = grid.nodes()[k];
        const Vec3 x = to_cartesian(node.p);
        wgt(k) = node.weight;
        g(k) = std::sin(10.0 * node.p.tau) * std::cos(10.0 * node.p.phi);
        for (std::size_t i = 0; i < m; ++i)
            phi(k, i) = std::max(0.0, params.w[i].v.dot(x));
    }

    double ridge = 1e-8;
    Eigen::VectorXd a;
    const Eigen::MatrixXd normal = phi.transpose() * wgt.asDiagonal() * phi;
    const Eigen::VectorXd rhs = phi.transpose() * (wgt.array() * g.array()).matrix();
    for (int attempt = 0; attempt < 8; ++attempt) {
        Eigen::MatrixXd reg = normal;
        reg.diagonal().array() += ridge;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(reg);
        a = ldlt.solve(rhs);
        if (ldlt.info() == Eigen::Success && a.allFinite()) break;
        ridge *= 10.0;  // singular normal equations: stiffen and retry
    }
    for (std::size_t i = 0; i < m; ++i) params.a[i] = a(i);

    if (report) {
        const Eigen::VectorXd res = phi * a - g;
        const double num = (wgt.array() * res.array().square()).sum();
        const double den = (wgt.array() * g.array().square()).sum();
        report->rel_l2_error = std::sqrt(num / den);
        report->ridge = ridge;
    }
    return params;
}

NetworkParams renormalize_directions(NetworkParams params) {
    for (Direction& d : params.w) {
        const double n = d.v.norm();
        if (n <= 0.0 || !std::isfinite(n))
            throw std::runtime_error("renormalize_directions: zero-norm direction");
        d.v = d.v / n;
    }
    return params;
}

HarmonicSpectrum analytic_network_spectrum(const NetworkParams& params, int ell_max) {
    HarmonicSpectrum spec(ell_max);
    for (std::size_t i = 0; i < params.m(); ++i) {
        const SpherePoint angles = from_cartesian(params.w[i].v);
        const std::vector<Complex> y = sph_harm_table(ell_max, angles);
        for (int l = 0; l <= ell_max; ++l) {
            const double cl = relu_coefficient(l);
            if (cl == 0.0) continue;
            const double f =
                params.a[i] * cl * std::sqrt(4.0 * M_PI / (2.0 * l + 1.0));
            for (int j = -l; j <= l; ++j)
                spec.at(l, j) +=
                    f * std::conj(y[HarmonicSpectrum::flat_index(l, j)]);
        }
    }
    return spec;
}

namespace {

// C(h) = int_0^{2pi} int_0^{pi/2} h cos sin dtau dphi; GL in tau, where the
// trig targets are analytic.
double c_of_target_quadrature(const TargetFunction& h) {
    const GaussLegendreRule rule = gauss_legendre(64);
    const int n_phi = 129;
    const double wphi = 2.0 * M_PI / n_phi;
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double tau = 0.25 * M_PI * (rule.nodes[i] + 1.0);
        const double wt =
            0.25 * M_PI * rule.weights[i] * std::cos(tau) * std::sin(tau);
        for (int k = 0; k < n_phi; ++k) sum += wt * wphi * h({tau, wphi * k});
    }
    return sum;
}

}  // namespace

TrainResult train(const TrainingConfig& config, const TargetFunction& h,
                  const std::optional<NetworkParams>& initial,
                  const RecordHook& hook) {
    if (config.lr <= 0.0) throw std::invalid_argument("train: lr must be > 0");
    if (config.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
    if (config.record_every < 1)
        throw std::invalid_argument("train: record_every must be >= 1");

    NetworkParams params;
    if (initial) {
        params = *initial;
    } else if (config.init == InitScheme::default_init) {
        params = init_default(config);
    } else {
        const SphereGrid fit_grid = build_grid(std::max(config.ell_max, 16));
        params = init_high_frequency(config, fit_grid);
    }
    params.mode = config.mode;
    const std::size_t m = params.m();

    // Sample set is drawn after the parameter draw so that identical seeds give
    // identical params regardless of mode; a distinct stream keeps them apart.
    const std::vector<SpherePoint> samples =
        (config.sampling == SamplingScheme::fibonacci)
            ? fibonacci_sphere(static_cast<std::size_t>(config.n_samples))
            : sample_uniform(static_cast<std::size_t>(config.n_samples),
                             config.seed ^ 0x5851f42d4c957f2dULL);

    std::vector<Vec3> xs(samples.size());
    std::vector<double> st(samples.size()), hs(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
        xs[k] = to_cartesian(samples[k]);
        st[k] = std::sin(samples[k].tau);
        hs[k] = h(samples[k]);
    }

    // Targets are generally not band-limited (the trig target is non-smooth at
    // the poles), so their reference coefficients come from a fine grid;
    // aliasing on the band-limit grid would pollute them at the 1e-3 level.
    const SphereGrid target_grid = build_product_grid(128, 257);
    const HarmonicSpectrum true_spec = project_real(
        [&h](const SpherePoint& p) { return h(p); }, target_grid, config.ell_max);

    ErrorTrace trace;
    trace.ell_max = config.ell_max;
    trace.c_of_target = c_of_target_quadrature(h);

    const auto record = [&](int epoch, double loss_value) {
        TraceEntry e;
        e.epoch = epoch;
        e.loss = loss_value;
        e.sum_a = std::accumulate(params.a.begin(), params.a.end(), 0.0);
        HarmonicSpectrum pred =
            (config.recording == SpectrumRecording::analytic)
                ? analytic_network_spectrum(params, config.ell_max)
                : project_real([&](const SpherePoint& p) { return forward(params, p); },
                               target_grid, config.ell_max);
        e.harmonic_errors.resize(pred.size());
        for (std::size_t i = 0; i < pred.size(); ++i)
            e.harmonic_errors[i] = std::abs(pred.coeffs()[i] - true_spec.coeffs()[i]);
        trace.entries.push_back(std::move(e));
        if (hook) hook(epoch, params, trace.entries.back());
    };

    const auto current_loss = [&]() {
        double s = 0.0;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            double u = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double z = params.w[i].v.dot(xs[k]);
                if (z > 0.0) u += params.a[i] * z;
            }
            const double d = u - hs[k];
            s += d * d * st[k];
        }
        return s / static_cast<double>(xs.size());
    };

    const bool trainable = config.mode == WeightMode::trainable_directions;
    const std::size_t batch =
        (config.batch <= 0) ? samples.size()
                            : std::min<std::size_t>(config.batch, samples.size());
    Rng shuffle_rng(config.seed ^ 0xa0761d6478bd642fULL);
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::vector<double> da(m);
    std::vector<Vec3> dw(trainable ? m : 0);

    for (int epoch = 0;; ++epoch) {
        const bool at_record = epoch % config.record_every == 0 || epoch == config.epochs;
        if (at_record) {
            const double lv = current_loss();
            record(epoch, lv);
            if (!std::isfinite(lv) || lv > 1e6) {
                trace.diverged = true;
                std::ostringstream os;
                os << "training diverged at epoch " << epoch << " (loss " << lv << ")";
                trace.diagnostic = os.str();
                return {std::move(params), std::move(trace)};
            }
        }
        if (epoch == config.epochs) break;

        shuffle_rng.shuffle(order);
        for (std::size_t s0 = 0; s0 < order.size(); s0 += batch) {
            const std::size_t nb = std::min(batch, order.size() - s0);
            std::fill(da.begin(), da.end(), 0.0);
            if (trainable) std::fill(dw.begin(), dw.end(), Vec3{});
            const double inv_nb = 1.0 / static_cast<double>(nb);
            for (std::size_t q = 0; q < nb; ++q) {
                const std::size_t k = order[s0 + q];
                double u = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    const double z = params.w[i].v.dot(xs[k]);
                    if (z > 0.0) u += params.a[i] * z;
                }
                const double c = 2.0 * inv_nb * (u - hs[k]) * st[k];
                for (std::size_t i = 0; i < m; ++i) {
                    const double z = params.w[i].v.dot(xs[k]);
                    if (z > 0.0) {
                        da[i] += c * z;
                        if (trainable) dw[i] += (c * params.a[i]) * xs[k];
                    }
                }
            }
            for (std::size_t i = 0; i < m; ++i) params.a[i] -= config.lr * da[i];
            if (trainable) {
                for (std::size_t i = 0; i < m; ++i) {
                    params.w[i].v -= config.lr * dw[i];
                    if (config.renormalize) {
                        const double n = params.w[i].v.norm();
                        if (n <= 0.0 || !std::isfinite(n)) {
                            trace.diverged = true;
                            trace.diagnostic = "direction collapsed to zero norm";
                            return {std::move(params), std::move(trace)};
                        }
                        params.w[i].v = params.w[i].v / n;
                    }
                }
            }
        }
    }
    return {std::move(params), std::move(trace)};
}

}  // namespace sfp
