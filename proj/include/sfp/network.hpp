#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sfp/harmonics.hpp"

namespace sfp {

enum class WeightMode { fixed_directions, trainable_directions };
enum class InitScheme { default_init, high_frequency };
enum class SpectrumRecording { analytic, grid };
enum class SamplingScheme { random_uniform, fibonacci };

/// Targets on the sphere. harmonic_sum terms mean amp * sin(p tau) cos(q phi).
struct TargetFunction {
    enum class Kind { zero, trig_paper, harmonic_sum };
    struct Term {
        double amp = 0.0;
        int p = 0;
        int q = 0;
    };

    Kind kind = Kind::zero;
    std::vector<Term> terms;

    static TargetFunction zero() { return {}; }
    static TargetFunction trig_paper() { return {Kind::trig_paper, {}}; }
    static TargetFunction harmonic_sum(std::vector<Term> t) {
        return {Kind::harmonic_sum, std::move(t)};
    }

    double operator()(const SpherePoint& p) const;
    std::string name() const;
};

struct NetworkParams {
    std::vector<double> a;
    std::vector<Direction> w;
    WeightMode mode = WeightMode::fixed_directions;

    std::size_t m() const { return a.size(); }
};

struct TrainingConfig {
    int m = 100;
    double lr = 1e-3;
    int epochs = 10000;
    int n_samples = 100;
    std::uint64_t seed = 1;
    int ell_max = 12;
    WeightMode mode = WeightMode::fixed_directions;
    InitScheme init = InitScheme::default_init;
    int record_every = 100;
    int batch = 0;  // 0 = full batch
    bool renormalize = true;
    SpectrumRecording recording = SpectrumRecording::analytic;
    SamplingScheme sampling = SamplingScheme::random_uniform;
};

struct TraceEntry {
    int epoch = 0;
    double loss = 0.0;
    double sum_a = 0.0;
    std::vector<double> harmonic_errors;  // |c_pred - c_true|, flat (l,j) layout
};

struct ErrorTrace {
    int ell_max = 0;
    double c_of_target = 0.0;  // C(h), constant over the run
    std::vector<TraceEntry> entries;
    bool diverged = false;
    std::string diagnostic;
};

struct Gradients {
    std::vector<double> da;
    std::vector<Vec3> dw;  // empty in fixed mode
};

struct HighFreqInitReport {
    double rel_l2_error = 0.0;
    double ridge = 0.0;
};

struct TrainResult {
    NetworkParams params;
    ErrorTrace trace;
};

double forward(const NetworkParams& params, const SpherePoint& p);

/// Weighted mean squared error (1/N) sum (u - h)^2 sin(tau_i).
double loss(const NetworkParams& params, const std::vector<SpherePoint>& samples,
            const TargetFunction& h);

/// Exact gradient of the discrete weighted loss. The ReLU subgradient at the
/// kink is 0; dw is filled only in trainable mode.
Gradients gradient(const NetworkParams& params,
                   const std::vector<SpherePoint>& samples,
                   const TargetFunction& h);

NetworkParams init_default(const TrainingConfig& config);

/// Directions as in init_default; output weights by ridge least squares so the
/// network output approximates sin(10 tau) cos(10 phi) in the grid L^2 norm.
NetworkParams init_high_frequency(const TrainingConfig& config,
                                  const SphereGrid& grid,
                                  HighFreqInitReport* report = nullptr);

NetworkParams renormalize_directions(NetworkParams params);

/// Callback invoked at every recorded epoch (after the entry is appended).
using RecordHook =
    std::function<void(int epoch, const NetworkParams&, const TraceEntry&)>;

/// Gradient-descent training. Full batch by default, per-sample or mini-batch
/// when config.batch > 0; trainable directions are renormalized to unit length
/// after each step when config.renormalize. Aborts (trace.diverged) when the
/// loss exceeds 1e6 or turns non-finite.
TrainResult train(const TrainingConfig& config, const TargetFunction& h,
                  const std::optional<NetworkParams>& initial = std::nullopt,
                  const RecordHook& hook = nullptr);

/// Network spectrum from the exact per-neuron expansion, no quadrature.
HarmonicSpectrum analytic_network_spectrum(const NetworkParams& params, int ell_max);

}  // namespace sfp
