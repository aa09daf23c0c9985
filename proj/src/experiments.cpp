#include "sfp/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "sfp/csv.hpp"
#include "sfp/version.hpp"

namespace sfp {

namespace fs = std::filesystem;

namespace {

ExperimentSpec make_case(const std::string& name, TargetFunction target,
                         WeightMode mode, InitScheme init, int desk_epochs,
                         int paper_epochs, std::uint64_t seed,
                         ExpectedBounds expected) {
    ExperimentSpec spec;
    spec.name = name;
    spec.target = std::move(target);
    spec.config.mode = mode;
    spec.config.init = init;
    spec.config.epochs = desk_epochs;
    spec.paper_scale_epochs = paper_epochs;
    spec.config.batch = 1;  // per-sample SGD, the protocol the loss bounds assume
    spec.config.record_every = 100;
    spec.config.seed = seed;
    spec.expected = std::move(expected);
    return spec;
}

}  // namespace

std::vector<ExperimentSpec> registry() {
    std::vector<ExperimentSpec> cases;
    const TargetFunction zero = TargetFunction::zero();
    const TargetFunction trig = TargetFunction::trig_paper();
    using WM = WeightMode;
    using IS = InitScheme;

    // Seeds pinned so the documented qualitative outcomes reproduce exactly;
    // the convergence-epoch ordering of the default cases is seed-sensitive.
    cases.push_back(make_case("zero_fixed_default", zero, WM::fixed_directions,
                              IS::default_init, 10000, 10000, 2,
                              {1e-4, 1e-4, {}}));
    cases.push_back(make_case("zero_fixed_highfreq", zero, WM::fixed_directions,
                              IS::high_frequency, 10000, 10000, 1,
                              {{}, {}, {FpLabel::partial, FpLabel::violates}}));
    cases.push_back(make_case("zero_trainable_default", zero,
                              WM::trainable_directions, IS::default_init, 10000,
                              10000, 4, {1e-4, 1e-4, {}}));
    cases.push_back(make_case("zero_trainable_highfreq", zero,
                              WM::trainable_directions, IS::high_frequency, 10000,
                              10000, 1, {}));
    cases.push_back(make_case("trig_fixed_default", trig, WM::fixed_directions,
                              IS::default_init, 20000, 100000, 1,
                              {{}, 2e-2, {}}));
    cases.push_back(make_case("trig_fixed_highfreq", trig, WM::fixed_directions,
                              IS::high_frequency, 20000, 100000, 1, {}));
    cases.push_back(make_case("trig_trainable_default", trig,
                              WM::trainable_directions, IS::default_init, 20000,
                              100000, 1, {}));
    cases.push_back(make_case("trig_trainable_highfreq", trig,
                              WM::trainable_directions, IS::high_frequency, 20000,
                              100000, 1,
                              {5e-3, 5e-3, {FpLabel::partial, FpLabel::violates}}));
    return cases;
}

ExperimentSpec find_experiment(const std::string& name) {
    for (ExperimentSpec& spec : registry())
        if (spec.name == name) return std::move(spec);
    throw std::invalid_argument("unknown experiment: " + name);
}

TargetFunction parse_target(const std::string& text) {
    if (text == "zero") return TargetFunction::zero();
    if (text == "trig_paper") return TargetFunction::trig_paper();
    const std::string prefix = "harmonic_sum:";
    if (text.rfind(prefix, 0) == 0) {
        std::vector<TargetFunction::Term> terms;
        std::stringstream ss(text.substr(prefix.size()));
        std::string part;
        while (std::getline(ss, part, ';')) {
            TargetFunction::Term t;
            if (std::sscanf(part.c_str(), "%lf,%d,%d", &t.amp, &t.p, &t.q) != 3)
                throw std::invalid_argument("bad harmonic_sum term: " + part);
            terms.push_back(t);
        }
        if (terms.empty()) throw std::invalid_argument("harmonic_sum needs terms");
        return TargetFunction::harmonic_sum(std::move(terms));
    }
    throw std::invalid_argument("unknown target: " + text);
}

void apply_override(ExperimentSpec& spec, const std::string& key,
                    const std::string& value) {
    TrainingConfig& c = spec.config;
    if (key == "m") c.m = std::stoi(value);
    else if (key == "lr") c.lr = std::stod(value);
    else if (key == "epochs") c.epochs = std::stoi(value);
    else if (key == "n_samples") c.n_samples = std::stoi(value);
    else if (key == "seed") c.seed = std::stoull(value);
    else if (key == "ell_max") c.ell_max = std::stoi(value);
    else if (key == "record_every") c.record_every = std::stoi(value);
    else if (key == "batch") c.batch = std::stoi(value);
    else if (key == "renormalize") c.renormalize = (value == "1" || value == "true");
    else if (key == "mode")
        c.mode = (value == "trainable" || value == "trainable_directions")
                     ? WeightMode::trainable_directions
                     : WeightMode::fixed_directions;
    else if (key == "init")
        c.init = (value == "high_frequency") ? InitScheme::high_frequency
                                             : InitScheme::default_init;
    else if (key == "recording")
        c.recording = (value == "grid") ? SpectrumRecording::grid
                                        : SpectrumRecording::analytic;
    else if (key == "sampling")
        c.sampling = (value == "fibonacci") ? SamplingScheme::fibonacci
                                            : SamplingScheme::random_uniform;
    else if (key == "target")
        spec.target = parse_target(value);
    else
        throw std::invalid_argument("unknown config key: " + key);
}

namespace {

std::string mode_name(WeightMode m) {
    return m == WeightMode::trainable_directions ? "trainable" : "fixed";
}
std::string init_name(InitScheme s) {
    return s == InitScheme::high_frequency ? "high_frequency" : "default";
}

void write_meta(const fs::path& path, const ExperimentSpec& spec, bool paper_scale,
                int epochs_run, double wall_seconds, double final_loss,
                bool diverged, const std::vector<FpVerdict>& verdicts,
                const std::optional<HighFreqInitReport>& fit, double c_of_target) {
    std::ofstream out(path, std::ios::binary);
    const TrainingConfig& c = spec.config;
    out << "name=" << spec.name << '\n'
        << "target=" << spec.target.name() << '\n'
        << "m=" << c.m << '\n'
        << "lr=" << fmt17(c.lr) << '\n'
        << "epochs=" << epochs_run << '\n'
        << "n_samples=" << c.n_samples << '\n'
        << "seed=" << c.seed << '\n'
        << "ell_max=" << c.ell_max << '\n'
        << "mode=" << mode_name(c.mode) << '\n'
        << "init=" << init_name(c.init) << '\n'
        << "record_every=" << c.record_every << '\n'
        << "batch=" << c.batch << '\n'
        << "renormalize=" << (c.renormalize ? 1 : 0) << '\n'
        << "recording="
        << (c.recording == SpectrumRecording::grid ? "grid" : "analytic") << '\n'
        << "sampling="
        << (c.sampling == SamplingScheme::fibonacci ? "fibonacci" : "random_uniform")
        << '\n'
        << "paper_scale=" << (paper_scale ? 1 : 0) << '\n'
        << "git_describe=" << kGitDescribe << '\n'
        << "wall_time_s=" << fmt17(wall_seconds) << '\n'
        << "final_loss=" << fmt17(final_loss) << '\n'
        << "diverged=" << (diverged ? 1 : 0) << '\n'
        << "c_of_target=" << fmt17(c_of_target) << '\n';
    if (fit) {
        out << "highfreq_fit_rel_l2_error=" << fmt17(fit->rel_l2_error) << '\n'
            << "highfreq_fit_ridge=" << fmt17(fit->ridge) << '\n';
    }
    for (const FpVerdict& v : verdicts)
        out << "verdict_j" << v.j << "=" << to_string(v.label) << '\n';
}

std::map<std::string, std::string> read_meta(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string val = line.substr(eq + 1);
        if (!val.empty() && val.back() == '\r') val.pop_back();
        kv[line.substr(0, eq)] = val;
    }
    return kv;
}

}  // namespace

RunArtifacts run_experiment(const ExperimentSpec& spec_in, const fs::path& out_dir,
                            bool paper_scale) {
    ExperimentSpec spec = spec_in;
    if (paper_scale && spec.paper_scale_epochs > 0)
        spec.config.epochs = spec.paper_scale_epochs;

    fs::create_directories(out_dir);
    const auto t0 = std::chrono::steady_clock::now();

    // Per-epoch update coefficients Re/Im(C+G) recorded through the hook.
    const SphereGrid diag_grid = build_grid(spec.config.ell_max);
    std::ofstream series(out_dir / "fp_series.csv", std::ios::binary);
    series << "epoch,ell,j,update_re,update_im\n";
    const int series_ell_hi = std::min(10, spec.config.ell_max);
    std::optional<HighFreqInitReport> fit_report;

    const RecordHook hook = [&](int epoch, const NetworkParams& params,
                                const TraceEntry&) {
        std::vector<double> d_values;
        d_values.reserve(diag_grid.nodes().size());
        for (const GridNode& node : diag_grid.nodes())
            d_values.push_back(forward(params, node.p) - spec.target(node.p));
        const EvolutionTerms terms = evolution_terms_from_values(
            params, d_values, diag_grid, series_ell_hi);
        for (int j = 0; j <= 1; ++j)
            for (int l = std::max(1, j); l <= series_ell_hi; ++l) {
                const Complex u = terms.c_at(l, j) + terms.g_at(l, j);
                series << epoch << ',' << l << ',' << j << ',' << fmt17(u.real())
                       << ',' << fmt17(u.imag()) << '\n';
            }
    };

    TrainResult result;
    if (spec.config.init == InitScheme::high_frequency) {
        const SphereGrid fit_grid = build_grid(std::max(spec.config.ell_max, 16));
        HighFreqInitReport rep;
        NetworkParams init = init_high_frequency(spec.config, fit_grid, &rep);
        fit_report = rep;
        result = train(spec.config, spec.target, init, hook);
    } else {
        result = train(spec.config, spec.target, std::nullopt, hook);
    }
    series.close();

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    RunArtifacts artifacts;
    artifacts.dir = out_dir;
    artifacts.diverged = result.trace.diverged;
    artifacts.final_loss = result.trace.entries.back().loss;

    write_loss_csv(out_dir / "loss.csv", result.trace);
    write_harmonics_csv(out_dir / "harmonics.csv", result.trace);
    write_params_csv(out_dir / "params_final.csv", result.params);

    for (int j = 0; j <= 5; ++j)
        artifacts.verdicts.push_back(classify_fp(result.trace, j));
    write_verdicts_csv(out_dir / "verdict.csv", artifacts.verdicts);

    const EvolutionTerms final_terms = evolution_terms(
        result.params, spec.target, diag_grid, spec.config.ell_max);
    write_evolution_csv(out_dir / "evolution.csv", final_terms);

    write_meta(out_dir / "meta.txt", spec, paper_scale, spec.config.epochs, wall,
               artifacts.final_loss, artifacts.diverged, artifacts.verdicts,
               fit_report, result.trace.c_of_target);

    // Expected-bounds check for the scale that ran.
    const std::optional<double> bound = paper_scale
                                            ? spec.expected.max_final_loss_paper
                                            : spec.expected.max_final_loss_desk;
    if (artifacts.diverged) {
        artifacts.bounds_ok = false;
        artifacts.violations.push_back("diverged: " + result.trace.diagnostic);
    }
    if (bound && !(artifacts.final_loss <= *bound)) {
        artifacts.bounds_ok = false;
        std::ostringstream os;
        os << "final_loss " << fmt17(artifacts.final_loss) << " exceeds bound "
           << fmt17(*bound);
        artifacts.violations.push_back(os.str());
    }
    if (!spec.expected.fp_labels.empty()) {
        const FpLabel got = artifacts.verdicts.front().label;  // j = 0
        const bool ok =
            std::find(spec.expected.fp_labels.begin(), spec.expected.fp_labels.end(),
                      got) != spec.expected.fp_labels.end();
        if (!ok) {
            artifacts.bounds_ok = false;
            artifacts.violations.push_back(std::string("verdict_j0 ") +
                                           to_string(got) + " not in expected set");
        }
    }
    return artifacts;
}

void emit_plotdata(const fs::path& run_dir) {
    const auto meta = read_meta(run_dir / "meta.txt");
    const ErrorTrace trace =
        read_trace_csv(run_dir / "loss.csv", run_dir / "harmonics.csv");
    const bool trainable = meta.count("mode") && meta.at("mode") == "trainable";
    const TargetFunction target = parse_target(meta.at("target"));
    const NetworkParams params = read_params_csv(
        run_dir / "params_final.csv",
        trainable ? WeightMode::trainable_directions : WeightMode::fixed_directions);

    const fs::path out = run_dir / "plotdata";
    fs::create_directories(out);

    const auto write_curves = [&](int j, int lo, int hi, const fs::path& path) {
        hi = std::min(hi, trace.ell_max);  // traces below degree 10 stay valid
        if (hi < lo) return;
        std::ofstream f(path, std::ios::binary);
        f << "epoch";
        for (int l = lo; l <= hi; ++l) f << ",ell_" << l;
        f << '\n';
        for (const TraceEntry& e : trace.entries) {
            f << e.epoch;
            for (int l = lo; l <= hi; ++l)
                f << ',' << fmt17(e.harmonic_errors[HarmonicSpectrum::flat_index(l, j)]);
            f << '\n';
        }
    };
    write_curves(0, 1, 5, out / "curves_j0_l1-5.csv");
    write_curves(0, 6, 10, out / "curves_j0_l6-10.csv");
    if (trainable) {
        write_curves(1, 1, 5, out / "curves_j1_l1-5.csv");
        write_curves(1, 6, 10, out / "curves_j1_l6-10.csv");
    }

    {
        std::ofstream f(out / "raster.csv", std::ios::binary);
        f << "tau,phi,target,output,abs_err\n";
        const int n_tau = 90, n_phi = 180;
        for (int i = 0; i < n_tau; ++i) {
            const double tau = (i + 0.5) * M_PI / n_tau;
            for (int k = 0; k < n_phi; ++k) {
                const double phi = (k + 0.5) * 2.0 * M_PI / n_phi;
                const SpherePoint p{tau, phi};
                const double t = target(p);
                const double u = forward(params, p);
                f << fmt17(tau) << ',' << fmt17(phi) << ',' << fmt17(t) << ','
                  << fmt17(u) << ',' << fmt17(std::abs(u - t)) << '\n';
            }
        }
    }

    std::ofstream script(out / "plot.py", std::ios::binary);
    script <<
        "#!/usr/bin/env python3\n"
        "\"\"\"Render the run's plot data (loss, per-degree error curves, field\n"
        "rasters). Only needs pandas + matplotlib; regenerate inputs with\n"
        "`sphere-spectra run ...` followed by `sphere-spectra plotdata <dir>`.\"\"\"\n"
        "import pathlib\n"
        "import pandas as pd\n"
        "import matplotlib\n"
        "matplotlib.use(\"Agg\")\n"
        "import matplotlib.pyplot as plt\n"
        "\n"
        "here = pathlib.Path(__file__).parent\n"
        "run = here.parent\n"
        "\n"
        "loss = pd.read_csv(run / \"loss.csv\")\n"
        "plt.figure()\n"
        "plt.semilogy(loss.epoch, loss.loss)\n"
        "plt.xlabel(\"epoch\"); plt.ylabel(\"loss\")\n"
        "plt.savefig(here / \"loss.png\", dpi=150)\n"
        "\n"
        "for curves in sorted(here.glob(\"curves_*.csv\")):\n"
        "    df = pd.read_csv(curves)\n"
        "    plt.figure()\n"
        "    for col in df.columns[1:]:\n"
        "        plt.semilogy(df.epoch, df[col].clip(lower=1e-18), label=col)\n"
        "    plt.xlabel(\"epoch\"); plt.ylabel(\"|c_pred - c_true|\"); plt.legend()\n"
        "    plt.savefig(curves.with_suffix(\".png\"), dpi=150)\n"
        "\n"
        "raster = pd.read_csv(here / \"raster.csv\")\n"
        "for field in (\"target\", \"output\", \"abs_err\"):\n"
        "    piv = raster.pivot(index=\"tau\", columns=\"phi\", values=field)\n"
        "    plt.figure()\n"
        "    plt.imshow(piv.values, origin=\"lower\", aspect=\"auto\",\n"
        "               extent=[0, 6.2832, 0, 3.1416])\n"
        "    plt.colorbar(); plt.xlabel(\"phi\"); plt.ylabel(\"tau\")\n"
        "    plt.title(field)\n"
        "    plt.savefig(here / f\"raster_{field}.png\", dpi=150)\n"
        "print(\"wrote plots to\", here)\n";
}

}  // namespace sfp
