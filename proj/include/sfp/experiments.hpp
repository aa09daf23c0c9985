#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sfp/fp_diagnostics.hpp"
#include "sfp/network.hpp"

namespace sfp {

struct ExpectedBounds {
    std::optional<double> max_final_loss_desk;
    std::optional<double> max_final_loss_paper;
    std::vector<FpLabel> fp_labels;  // acceptable j=0 verdicts; empty = unchecked
};

struct ExperimentSpec {
    std::string name;
    TrainingConfig config;  // epochs field holds the desk-scale count
    TargetFunction target;
    int paper_scale_epochs = 0;  // 0 = same as desk
    ExpectedBounds expected;
};

/// The eight named cases: {zero, trig} x {fixed, trainable} x {default, highfreq}.
std::vector<ExperimentSpec> registry();

/// Lookup by name; throws on unknown names.
ExperimentSpec find_experiment(const std::string& name);

struct RunArtifacts {
    std::filesystem::path dir;
    double final_loss = 0.0;
    bool diverged = false;
    std::vector<FpVerdict> verdicts;  // j = 0..5
    bool bounds_ok = true;
    std::vector<std::string> violations;
};

/// Trains the case, writes loss.csv, harmonics.csv, params_final.csv,
/// verdict.csv, evolution.csv, fp_series.csv and meta.txt under out_dir, and
/// evaluates the expected bounds for the scale that was run.
RunArtifacts run_experiment(const ExperimentSpec& spec,
                            const std::filesystem::path& out_dir,
                            bool paper_scale = false);

/// Tidy plot-ready CSVs (per-degree error curves, field raster) plus a
/// standalone matplotlib script, derived from a finished run directory.
void emit_plotdata(const std::filesystem::path& run_dir);

/// `--set key=value` style override applied to a spec.
void apply_override(ExperimentSpec& spec, const std::string& key,
                    const std::string& value);

TargetFunction parse_target(const std::string& text);

}  // namespace sfp
