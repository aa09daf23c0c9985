#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sfp/fp_diagnostics.hpp"
#include "sfp/harmonics.hpp"
#include "sfp/network.hpp"

namespace sfp {

/// Shortest-exact decimal rendering used by every CSV (17 significant digits).
std::string fmt17(double v);

void write_spectrum_csv(const std::filesystem::path& path,
                        const HarmonicSpectrum& spec);
HarmonicSpectrum read_spectrum_csv(const std::filesystem::path& path);

void write_loss_csv(const std::filesystem::path& path, const ErrorTrace& trace);
void write_harmonics_csv(const std::filesystem::path& path, const ErrorTrace& trace);

/// Rebuilds a trace (epochs, losses, error magnitudes) from loss.csv and
/// harmonics.csv written by the functions above.
ErrorTrace read_trace_csv(const std::filesystem::path& loss_path,
                          const std::filesystem::path& harmonics_path);

void write_params_csv(const std::filesystem::path& path, const NetworkParams& params);
NetworkParams read_params_csv(const std::filesystem::path& path, WeightMode mode);

void write_verdicts_csv(const std::filesystem::path& path,
                        const std::vector<FpVerdict>& verdicts);

void write_evolution_csv(const std::filesystem::path& path,
                         const EvolutionTerms& terms);

}  // namespace sfp
