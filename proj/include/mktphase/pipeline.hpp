#pragma once

#include <filesystem>
#include <vector>

#include "mktphase/config.hpp"
#include "mktphase/indices.hpp"
#include "mktphase/ingest.hpp"
#include "mktphase/phase.hpp"
#include "mktphase/scaling.hpp"

namespace mktphase {

/// Generates a synthetic panel in memory (prices, volumes, sector labels).
PricePanel synthesize_market(const SynthConfig& cfg, std::uint64_t seed);

struct IngestResult {
    PricePanel panel;
    std::vector<DropRecord> dropped;
};

/// quotes + sector map -> filtered panel in panel_dir, plus filter_report.csv.
IngestResult run_ingest(const RunConfig& cfg);

struct AnalyzeResult {
    ReturnPanel returns;
    std::vector<SpectralWindow> windows;
    MarketSeries series;
    bool all_bounds_hold = true;
};

/// Spectra, beta matrix, pseudo indices and per-window diagnostics.
AnalyzeResult run_analyze(const RunConfig& cfg);

struct ScalingResult {
    std::vector<ScalingPoint> points;
    PowerLawFit lambda0_fit;
    PowerLawFit delta_sq_fit;
    PowerLawFit sigma_beta_fit;
};

ScalingResult run_scaling(const RunConfig& cfg);

std::vector<PhaseWindow> run_phase(const RunConfig& cfg);

/// Writes quotes.csv and sectors.csv in ingest format under `output`.
PricePanel run_synth(const RunConfig& cfg);

}  // namespace mktphase
