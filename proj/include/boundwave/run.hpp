#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "boundwave/basis.hpp"
#include "boundwave/config.hpp"
#include "boundwave/errors.hpp"
#include "boundwave/evolution.hpp"
#include "boundwave/observables.hpp"
#include "boundwave/resonance.hpp"
#include "boundwave/stationary.hpp"

namespace boundwave::run {

using config::RunConfig;

basis::BindingBasis make_basis(const RunConfig& cfg);
basis::MirrorConfig make_mirror(const RunConfig& cfg);
evolution::WavepacketSpec make_packet(const RunConfig& cfg);

struct SimulationOutcome {
    std::vector<observables::ObservableRecord> records;
    evolution::ChannelField final_state;
    double mirror_cut = 0.0;
    double dt = 0.0;
    int stride = 1;
    double max_norm_error = 0.0;     // max |norm(t) - norm(0)|
    double max_energy_drift = 0.0;   // max |E(t) - E(0)| / |E(0)|
    double max_odd_population = 0.0; // max over records of sum_{n odd} p_n
    std::optional<stationary::PacketPrediction> prediction;
    std::vector<std::string> warnings;
};

using SnapshotFn = std::function<void(const evolution::ChannelField&, const evolution::Propagator&)>;

/// Runs the time-dependent experiment of cfg (records every ~t_final/records).
SimulationOutcome simulate(const RunConfig& cfg, const SnapshotFn& snapshot = {});

struct SectorScan {
    std::string label;
    std::vector<int> channels;
    resonance::ResonanceScan scan;
};

/// Complex-scaling scan; a symmetric mirror with sector "auto" is split into
/// its even and odd channel sectors.
std::vector<SectorScan> resonance_scan(const RunConfig& cfg);

nlohmann::json mirror_json(const RunConfig& cfg);
nlohmann::json smatrix_json(const stationary::ScatteringMatrix& s);
nlohmann::json resonance_json(const std::vector<SectorScan>& scans, bool with_spectra);

/// Process exit code for a library error: 1 validation, 2 numerical.
int exit_code(const Error& e);

/// BOUNDWAVE_OUTPUT_ROOT, or ./boundwave_runs when unset.
std::filesystem::path output_root();

struct RunStatus {
    int exit_code = 0;
    std::filesystem::path directory;
    nlohmann::json manifest;
    nlohmann::json result;
};

/// Executes the experiment, writing manifest.json plus CSV/JSON artifacts
/// into root/<name>. Errors are caught, recorded in the manifest, and mapped
/// to the exit code.
RunStatus run(const RunConfig& cfg, const std::filesystem::path& root);

}  // namespace boundwave::run
