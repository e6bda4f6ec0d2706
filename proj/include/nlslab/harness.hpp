#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlslab/diagnostics.hpp"
#include "nlslab/ground_state.hpp"
#include "nlslab/propagator.hpp"

namespace nlslab {

enum class Scenario { ground_state, soliton, pseudoconformal, subcritical, threshold_census, operator_suite };

std::string to_string(Scenario s);
/// Throws InvalidArgument for unknown names.
Scenario scenario_from_string(const std::string& name);

enum class Shape { ground_state, gaussian };

struct GridParams {
  int d = 4;
  std::size_t nodes = 1024;
  double rmax = 30.0;
  GridPtr make() const;
};

struct TimeParams {
  double t0 = 0.0;
  double t1 = 1.0;
  double dt0 = 1e-3;
  double snapshot_interval = 0.25;
  double c_nl = 0.1;
  double kinetic_factor = 10.0;  ///< K_max = kinetic_factor ||grad Q||_2
};

struct ProbeParams {
  std::vector<double> bernstein_n = {1, 2, 4, 8};
  std::vector<double> mismatch_n = {16, 32, 64};
  std::vector<double> mismatch_r = {1, 2, 4, 8, 16};
  std::vector<double> inout_n = {1, 2, 4, 8};
  int trials = 20;
};

struct ExperimentConfig {
  Scenario scenario = Scenario::ground_state;
  GridParams grid;
  TimeParams time;
  double mass_ratio = 0.81;  ///< c^2 = M(u0) / M(Q)
  Shape shape = Shape::ground_state;
  std::vector<double> census_ratios = {0.7, 0.81, 0.9, 1.0, 1.1, 1.3};
  std::vector<Shape> census_shapes = {Shape::ground_state, Shape::gaussian};
  double blowup_time = 2.0;  ///< T of the pseudo-conformal scenario
  double soliton_phase = 0.0;
  double soliton_scale = 1.0;
  ProbeParams probes;
  DiagnosticsOptions diagnostics;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "nlslab-out";
  std::optional<std::filesystem::path> certificate;

  /// Scenario defaults for grid, time span and step.
  static ExperimentConfig defaults(Scenario s);
  /// Missing keys take the scenario defaults. Throws InvalidArgument.
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::filesystem::path& path);
  nlohmann::ordered_json to_json() const;
  /// Throws InvalidArgument on bad grid parameters, time spans or ratios.
  void validate() const;
};

/// Heuristic labelling thresholds; versioned in every manifest.
struct ClassificationThresholds {
  static constexpr int version = 1;
  double profile_distance = 0.2;
  double frequency_variation = 2.0;
  double amplitude_decay = 0.5;
};

/// "blowup-like" if the blowup report fired; "soliton-like" if delta <= 0.2
/// and N varies by less than 2x over the final half; "disperse-like" if the
/// final sup norm is at most half its maximum and the final kinetic energy
/// is below its maximum; otherwise "undecided".
std::string classify(const EvolutionResult& run, const DiagnosticsReport& report,
                     const ClassificationThresholds& th = {});

struct CensusEntry {
  Shape shape;
  double ratio;
  std::string label;
  std::string raw_label;  ///< before the monotonicity check
};

/// Relabels as "undecided" any disperse-like entry above the smallest
/// blowup-like ratio of the same shape; returns the number relabelled.
int enforce_census_monotonicity(std::vector<CensusEntry>& entries);

struct OutputFile {
  std::string path;  ///< relative to the output directory
  std::string sha256;
};

struct RunManifest {
  nlohmann::ordered_json config;
  std::string code_version;
  double wall_time = 0.0;
  nlohmann::ordered_json headline;
  std::vector<OutputFile> outputs;
  std::string content_hash;  ///< SHA-256 over the sorted (path, sha256) list

  nlohmann::ordered_json to_json() const;
};

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Loads the certificate and its snapshot, resamples onto `grid` if needed
/// and re-certifies. Throws PreconditionFailed if the files are missing.
GroundStateSolution load_certified_ground_state(const std::filesystem::path& certificate,
                                                const GridPtr& grid);

/// Band-limited interpolation of f onto another grid.
RadialField resample(const RadialField& f, const GridPtr& grid);

/// Runs the scenario, writes its files and manifest.json into output_dir.
RunManifest run(const ExperimentConfig& config);
/// Same, with the ground state supplied instead of read from the certificate.
RunManifest run_with_ground_state(const ExperimentConfig& config, const GroundStateSolution& q);

std::string code_version();

}  // namespace nlslab
