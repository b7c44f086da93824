#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include "smectic/harness.hpp"
#include "smectic/stepper.hpp"

namespace smectic {

// Configuration problems carry the dotted field path; what() starts with
// "config:<field>" so command-line callers can emit the machine-parseable
// reason verbatim.
struct ConfigError : std::runtime_error {
  std::string field;
  ConfigError(std::string field_, const std::string& detail)
      : std::runtime_error("config:" + field_ +
                           (detail.empty() ? "" : " " + detail)),
        field(std::move(field_)) {}
};

enum class InitKind { director_wave, snapshot };

struct InitSpec {
  InitKind kind = InitKind::director_wave;
  double u_amplitude = 0.25;     // u0 = amplitude * cos(q x)
  std::string snapshot_base;     // restart source when kind == snapshot
};

struct OutputSpec {
  std::string directory = "out";
  long snapshot_every = 0;  // 0 = initial and final snapshots only
  std::string diagnostics = "diagnostics.csv";
};

// Temporal-convergence study block (desk-scale defaults). Consumed by the
// converge command; ignored by plain runs.
struct StudySpec {
  double T = 0.5;
  std::vector<double> taus{1.0 / 64,  1.0 / 128, 1.0 / 256,
                           1.0 / 512, 1.0 / 1024, 1.0 / 2048};
  double tau_bench = 1.0 / 8192;
};

struct RunConfig {
  ModelParams model;
  int d = 2;
  long J = 128;
  double L = 6.283185307179586476925287;  // 2 pi

  double tau = 1e-2;
  bool has_T = true;  // duration given as T (true) or n_steps (false)
  double T = 1.0;
  long n_steps = 0;

  SchemeForm form = SchemeForm::etd;
  InitSpec init;
  OutputSpec output;
  StudySpec study;
  std::uint64_t seed = 8675309;

  PeriodicGrid grid() const { return PeriodicGrid(d, static_cast<int>(J), L); }
  long steps() const;       // resolves T/tau (validated) or n_steps
  void validate() const;    // throws ConfigError
};

// Parses a JSON config document (text, then file). Unknown keys are
// rejected; missing keys take the §-defaults above. Both throw ConfigError.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

// Deterministic serialization of the effective (defaults-applied) config;
// parse_config_text(effective_config_json(c)) reproduces c exactly.
std::string effective_config_json(const RunConfig& cfg);

// Output directory after the SMECTIC_OUTPUT_DIR override; created on demand
// by callers that write.
std::string resolve_output_dir(const OutputSpec& out);

// Worker-thread budget from SMECTIC_THREADS (default 1; clamped to >= 1).
int thread_budget();

// Initial state: the director-wave/cosine §-default data built on cfg.grid()
// (Q = n nT - I/d with n = (cos(x+y), sin(x+y)[, 0]); u = amp cos(q x));
// or a snapshot restart. s is set to E_1h(Q, u) so g^0 = 1.
SimState initial_state(const RunConfig& cfg);

// Snapshot files: <base>.json sidecar header (d, J, L, time, step, s,
// component names in storage order) plus one raw little-endian float64 file
// <base>.<component>.f64 per component, row-major nodes.
void write_snapshot(const std::string& base, const SimState& state);
SimState read_snapshot(const std::string& base);

// Streaming diagnostics CSV with the pinned column set; one row per
// completed step, 17 significant digits.
class DiagnosticsWriter {
 public:
  DiagnosticsWriter(const std::string& path, double tau,
                    std::uint64_t seed);  // writes provenance + header lines
  ~DiagnosticsWriter();
  DiagnosticsWriter(const DiagnosticsWriter&) = delete;
  DiagnosticsWriter& operator=(const DiagnosticsWriter&) = delete;

  void write_row(const SimState& state, const StepReport& rep);
  void flush();

 private:
  struct Impl;
  Impl* impl_;
  double tau_;
};

// Deterministic uniform [-amp, amp] per-node fields for the invariant
// battery; the q variant fills independent stored components (traceless
// symmetric by construction).
ScalarField random_scalar(const PeriodicGrid& g, std::mt19937_64& rng,
                          double amp);
QTensorField random_q(const PeriodicGrid& g, std::mt19937_64& rng, double amp);

}  // namespace smectic
