#ifndef FIELDCAL_CONFIG_HPP
#define FIELDCAL_CONFIG_HPP

#include <string>

#include "fieldcal/design.hpp"
#include "fieldcal/forward.hpp"
#include "fieldcal/posterior.hpp"
#include "fieldcal/sampler.hpp"

namespace fieldcal {

struct GridConfig {
  int rows = 16;
  int cols = 16;
  int coarse_rows = 4;
  int coarse_cols = 4;
};

struct ForwardConfig {
  ToyWatercutParams params;
  double noise_sd = 0.0;
  std::uint64_t seed = 1;
  std::string transform = "logit";  // "logit" or "none"
  double clamp_eps = 1e-6;
};

struct FitConfig {
  double train_fraction = 0.9;  // leading fraction of field ids used to train
};

struct FilesConfig {
  std::string coarse_field = "coarse.csv";
  std::string deck = "deck.csv";
  std::string fields_dir = "fields";
  std::string outputs = "outputs.csv";
  std::string observed = "observed.csv";
  std::string fine_obs = "fine_obs.csv";
  std::string snapshot = "snapshot.json";
  std::string trace = "trace.csv";
  std::string validation = "validation.csv";
  std::string metrics = "metrics.csv";
  std::string field_median = "field_median.csv";
  std::string field_q025 = "field_q025.csv";
  std::string field_q975 = "field_q975.csv";
  std::string hist_dir = "hist";
  std::string summary = "summary.csv";
  std::string run_log = "run.log";
};

// Single JSON config with sections {grid, selection, design, hyperparams,
// chain, forward, fit, files}. Missing entries take the documented defaults;
// unknown keys are rejected; the resolved config is echoed into the run log.
struct AppConfig {
  GridConfig grid;
  CoeffSelection selection{SelectionShape::kTriangle, 4};
  DesignSpec design;
  Hyperparams hp;
  ChainConfig chain;
  ForwardConfig forward;
  FitConfig fit;
  FilesConfig files;

  double transformed_output(double raw) const;
  void validate() const;
};

AppConfig load_config(const std::string& path);

// Resolved configuration as pretty-printed JSON (for the run log).
std::string config_echo(const AppConfig& cfg);

}  // namespace fieldcal

#endif  // FIELDCAL_CONFIG_HPP
