#ifndef FIELDCAL_IO_HPP
#define FIELDCAL_IO_HPP

#include <string>
#include <vector>

#include "fieldcal/design.hpp"
#include "fieldcal/forward.hpp"
#include "fieldcal/sampler.hpp"
#include "fieldcal/spatial_field.hpp"

namespace fieldcal {

// ---- spatial field CSV: first line "rows,cols", then one line per row ----
void write_field_csv(const std::string& path, const SpatialField& field);
SpatialField read_field_csv(const std::string& path);

// ---- generic numeric table with a header line ----
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

// ---- design deck: run_id, field_id, theta columns, pvi ----
void write_deck_csv(const std::string& path, const DesignDeck& deck);
struct DeckData {
  int k2 = 0;
  std::vector<DeckRow> rows;
};
DeckData read_deck_csv(const std::string& path);

// ---- simulator outputs: run_id, pvi, raw, transformed ----
void write_outputs_csv(const std::string& path, const std::vector<SimOutput>& outputs);
std::vector<SimOutput> read_outputs_csv(const std::string& path);

// ---- fine-scale field observations: row, col, value ----
void write_fine_obs_csv(const std::string& path, const std::vector<FineObs>& obs);
std::vector<FineObs> read_fine_obs_csv(const std::string& path);

// ---- model snapshot (JSON) ----
struct Snapshot {
  int k1 = 0;
  int k2 = 0;
  PredictorScaling scaling;
  Hyperparams hp;
  bool has_field = false;       // calibration snapshots carry field geometry
  int field_rows = 0;
  int field_cols = 0;
  CoeffSelection selection;
  PosteriorStore store;
};
void save_snapshot(const std::string& path, const Snapshot& snap);
Snapshot load_snapshot(const std::string& path);

// ---- chain trace: iteration, m, sigma_z2, tau_z [, theta..., log_pi2] ----
void write_trace_csv(const std::string& path, const PosteriorStore& store,
                     bool with_theta);

}  // namespace fieldcal

#endif  // FIELDCAL_IO_HPP
