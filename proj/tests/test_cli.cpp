// Exercises the CLI's exit codes, error messages, and the round-trip
// readability of every artifact it writes. Usage: test_cli <path-to-cli>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "fieldcal/config.hpp"
#include "fieldcal/io.hpp"

namespace fs = std::filesystem;
using namespace fieldcal;

namespace {

int g_failures = 0;

void expect(bool ok, const std::string& what) {
  if (!ok) {
    ++g_failures;
    std::printf("FAILED: %s\n", what.c_str());
  }
}

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run(const std::string& cli, const std::string& args) {
  const std::string cmd = "\"" + cli + "\" " + args + " 2>&1";
  RunResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return res;
  std::array<char, 512> buf;
  while (fgets(buf.data(), buf.size(), pipe)) res.output += buf.data();
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::printf("usage: test_cli <path-to-fieldcal-cli>\n");
    return 1;
  }
  const std::string cli = argv[1];
  const fs::path scratch =
      fs::temp_directory_path() / ("fieldcal_cli_" + std::to_string(::getpid()));
  fs::remove_all(scratch);
  fs::create_directories(scratch);

  // --help exits 0
  expect(run(cli, "--help").exit_code == 0, "--help exits 0");

  // missing required --config is a usage error
  expect(run(cli, "design").exit_code != 0, "missing --config rejected");

  // a minimal valid config, but pointing at a missing coarse field
  const std::string cfg_path = (scratch / "cfg.json").string();
  {
    std::ofstream cfg(cfg_path);
    cfg << R"({
      "grid": {"rows": 8, "cols": 8, "coarse_rows": 2, "coarse_cols": 2},
      "selection": {"shape": "triangle", "w": 3},
      "design": {"N_s": 12, "n_s": 5, "gamma": 0.4, "pvi_count": 4},
      "hyperparams": {"m_max": 15, "lambda": 5},
      "chain": {"n_iter": 400, "burn_in": 100, "thin": 5, "h": 0.05},
      "forward": {"noise_sd": 0.02},
      "fit": {"train_fraction": 0.8}
    })";
  }
  {
    const RunResult r = run(cli, "design --config \"" + cfg_path + "\"");
    expect(r.exit_code == 1, "missing coarse field exits 1");
    expect(r.output.find("coarse.csv") != std::string::npos,
           "error message names the missing path");
  }

  // invalid hyperparameter
  {
    const std::string bad = (scratch / "bad_hp.json").string();
    std::ofstream cfg(bad);
    cfg << R"({"hyperparams": {"a_z": -2.0}})";
    cfg.close();
    expect(run(cli, "fit --config \"" + bad + "\"").exit_code == 1,
           "negative a_z exits 1");
  }

  // unknown config key
  {
    const std::string bad = (scratch / "bad_key.json").string();
    std::ofstream cfg(bad);
    cfg << R"({"chains": {"n_iter": 10}})";
    cfg.close();
    expect(run(cli, "fit --config \"" + bad + "\"").exit_code == 1,
           "unknown config section exits 1");
  }

  // happy path: full pipeline in the scratch dir
  {
    std::ofstream coarse(scratch / "coarse.csv");
    coarse << "2,2\n0.4,-0.2\n0.1,0.7\n";
  }
  // observed data synthesized from the coarse-filled field itself
  {
    const SpatialField coarse_field = read_field_csv((scratch / "coarse.csv").string());
    CoarseData yc;
    yc.rows = yc.cols = 2;
    yc.y.resize(4);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) yc.y(i * 2 + j) = coarse_field.values(i, j);
    const SpatialField ref = reconstruct(select_coeffs(
        dct2_forward(coarse_fill(yc, 8, 8)), CoeffSelection{SelectionShape::kTriangle, 3}));
    const ToyWatercut model;
    std::vector<SimOutput> observed;
    for (int i = 0; i < 6; ++i) {
      const double pvi = 0.1 + 0.15 * i;
      const double w = model.run(ref, Eigen::VectorXd::Constant(1, pvi));
      observed.push_back(SimOutput{i, pvi, w, clamped_logit(w)});
    }
    write_outputs_csv((scratch / "observed.csv").string(), observed);
    write_fine_obs_csv((scratch / "fine_obs.csv").string(),
                       {FineObs{1, 1, ref.values(1, 1)}, FineObs{6, 5, ref.values(6, 5)}});
  }
  const std::string base_args = " --config \"" + cfg_path + "\" --seed 9";
  for (const char* cmd : {"design", "simulate", "fit", "validate", "calibrate",
                          "summarize"}) {
    const RunResult r = run(cli, std::string(cmd) + base_args);
    expect(r.exit_code == 0, std::string(cmd) + " exits 0: " + r.output);
  }

  // artifacts round-trip through the library readers
  try {
    const DeckData deck = read_deck_csv((scratch / "deck.csv").string());
    expect(deck.rows.size() == 20, "deck has n_s x pvi rows");
    expect(deck.k2 == 6, "deck carries Triangle(3) coefficients");
    read_outputs_csv((scratch / "outputs.csv").string());
    const Snapshot snap = load_snapshot((scratch / "snapshot.json").string());
    expect(!snap.store.empty(), "snapshot holds draws");
    expect(snap.has_field, "calibration snapshot records field geometry");
    read_field_csv((scratch / "field_median.csv").string());
    read_field_csv((scratch / "field_q025.csv").string());
    read_field_csv((scratch / "field_q975.csv").string());
    read_csv((scratch / "trace.csv").string());
    read_csv((scratch / "validation.csv").string());
    read_csv((scratch / "hist" / "theta_0_hist.csv").string());
    read_csv((scratch / "hist" / "theta_0_theta_1_hist2d.csv").string());
    // metrics and summary key their rows by name, so check the headers by hand
    for (const char* name : {"metrics.csv", "summary.csv"}) {
      std::ifstream f(scratch / name);
      std::string line;
      expect(static_cast<bool>(std::getline(f, line)) &&
                 (line == "metric,value" || line == "quantity,value"),
             std::string(name) + " header");
    }
  } catch (const std::exception& e) {
    expect(false, std::string("artifact round-trip: ") + e.what());
  }

  // corrupt deck header detected
  {
    std::ofstream deck(scratch / "deck.csv");
    deck << "not,a,deck\n1,2,3\n";
    deck.close();
    expect(run(cli, "simulate" + base_args).exit_code == 1, "bad deck header exits 1");
  }

  // a chain too short to retain draws reports an empty store
  {
    const std::string short_cfg = (scratch / "short.json").string();
    std::ofstream cfg(short_cfg);
    cfg << R"({
      "grid": {"rows": 8, "cols": 8, "coarse_rows": 2, "coarse_cols": 2},
      "selection": {"shape": "triangle", "w": 3},
      "design": {"N_s": 12, "n_s": 5, "gamma": 0.4, "pvi_count": 4},
      "chain": {"n_iter": 105, "burn_in": 100, "thin": 10, "h": 0.05}
    })";
    cfg.close();
    // regenerate a valid deck first (the corrupt one is still on disk)
    expect(run(cli, "design" + base_args).exit_code == 0, "deck regenerated");
    expect(run(cli, "simulate" + base_args).exit_code == 0, "outputs regenerated");
    const RunResult r = run(cli, "calibrate --config \"" + short_cfg + "\" --seed 9 --out \"" +
                                     scratch.string() + "\"");
    expect(r.exit_code == 1, "empty store exits 1");
    expect(r.output.find("empty store") != std::string::npos,
           "empty store message present");
  }

  fs::remove_all(scratch);
  if (g_failures == 0) {
    std::printf("cli checks passed\n");
    return 0;
  }
  std::printf("%d cli checks failed\n", g_failures);
  return 1;
}
