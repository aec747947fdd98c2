// Command-line front end: design / simulate / fit / validate / calibrate /
// summarize, driven by a single JSON config. Relative paths in files.* are
// resolved against the output directory (default: the config's directory).
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "fieldcal/config.hpp"
#include "fieldcal/io.hpp"
#include "fieldcal/predict.hpp"

namespace fs = std::filesystem;
using namespace fieldcal;

namespace {

struct Paths {
  fs::path out_dir;
  std::string operator()(const std::string& rel) const {
    fs::path p(rel);
    return p.is_absolute() ? p.string() : (out_dir / p).string();
  }
};

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
  return buf;
}

void write_run_log(const Paths& paths, const AppConfig& cfg, const std::string& cmd) {
  std::ofstream log(paths(cfg.files.run_log));
  log << "# fieldcal " << cmd << " " << timestamp() << "\n";
  log << config_echo(cfg) << "\n";
}

CoarseData load_coarse(const AppConfig& cfg, const Paths& paths) {
  const SpatialField f = read_field_csv(paths(cfg.files.coarse_field));
  if (f.rows() != cfg.grid.coarse_rows || f.cols() != cfg.grid.coarse_cols)
    throw InvalidInput(paths(cfg.files.coarse_field) + ": coarse field is " +
                       std::to_string(f.rows()) + "x" + std::to_string(f.cols()) +
                       " but the config says " + std::to_string(cfg.grid.coarse_rows) +
                       "x" + std::to_string(cfg.grid.coarse_cols));
  CoarseData yc;
  yc.rows = f.rows();
  yc.cols = f.cols();
  yc.y.resize(yc.size());
  for (int i = 0; i < yc.rows; ++i)
    for (int j = 0; j < yc.cols; ++j) yc.y(i * yc.cols + j) = f.values(i, j);
  return yc;
}

CoeffVector theta_from_coarse(const AppConfig& cfg, const CoarseData& yc) {
  const SpatialField filled = coarse_fill(yc, cfg.grid.rows, cfg.grid.cols);
  return select_coeffs(dct2_forward(filled), cfg.selection);
}

struct JoinedData {
  Eigen::MatrixXd x;  // [pvi | theta columns]
  Eigen::VectorXd z;  // transformed outputs
};

// Deck rows and simulator outputs joined on run id, restricted to a
// field-id range [field_lo, field_hi).
JoinedData join_deck_outputs(const DeckData& deck, const std::vector<SimOutput>& outs,
                             const AppConfig& cfg, int field_lo, int field_hi) {
  if (deck.rows.size() != outs.size())
    throw InvalidInput("deck and outputs differ in row count");
  std::vector<const SimOutput*> by_run(outs.size(), nullptr);
  for (const auto& o : outs) {
    if (o.run_id < 0 || o.run_id >= static_cast<int>(outs.size()))
      throw InvalidInput("output run_id outside the deck range");
    by_run[o.run_id] = &o;
  }
  std::vector<int> keep;
  for (std::size_t i = 0; i < deck.rows.size(); ++i) {
    const int f = deck.rows[i].field_id;
    if (f >= field_lo && f < field_hi) keep.push_back(static_cast<int>(i));
  }
  JoinedData jd;
  jd.x.resize(keep.size(), 1 + deck.k2);
  jd.z.resize(keep.size());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    const auto& row = deck.rows[keep[r]];
    const SimOutput* out = by_run[row.run_id];
    if (!out) throw InvalidInput("missing output for run " + std::to_string(row.run_id));
    jd.x(r, 0) = row.pvi;
    for (int j = 0; j < deck.k2; ++j) jd.x(r, 1 + j) = row.theta(j);
    jd.z(r) = cfg.forward.transform == "none" ? out->raw : out->transformed;
  }
  return jd;
}

int field_count(const DeckData& deck) {
  int n = 0;
  for (const auto& r : deck.rows) n = std::max(n, r.field_id + 1);
  return n;
}

int train_field_count(const DeckData& deck, const AppConfig& cfg) {
  const int n = field_count(deck);
  return std::min(n, static_cast<int>(std::ceil(cfg.fit.train_fraction * n)));
}

void write_histograms(const PosteriorStore& store, const AppConfig& cfg,
                      const Paths& paths) {
  const int k2 = store.draws.front().theta.k2();
  const int top = std::min(4, k2);
  fs::create_directories(paths(cfg.files.hist_dir));
  const fs::path dir(paths(cfg.files.hist_dir));

  const auto coef = [&](int j) {
    std::vector<double> v;
    v.reserve(store.draws.size());
    for (const auto& d : store.draws) v.push_back(d.theta.theta(j));
    return v;
  };

  for (int j = 0; j < top; ++j) {
    const auto v = coef(j);
    const double lo = *std::min_element(v.begin(), v.end());
    const double hi = *std::max_element(v.begin(), v.end());
    const double width = hi > lo ? (hi - lo) / 30.0 : 1.0;
    std::vector<int> counts(30, 0);
    for (double x : v) counts[std::clamp(static_cast<int>((x - lo) / width), 0, 29)]++;
    CsvTable table;
    table.header = {"bin_lo", "bin_hi", "count"};
    for (int b = 0; b < 30; ++b)
      table.rows.push_back(
          {lo + b * width, lo + (b + 1) * width, static_cast<double>(counts[b])});
    write_csv((dir / ("theta_" + std::to_string(j) + "_hist.csv")).string(), table);
  }

  for (int a = 0; a < top; ++a) {
    for (int b = a + 1; b < top; ++b) {
      const auto va = coef(a);
      const auto vb = coef(b);
      const double alo = *std::min_element(va.begin(), va.end());
      const double ahi = *std::max_element(va.begin(), va.end());
      const double blo = *std::min_element(vb.begin(), vb.end());
      const double bhi = *std::max_element(vb.begin(), vb.end());
      const double aw = ahi > alo ? (ahi - alo) / 20.0 : 1.0;
      const double bw = bhi > blo ? (bhi - blo) / 20.0 : 1.0;
      Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(20, 20);
      for (std::size_t i = 0; i < va.size(); ++i) {
        const int ia = std::clamp(static_cast<int>((va[i] - alo) / aw), 0, 19);
        const int ib = std::clamp(static_cast<int>((vb[i] - blo) / bw), 0, 19);
        counts(ia, ib)++;
      }
      CsvTable table;
      table.header = {"x_lo", "x_hi", "y_lo", "y_hi", "count"};
      for (int ia = 0; ia < 20; ++ia)
        for (int ib = 0; ib < 20; ++ib)
          table.rows.push_back({alo + ia * aw, alo + (ia + 1) * aw, blo + ib * bw,
                                blo + (ib + 1) * bw,
                                static_cast<double>(counts(ia, ib))});
      write_csv((dir / ("theta_" + std::to_string(a) + "_theta_" + std::to_string(b) +
                        "_hist2d.csv"))
                    .string(),
                table);
    }
  }
}

void write_field_quantiles(const PosteriorStore& store, const AppConfig& cfg,
                           const Paths& paths) {
  const int rows = cfg.grid.rows, cols = cfg.grid.cols;
  const std::size_t nd = store.draws.size();
  std::vector<std::vector<double>> cell(rows * cols, std::vector<double>(nd));
  for (std::size_t d = 0; d < nd; ++d) {
    const SpatialField f = reconstruct(store.draws[d].theta);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) cell[i * cols + j][d] = f.values(i, j);
  }
  Eigen::MatrixXd med(rows, cols), lo(rows, cols), hi(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      auto& v = cell[i * cols + j];
      med(i, j) = empirical_quantile(v, 0.5);
      lo(i, j) = empirical_quantile(v, 0.025);
      hi(i, j) = empirical_quantile(v, 0.975);
    }
  write_field_csv(paths(cfg.files.field_median), SpatialField(med));
  write_field_csv(paths(cfg.files.field_q025), SpatialField(lo));
  write_field_csv(paths(cfg.files.field_q975), SpatialField(hi));
}

void write_summary(const PosteriorStore& store, const std::string& path) {
  if (store.empty()) throw EmptyStore("no draws to summarize");
  std::ofstream f(path);
  if (!f) throw InvalidInput("cannot open for writing: " + path);
  f.precision(17);
  const double nd = static_cast<double>(store.draws.size());
  double mean_m = 0.0, mean_sigma = 0.0, mean_tau = 0.0;
  for (const auto& d : store.draws) {
    mean_m += d.state.m();
    mean_sigma += d.state.sigma_z2;
    mean_tau += d.state.tau_z;
  }
  const auto rate = [](long long acc, long long prop) {
    return prop > 0 ? static_cast<double>(acc) / static_cast<double>(prop) : 0.0;
  };
  const auto& c = store.counters;
  f << "quantity,value\n";
  f << "draws," << nd << "\n";
  f << "mean_m," << mean_m / nd << "\n";
  f << "mean_sigma_z2," << mean_sigma / nd << "\n";
  f << "mean_tau_z," << mean_tau / nd << "\n";
  f << "birth_rate," << rate(c.birth_accepted, c.birth_proposed) << "\n";
  f << "death_rate," << rate(c.death_accepted, c.death_proposed) << "\n";
  f << "change_rate," << rate(c.change_accepted, c.change_proposed) << "\n";
  f << "theta_rate," << rate(c.theta_accepted, c.theta_proposed) << "\n";
  f << "final_h," << store.final_h << "\n";
  const int k2 = store.draws.front().theta.k2();
  for (int j = 0; j < k2; ++j) {
    double mean = 0.0, sq = 0.0;
    for (const auto& d : store.draws) {
      mean += d.theta.theta(j);
      sq += d.theta.theta(j) * d.theta.theta(j);
    }
    mean /= nd;
    const double var = std::max(0.0, sq / nd - mean * mean);
    f << "theta_" << j << "_mean," << mean << "\n";
    f << "theta_" << j << "_sd," << std::sqrt(var) << "\n";
  }
}

int cmd_design(const AppConfig& cfg, const Paths& paths) {
  const CoarseData yc = load_coarse(cfg, paths);
  const DesignDeck deck = build_training_inputs(cfg.design, yc, cfg.selection,
                                                cfg.grid.rows, cfg.grid.cols);
  write_deck_csv(paths(cfg.files.deck), deck);

  fs::create_directories(paths(cfg.files.fields_dir));
  for (std::size_t f = 0; f < deck.field_thetas.size(); ++f) {
    CoeffVector cv;
    cv.theta = deck.field_thetas[f];
    cv.selection = cfg.selection;
    cv.field_rows = cfg.grid.rows;
    cv.field_cols = cfg.grid.cols;
    char name[32];
    std::snprintf(name, sizeof(name), "field_%03zu.csv", f);
    write_field_csv((fs::path(paths(cfg.files.fields_dir)) / name).string(),
                    reconstruct(cv));
  }
  write_run_log(paths, cfg, "design");
  std::cout << "design: " << deck.rows.size() << " simulator rows over "
            << deck.field_thetas.size() << " fields -> " << paths(cfg.files.deck)
            << "\n";
  return 0;
}

int cmd_simulate(const AppConfig& cfg, const Paths& paths) {
  const DeckData deck_data = read_deck_csv(paths(cfg.files.deck));
  if (deck_data.k2 != cfg.selection.count())
    throw InvalidInput("deck theta columns do not match the configured selection");
  DesignDeck deck;
  deck.selection = cfg.selection;
  deck.field_rows = cfg.grid.rows;
  deck.field_cols = cfg.grid.cols;
  deck.theta_obs = Eigen::VectorXd::Zero(deck_data.k2);
  deck.rows = deck_data.rows;

  const ToyWatercut model(cfg.forward.params);
  const auto outputs = simulate_dataset(deck, model, cfg.forward.noise_sd,
                                        cfg.forward.seed, cfg.forward.clamp_eps);
  write_outputs_csv(paths(cfg.files.outputs), outputs);
  write_run_log(paths, cfg, "simulate");
  std::cout << "simulate: " << outputs.size() << " outputs -> "
            << paths(cfg.files.outputs) << "\n";
  return 0;
}

int cmd_fit(const AppConfig& cfg, const Paths& paths) {
  const DeckData deck = read_deck_csv(paths(cfg.files.deck));
  const auto outputs = read_outputs_csv(paths(cfg.files.outputs));
  const int n_train = train_field_count(deck, cfg);
  const JoinedData train = join_deck_outputs(deck, outputs, cfg, 0, n_train);

  TrainingSet data = make_training_set(train.x, train.z, Eigen::MatrixXd(0, 1),
                                       Eigen::VectorXd(), 1, deck.k2);
  const PosteriorStore store =
      run_chain(cfg.chain, data, ObservationSet{}, cfg.hp,
                BmarsState::intercept_only(), CoeffVector{});

  Snapshot snap;
  snap.k1 = 1;
  snap.k2 = deck.k2;
  snap.scaling = data.scaling;
  snap.hp = cfg.hp;
  snap.store = store;
  save_snapshot(paths(cfg.files.snapshot), snap);
  write_trace_csv(paths(cfg.files.trace), store, false);
  write_run_log(paths, cfg, "fit");

  double mean_m = 0.0;
  for (const auto& d : store.draws) mean_m += d.state.m();
  std::cout << "fit: " << store.draws.size() << " draws on " << train.z.size()
            << " rows (fields 0.." << n_train - 1 << "), mean m = "
            << mean_m / std::max<std::size_t>(store.draws.size(), 1) << " -> "
            << paths(cfg.files.snapshot) << "\n";
  return 0;
}

int cmd_validate(const AppConfig& cfg, const Paths& paths) {
  const Snapshot snap = load_snapshot(paths(cfg.files.snapshot));
  if (snap.store.empty()) throw EmptyStore("snapshot has no draws");
  const DeckData deck = read_deck_csv(paths(cfg.files.deck));
  const auto outputs = read_outputs_csv(paths(cfg.files.outputs));
  const int n_train = train_field_count(deck, cfg);
  const int n_fields = field_count(deck);
  if (n_train >= n_fields)
    throw InvalidConfig("train_fraction leaves no test fields");
  const JoinedData test = join_deck_outputs(deck, outputs, cfg, n_train, n_fields);

  const auto [rows, metrics] = validate_predictions(snap.store, snap.scaling, test.x,
                                                    test.z, cfg.chain.seed);
  CsvTable table;
  table.header = {"simulated", "fitted_mean", "q025", "q975"};
  for (const auto& r : rows)
    table.rows.push_back({r.simulated, r.fitted_mean, r.lo, r.hi});
  write_csv(paths(cfg.files.validation), table);

  {
    std::ofstream f(paths(cfg.files.metrics));
    if (!f) throw InvalidInput("cannot open for writing: " + paths(cfg.files.metrics));
    f.precision(17);
    f << "metric,value\n";
    f << "rmse," << metrics.rmse << "\n";
    if (metrics.r2_defined) f << "r2," << metrics.r2 << "\n";
    f << "coverage95," << metrics.coverage95 << "\n";
    f << "n_test," << rows.size() << "\n";
  }
  write_run_log(paths, cfg, "validate");
  std::cout << "validate: n=" << rows.size() << " rmse=" << metrics.rmse;
  if (metrics.r2_defined) std::cout << " r2=" << metrics.r2;
  std::cout << " coverage95=" << metrics.coverage95 << "\n";
  return 0;
}

int cmd_calibrate(const AppConfig& cfg, const Paths& paths) {
  const DeckData deck = read_deck_csv(paths(cfg.files.deck));
  const auto sim_outputs = read_outputs_csv(paths(cfg.files.outputs));
  const JoinedData sim =
      join_deck_outputs(deck, sim_outputs, cfg, 0, field_count(deck));

  const auto observed = read_outputs_csv(paths(cfg.files.observed));
  if (observed.empty()) throw InvalidInput("observed output file is empty");
  Eigen::MatrixXd x_r(observed.size(), 1);
  Eigen::VectorXd z_r(observed.size());
  for (std::size_t i = 0; i < observed.size(); ++i) {
    x_r(i, 0) = observed[i].pvi;
    z_r(i) = cfg.forward.transform == "none"
                 ? observed[i].raw
                 : clamped_logit(observed[i].raw, cfg.forward.clamp_eps);
  }

  const CoarseData yc = load_coarse(cfg, paths);
  const auto fine = read_fine_obs_csv(paths(cfg.files.fine_obs));

  TrainingSet data = make_training_set(sim.x, sim.z, x_r, z_r, 1, deck.k2);
  ObservationSet obs;
  obs.z_r = z_r;
  obs.x_r = x_r;
  obs.coarse = yc;
  obs.fine = fine;

  const CoeffVector theta0 = theta_from_coarse(cfg, yc);
  const PosteriorStore store = run_chain(cfg.chain, data, obs, cfg.hp,
                                         BmarsState::intercept_only(), theta0);
  if (store.empty()) throw EmptyStore("empty store: no post-burn-in draws");

  Snapshot snap;
  snap.k1 = 1;
  snap.k2 = deck.k2;
  snap.scaling = data.scaling;
  snap.hp = cfg.hp;
  snap.has_field = true;
  snap.field_rows = cfg.grid.rows;
  snap.field_cols = cfg.grid.cols;
  snap.selection = cfg.selection;
  snap.store = store;
  save_snapshot(paths(cfg.files.snapshot), snap);
  write_trace_csv(paths(cfg.files.trace), store, true);
  write_field_quantiles(store, cfg, paths);
  write_histograms(store, cfg, paths);
  write_summary(store, paths(cfg.files.summary));
  write_run_log(paths, cfg, "calibrate");

  std::cout << "calibrate: " << store.draws.size() << " draws, theta acceptance "
            << store.counters.theta_rate() << " -> " << paths(cfg.files.snapshot)
            << "\n";
  return 0;
}

int cmd_summarize(const AppConfig& cfg, const Paths& paths) {
  const Snapshot snap = load_snapshot(paths(cfg.files.snapshot));
  write_summary(snap.store, paths(cfg.files.summary));
  std::cout << "summarize: " << snap.store.draws.size() << " draws -> "
            << paths(cfg.files.summary) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fieldcal: emulator-based calibration of 2D spatial fields"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::string> out_override;

  const char* names[] = {"design", "simulate", "fit",
                         "validate", "calibrate", "summarize"};
  const char* descs[] = {"draw the simulator input deck",
                         "run the toy forward model over a deck",
                         "fit the spline emulator on simulator data",
                         "held-out validation of a fitted emulator",
                         "sample the joint posterior with observed data",
                         "summarize a posterior snapshot"};
  for (int i = 0; i < 6; ++i) {
    auto* sub = app.add_subcommand(names[i], descs[i]);
    sub->add_option("--config", config_path, "JSON configuration file")->required();
    sub->add_option("--seed", seed_override, "override every seed in the config");
    sub->add_option("--out", out_override,
                    "output directory (default: the config file's directory)");
  }

  CLI11_PARSE(app, argc, argv);

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    AppConfig cfg = load_config(config_path);
    if (seed_override) {
      cfg.design.seed = *seed_override;
      cfg.chain.seed = *seed_override;
      cfg.forward.seed = *seed_override;
    }
    Paths paths;
    paths.out_dir = out_override
                        ? fs::path(*out_override)
                        : fs::absolute(fs::path(config_path)).parent_path();
    fs::create_directories(paths.out_dir);

    if (cmd == "design") return cmd_design(cfg, paths);
    if (cmd == "simulate") return cmd_simulate(cfg, paths);
    if (cmd == "fit") return cmd_fit(cfg, paths);
    if (cmd == "validate") return cmd_validate(cfg, paths);
    if (cmd == "calibrate") return cmd_calibrate(cfg, paths);
    if (cmd == "summarize") return cmd_summarize(cfg, paths);
    std::cerr << "error: unknown command " << cmd << "\n";
    return 2;
  } catch (const DegenerateState& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
