#include "fieldcal/config.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

#include "fieldcal/bmars.hpp"

namespace fieldcal {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::string& section,
                    std::initializer_list<const char*> known) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known)
      if (key == k) ok = true;
    if (!ok) throw InvalidConfig("unknown config key '" + section + "." + key + "'");
  }
}

template <typename T>
void maybe(const json& j, const char* key, T& target) {
  if (j.contains(key)) target = j.at(key).get<T>();
}

}  // namespace

double AppConfig::transformed_output(double raw) const {
  if (forward.transform == "none") return raw;
  return clamped_logit(raw, forward.clamp_eps);
}

void AppConfig::validate() const {
  if (grid.rows < 1 || grid.cols < 1) throw InvalidConfig("grid dims must be >= 1");
  if (grid.coarse_rows < 1 || grid.coarse_cols < 1)
    throw InvalidConfig("coarse dims must be >= 1");
  if (grid.rows % grid.coarse_rows != 0 || grid.cols % grid.coarse_cols != 0)
    throw InvalidConfig("coarse dims must divide the fine grid");
  if (selection.w < 1) throw InvalidConfig("selection w must be >= 1");
  if (selection.w > grid.rows || selection.w > grid.cols)
    throw InvalidConfig("selection does not fit inside the grid");
  design.validate();
  hp.validate();
  chain.validate();
  if (forward.transform != "logit" && forward.transform != "none")
    throw InvalidConfig("forward.transform must be 'logit' or 'none'");
  if (!(forward.clamp_eps > 0.0 && forward.clamp_eps < 0.5))
    throw InvalidConfig("forward.clamp_eps must be in (0, 0.5)");
  if (forward.noise_sd < 0.0) throw InvalidConfig("forward.noise_sd must be >= 0");
  if (!(fit.train_fraction > 0.0 && fit.train_fraction <= 1.0))
    throw InvalidConfig("fit.train_fraction must be in (0, 1]");
}

AppConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidConfig(path + ": bad json: " + e.what());
  }

  AppConfig cfg;
  // defaults chosen for the toy pipeline; every value can be overridden
  cfg.design.num_candidates = 40;
  cfg.design.num_selected = 10;
  cfg.design.pvi_grid = {0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85, 0.95};
  cfg.design.seed = 1;
  cfg.chain.n_iter = 10000;
  cfg.chain.burn_in = 2000;
  cfg.chain.thin = 10;
  cfg.chain.h = 0.1;
  cfg.chain.seed = 1;

  try {
    reject_unknown(j, "", {"grid", "selection", "design", "hyperparams", "chain",
                           "forward", "fit", "files"});
    if (j.contains("grid")) {
      const auto& g = j["grid"];
      reject_unknown(g, "grid", {"rows", "cols", "coarse_rows", "coarse_cols"});
      maybe(g, "rows", cfg.grid.rows);
      maybe(g, "cols", cfg.grid.cols);
      maybe(g, "coarse_rows", cfg.grid.coarse_rows);
      maybe(g, "coarse_cols", cfg.grid.coarse_cols);
    }
    if (j.contains("selection")) {
      const auto& s = j["selection"];
      reject_unknown(s, "selection", {"shape", "w"});
      if (s.contains("shape")) {
        const std::string shape = s.at("shape").get<std::string>();
        if (shape == "square") cfg.selection.shape = SelectionShape::kSquare;
        else if (shape == "triangle") cfg.selection.shape = SelectionShape::kTriangle;
        else throw InvalidConfig("selection.shape must be 'square' or 'triangle'");
      }
      maybe(s, "w", cfg.selection.w);
    }
    if (j.contains("design")) {
      const auto& d = j["design"];
      reject_unknown(d, "design", {"N_s", "n_s", "gamma", "pvi_grid", "pvi_count", "seed"});
      maybe(d, "N_s", cfg.design.num_candidates);
      maybe(d, "n_s", cfg.design.num_selected);
      if (d.contains("gamma") && !d["gamma"].is_null())
        cfg.design.gamma = d["gamma"].get<double>();
      if (d.contains("pvi_grid"))
        cfg.design.pvi_grid = d["pvi_grid"].get<std::vector<double>>();
      else if (d.contains("pvi_count")) {
        const int c = d["pvi_count"].get<int>();
        if (c < 1) throw InvalidConfig("design.pvi_count must be >= 1");
        cfg.design.pvi_grid.clear();
        for (int i = 0; i < c; ++i)
          cfg.design.pvi_grid.push_back((i + 0.5) / static_cast<double>(c));
      }
      maybe(d, "seed", cfg.design.seed);
    }
    if (j.contains("hyperparams")) {
      const auto& h = j["hyperparams"];
      reject_unknown(h, "hyperparams",
                     {"a_z", "b_z", "a_tau", "b_tau", "a_c", "b_c", "a_k", "b_k",
                      "a_o", "b_o", "alpha", "lambda", "m_max", "max_interaction"});
      maybe(h, "a_z", cfg.hp.a_z);
      maybe(h, "b_z", cfg.hp.b_z);
      maybe(h, "a_tau", cfg.hp.a_tau);
      maybe(h, "b_tau", cfg.hp.b_tau);
      maybe(h, "a_c", cfg.hp.a_c);
      maybe(h, "b_c", cfg.hp.b_c);
      maybe(h, "a_k", cfg.hp.a_k);
      maybe(h, "b_k", cfg.hp.b_k);
      maybe(h, "a_o", cfg.hp.a_o);
      maybe(h, "b_o", cfg.hp.b_o);
      maybe(h, "alpha", cfg.hp.alpha);
      maybe(h, "lambda", cfg.hp.lambda);
      maybe(h, "m_max", cfg.hp.m_max);
      maybe(h, "max_interaction", cfg.hp.max_interaction);
    }
    if (j.contains("chain")) {
      const auto& c = j["chain"];
      reject_unknown(c, "chain",
                     {"n_iter", "burn_in", "thin", "h", "seed", "adapt_h",
                      "birth_prob", "death_prob", "change_prob"});
      maybe(c, "n_iter", cfg.chain.n_iter);
      maybe(c, "burn_in", cfg.chain.burn_in);
      maybe(c, "thin", cfg.chain.thin);
      maybe(c, "h", cfg.chain.h);
      maybe(c, "seed", cfg.chain.seed);
      maybe(c, "adapt_h", cfg.chain.adapt_h);
      maybe(c, "birth_prob", cfg.chain.move_probs.birth);
      maybe(c, "death_prob", cfg.chain.move_probs.death);
      maybe(c, "change_prob", cfg.chain.move_probs.change);
    }
    if (j.contains("forward")) {
      const auto& f = j["forward"];
      reject_unknown(f, "forward",
                     {"a", "c0", "c1", "band_row", "noise_sd", "seed", "transform",
                      "clamp_eps"});
      maybe(f, "a", cfg.forward.params.a);
      maybe(f, "c0", cfg.forward.params.c0);
      maybe(f, "c1", cfg.forward.params.c1);
      maybe(f, "band_row", cfg.forward.params.band_row);
      maybe(f, "noise_sd", cfg.forward.noise_sd);
      maybe(f, "seed", cfg.forward.seed);
      maybe(f, "transform", cfg.forward.transform);
      maybe(f, "clamp_eps", cfg.forward.clamp_eps);
    }
    if (j.contains("fit")) {
      const auto& f = j["fit"];
      reject_unknown(f, "fit", {"train_fraction"});
      maybe(f, "train_fraction", cfg.fit.train_fraction);
    }
    if (j.contains("files")) {
      const auto& f = j["files"];
      reject_unknown(f, "files",
                     {"coarse_field", "deck", "fields_dir", "outputs", "observed",
                      "fine_obs", "snapshot", "trace", "validation", "metrics",
                      "field_median", "field_q025", "field_q975", "hist_dir",
                      "summary", "run_log"});
      maybe(f, "coarse_field", cfg.files.coarse_field);
      maybe(f, "deck", cfg.files.deck);
      maybe(f, "fields_dir", cfg.files.fields_dir);
      maybe(f, "outputs", cfg.files.outputs);
      maybe(f, "observed", cfg.files.observed);
      maybe(f, "fine_obs", cfg.files.fine_obs);
      maybe(f, "snapshot", cfg.files.snapshot);
      maybe(f, "trace", cfg.files.trace);
      maybe(f, "validation", cfg.files.validation);
      maybe(f, "metrics", cfg.files.metrics);
      maybe(f, "field_median", cfg.files.field_median);
      maybe(f, "field_q025", cfg.files.field_q025);
      maybe(f, "field_q975", cfg.files.field_q975);
      maybe(f, "hist_dir", cfg.files.hist_dir);
      maybe(f, "summary", cfg.files.summary);
      maybe(f, "run_log", cfg.files.run_log);
    }
  } catch (const json::exception& e) {
    throw InvalidConfig(path + ": bad config value: " + e.what());
  }

  cfg.validate();
  return cfg;
}

std::string config_echo(const AppConfig& cfg) {
  json j;
  j["grid"] = {{"rows", cfg.grid.rows},
               {"cols", cfg.grid.cols},
               {"coarse_rows", cfg.grid.coarse_rows},
               {"coarse_cols", cfg.grid.coarse_cols}};
  j["selection"] = {
      {"shape", cfg.selection.shape == SelectionShape::kSquare ? "square" : "triangle"},
      {"w", cfg.selection.w}};
  j["design"] = {{"N_s", cfg.design.num_candidates},
                 {"n_s", cfg.design.num_selected},
                 {"pvi_grid", cfg.design.pvi_grid},
                 {"seed", cfg.design.seed}};
  if (cfg.design.gamma) j["design"]["gamma"] = *cfg.design.gamma;
  else j["design"]["gamma"] = nullptr;  // resolved at design time to var(theta_obs)
  j["hyperparams"] = {{"a_z", cfg.hp.a_z},     {"b_z", cfg.hp.b_z},
                      {"a_tau", cfg.hp.a_tau}, {"b_tau", cfg.hp.b_tau},
                      {"a_c", cfg.hp.a_c},     {"b_c", cfg.hp.b_c},
                      {"a_k", cfg.hp.a_k},     {"b_k", cfg.hp.b_k},
                      {"a_o", cfg.hp.a_o},     {"b_o", cfg.hp.b_o},
                      {"alpha", cfg.hp.alpha}, {"lambda", cfg.hp.lambda},
                      {"m_max", cfg.hp.m_max},
                      {"max_interaction", cfg.hp.max_interaction}};
  j["chain"] = {{"n_iter", cfg.chain.n_iter},   {"burn_in", cfg.chain.burn_in},
                {"thin", cfg.chain.thin},       {"h", cfg.chain.h},
                {"seed", cfg.chain.seed},       {"adapt_h", cfg.chain.adapt_h},
                {"birth_prob", cfg.chain.move_probs.birth},
                {"death_prob", cfg.chain.move_probs.death},
                {"change_prob", cfg.chain.move_probs.change}};
  j["forward"] = {{"a", cfg.forward.params.a},
                  {"c0", cfg.forward.params.c0},
                  {"c1", cfg.forward.params.c1},
                  {"band_row", cfg.forward.params.band_row},
                  {"noise_sd", cfg.forward.noise_sd},
                  {"seed", cfg.forward.seed},
                  {"transform", cfg.forward.transform},
                  {"clamp_eps", cfg.forward.clamp_eps}};
  j["fit"] = {{"train_fraction", cfg.fit.train_fraction}};
  j["files"] = {{"coarse_field", cfg.files.coarse_field},
                {"deck", cfg.files.deck},
                {"fields_dir", cfg.files.fields_dir},
                {"outputs", cfg.files.outputs},
                {"observed", cfg.files.observed},
                {"fine_obs", cfg.files.fine_obs},
                {"snapshot", cfg.files.snapshot},
                {"trace", cfg.files.trace},
                {"validation", cfg.files.validation},
                {"metrics", cfg.files.metrics},
                {"field_median", cfg.files.field_median},
                {"field_q025", cfg.files.field_q025},
                {"field_q975", cfg.files.field_q975},
                {"hist_dir", cfg.files.hist_dir},
                {"summary", cfg.files.summary},
                {"run_log", cfg.files.run_log}};
  return j.dump(2);
}

}  // namespace fieldcal
