#include "fieldcal/io.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace fieldcal {

using nlohmann::json;

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open for writing: " + path);
  out << std::setprecision(17);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open for reading: " + path);
  return in;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_double(const std::string& s, const std::string& path, int line_no) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw InvalidInput(path + ":" + std::to_string(line_no) + ": bad number '" + s + "'");
  }
}

json scaling_to_json(const PredictorScaling& s) {
  json j;
  j["offset"] = std::vector<double>(s.offset.data(), s.offset.data() + s.offset.size());
  j["scale"] = std::vector<double>(s.scale.data(), s.scale.data() + s.scale.size());
  return j;
}

PredictorScaling scaling_from_json(const json& j) {
  PredictorScaling s;
  const auto off = j.at("offset").get<std::vector<double>>();
  const auto sc = j.at("scale").get<std::vector<double>>();
  s.offset = Eigen::Map<const Eigen::VectorXd>(off.data(), off.size());
  s.scale = Eigen::Map<const Eigen::VectorXd>(sc.data(), sc.size());
  return s;
}

const char* move_name(MoveKind k) {
  switch (k) {
    case MoveKind::kBirth: return "birth";
    case MoveKind::kDeath: return "death";
    case MoveKind::kChange: return "change";
    case MoveKind::kNone: return "none";
  }
  return "none";
}

MoveKind move_from_name(const std::string& s) {
  if (s == "birth") return MoveKind::kBirth;
  if (s == "death") return MoveKind::kDeath;
  if (s == "change") return MoveKind::kChange;
  return MoveKind::kNone;
}

}  // namespace

void write_field_csv(const std::string& path, const SpatialField& field) {
  field.require_valid();
  auto out = open_out(path);
  out << field.rows() << "," << field.cols() << "\n";
  for (int i = 0; i < field.rows(); ++i) {
    for (int j = 0; j < field.cols(); ++j) {
      if (j) out << ",";
      out << field.values(i, j);
    }
    out << "\n";
  }
}

SpatialField read_field_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput(path + ": empty field file");
  const auto dims = split_line(line);
  if (dims.size() != 2) throw InvalidInput(path + ":1: expected 'rows,cols'");
  const int rows = static_cast<int>(parse_double(dims[0], path, 1));
  const int cols = static_cast<int>(parse_double(dims[1], path, 1));
  if (rows < 1 || cols < 1) throw InvalidInput(path + ": bad dimensions");

  Eigen::MatrixXd values(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (!std::getline(in, line))
      throw InvalidInput(path + ": expected " + std::to_string(rows) + " data rows");
    const auto cells = split_line(line);
    if (static_cast<int>(cells.size()) != cols)
      throw InvalidInput(path + ":" + std::to_string(i + 2) + ": expected " +
                         std::to_string(cols) + " values");
    for (int j = 0; j < cols; ++j) values(i, j) = parse_double(cells[j], path, i + 2);
  }
  SpatialField f(std::move(values));
  f.require_valid();
  return f;
}

void write_csv(const std::string& path, const CsvTable& table) {
  auto out = open_out(path);
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (j) out << ",";
    out << table.header[j];
  }
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ",";
      out << row[j];
    }
    out << "\n";
  }
}

CsvTable read_csv(const std::string& path) {
  auto in = open_in(path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput(path + ": empty csv");
  table.header = split_line(line);
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != table.header.size())
      throw InvalidInput(path + ":" + std::to_string(line_no) + ": ragged row");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_double(c, path, line_no));
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_deck_csv(const std::string& path, const DesignDeck& deck) {
  auto out = open_out(path);
  out << "run_id,field_id";
  for (int j = 0; j < deck.k2(); ++j) out << ",theta_" << j;
  out << ",pvi\n";
  for (const auto& row : deck.rows) {
    out << row.run_id << "," << row.field_id;
    for (int j = 0; j < row.theta.size(); ++j) out << "," << row.theta(j);
    out << "," << row.pvi << "\n";
  }
}

DeckData read_deck_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  if (table.header.size() < 3 || table.header[0] != "run_id" ||
      table.header[1] != "field_id" || table.header.back() != "pvi")
    throw InvalidInput(path + ": not a design deck (bad header)");
  DeckData deck;
  deck.k2 = static_cast<int>(table.header.size()) - 3;
  for (const auto& r : table.rows) {
    DeckRow row;
    row.run_id = static_cast<int>(r[0]);
    row.field_id = static_cast<int>(r[1]);
    row.theta.resize(deck.k2);
    for (int j = 0; j < deck.k2; ++j) row.theta(j) = r[2 + j];
    row.pvi = r.back();
    deck.rows.push_back(std::move(row));
  }
  return deck;
}

void write_outputs_csv(const std::string& path, const std::vector<SimOutput>& outputs) {
  CsvTable table;
  table.header = {"run_id", "pvi", "raw", "transformed"};
  for (const auto& o : outputs)
    table.rows.push_back({static_cast<double>(o.run_id), o.pvi, o.raw, o.transformed});
  write_csv(path, table);
}

std::vector<SimOutput> read_outputs_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  if (table.header.size() != 4 || table.header[0] != "run_id")
    throw InvalidInput(path + ": not an outputs file (bad header)");
  std::vector<SimOutput> out;
  for (const auto& r : table.rows)
    out.push_back(SimOutput{static_cast<int>(r[0]), r[1], r[2], r[3]});
  return out;
}

void write_fine_obs_csv(const std::string& path, const std::vector<FineObs>& obs) {
  CsvTable table;
  table.header = {"row", "col", "value"};
  for (const auto& o : obs)
    table.rows.push_back({static_cast<double>(o.row), static_cast<double>(o.col), o.value});
  write_csv(path, table);
}

std::vector<FineObs> read_fine_obs_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  if (table.header != std::vector<std::string>{"row", "col", "value"})
    throw InvalidInput(path + ": not a fine-observation file (bad header)");
  std::vector<FineObs> out;
  for (const auto& r : table.rows)
    out.push_back(FineObs{static_cast<int>(r[0]), static_cast<int>(r[1]), r[2]});
  return out;
}

void save_snapshot(const std::string& path, const Snapshot& snap) {
  json j;
  j["format"] = "fieldcal-snapshot-v1";
  j["k1"] = snap.k1;
  j["k2"] = snap.k2;
  j["scaling"] = scaling_to_json(snap.scaling);
  j["hyperparams"] = {{"a_z", snap.hp.a_z},     {"b_z", snap.hp.b_z},
                      {"a_tau", snap.hp.a_tau}, {"b_tau", snap.hp.b_tau},
                      {"a_c", snap.hp.a_c},     {"b_c", snap.hp.b_c},
                      {"a_k", snap.hp.a_k},     {"b_k", snap.hp.b_k},
                      {"a_o", snap.hp.a_o},     {"b_o", snap.hp.b_o},
                      {"alpha", snap.hp.alpha}, {"lambda", snap.hp.lambda},
                      {"m_max", snap.hp.m_max}, {"max_interaction", snap.hp.max_interaction}};
  if (snap.has_field) {
    j["field"] = {{"rows", snap.field_rows},
                  {"cols", snap.field_cols},
                  {"selection_shape",
                   snap.selection.shape == SelectionShape::kSquare ? "square" : "triangle"},
                  {"selection_w", snap.selection.w}};
  }

  json draws = json::array();
  for (const auto& d : snap.store.draws) {
    json jd;
    jd["iteration"] = d.iteration;
    jd["move"] = move_name(d.move);
    jd["move_accepted"] = d.move_accepted;
    jd["m"] = d.state.m();
    jd["sigma_z2"] = d.state.sigma_z2;
    jd["tau_z"] = d.state.tau_z;
    jd["beta"] = std::vector<double>(d.state.beta.data(),
                                     d.state.beta.data() + d.state.beta.size());
    json bases = json::array();
    for (const auto& b : d.state.bases) {
      json jb;
      std::vector<int> vars, signs;
      std::vector<double> knots;
      for (const auto& f : b.factors) {
        vars.push_back(f.var);
        knots.push_back(f.knot);
        signs.push_back(f.sign);
      }
      jb["vars"] = vars;
      jb["knots"] = knots;
      jb["signs"] = signs;
      bases.push_back(jb);
    }
    jd["bases"] = bases;
    if (d.theta.k2() > 0) {
      jd["theta"] = std::vector<double>(d.theta.theta.data(),
                                        d.theta.theta.data() + d.theta.theta.size());
      if (std::isfinite(d.log_pi2)) jd["log_pi2"] = d.log_pi2;
    }
    draws.push_back(std::move(jd));
  }
  j["draws"] = std::move(draws);
  j["counters"] = {{"birth_proposed", snap.store.counters.birth_proposed},
                   {"birth_accepted", snap.store.counters.birth_accepted},
                   {"death_proposed", snap.store.counters.death_proposed},
                   {"death_accepted", snap.store.counters.death_accepted},
                   {"change_proposed", snap.store.counters.change_proposed},
                   {"change_accepted", snap.store.counters.change_accepted},
                   {"theta_proposed", snap.store.counters.theta_proposed},
                   {"theta_accepted", snap.store.counters.theta_accepted}};
  j["final_h"] = snap.store.final_h;

  auto out = open_out(path);
  out << j.dump(1) << "\n";
}

Snapshot load_snapshot(const std::string& path) {
  auto in = open_in(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidInput(path + ": bad snapshot json: " + e.what());
  }
  try {
    if (j.at("format") != "fieldcal-snapshot-v1")
      throw InvalidInput(path + ": unknown snapshot format");
    Snapshot snap;
    snap.k1 = j.at("k1").get<int>();
    snap.k2 = j.at("k2").get<int>();
    snap.scaling = scaling_from_json(j.at("scaling"));
    const auto& h = j.at("hyperparams");
    snap.hp.a_z = h.at("a_z");
    snap.hp.b_z = h.at("b_z");
    snap.hp.a_tau = h.at("a_tau");
    snap.hp.b_tau = h.at("b_tau");
    snap.hp.a_c = h.at("a_c");
    snap.hp.b_c = h.at("b_c");
    snap.hp.a_k = h.at("a_k");
    snap.hp.b_k = h.at("b_k");
    snap.hp.a_o = h.at("a_o");
    snap.hp.b_o = h.at("b_o");
    snap.hp.alpha = h.at("alpha");
    snap.hp.lambda = h.at("lambda");
    snap.hp.m_max = h.at("m_max");
    snap.hp.max_interaction = h.at("max_interaction");
    if (j.contains("field")) {
      snap.has_field = true;
      snap.field_rows = j["field"].at("rows");
      snap.field_cols = j["field"].at("cols");
      snap.selection.shape = j["field"].at("selection_shape") == "square"
                                 ? SelectionShape::kSquare
                                 : SelectionShape::kTriangle;
      snap.selection.w = j["field"].at("selection_w");
    }
    for (const auto& jd : j.at("draws")) {
      Draw d;
      d.iteration = jd.at("iteration").get<long long>();
      d.move = move_from_name(jd.at("move").get<std::string>());
      d.move_accepted = jd.at("move_accepted").get<bool>();
      d.state.sigma_z2 = jd.at("sigma_z2");
      d.state.tau_z = jd.at("tau_z");
      const auto beta = jd.at("beta").get<std::vector<double>>();
      d.state.beta = Eigen::Map<const Eigen::VectorXd>(beta.data(), beta.size());
      for (const auto& jb : jd.at("bases")) {
        BasisFunction b;
        const auto vars = jb.at("vars").get<std::vector<int>>();
        const auto knots = jb.at("knots").get<std::vector<double>>();
        const auto signs = jb.at("signs").get<std::vector<int>>();
        for (std::size_t i = 0; i < vars.size(); ++i)
          b.factors.push_back(HingeFactor{vars[i], knots[i], signs[i]});
        d.state.bases.push_back(std::move(b));
      }
      if (jd.contains("m") && jd["m"].get<int>() != d.state.m())
        throw InvalidInput(path + ": draw basis list does not match its m");
      if (jd.contains("theta")) {
        const auto th = jd.at("theta").get<std::vector<double>>();
        d.theta.theta = Eigen::Map<const Eigen::VectorXd>(th.data(), th.size());
        d.theta.selection = snap.selection;
        d.theta.field_rows = snap.field_rows;
        d.theta.field_cols = snap.field_cols;
        if (jd.contains("log_pi2")) d.log_pi2 = jd["log_pi2"];
      }
      snap.store.draws.push_back(std::move(d));
    }
    const auto& c = j.at("counters");
    snap.store.counters.birth_proposed = c.at("birth_proposed");
    snap.store.counters.birth_accepted = c.at("birth_accepted");
    snap.store.counters.death_proposed = c.at("death_proposed");
    snap.store.counters.death_accepted = c.at("death_accepted");
    snap.store.counters.change_proposed = c.at("change_proposed");
    snap.store.counters.change_accepted = c.at("change_accepted");
    snap.store.counters.theta_proposed = c.at("theta_proposed");
    snap.store.counters.theta_accepted = c.at("theta_accepted");
    snap.store.final_h = j.at("final_h");
    return snap;
  } catch (const json::exception& e) {
    throw InvalidInput(path + ": bad snapshot json: " + e.what());
  }
}

void write_trace_csv(const std::string& path, const PosteriorStore& store,
                     bool with_theta) {
  auto out = open_out(path);
  out << "iteration,m,sigma_z2,tau_z";
  const int k2 = store.draws.empty() ? 0 : store.draws.front().theta.k2();
  if (with_theta) {
    for (int j = 0; j < k2; ++j) out << ",theta_" << j;
    out << ",log_pi2";
  }
  out << "\n";
  for (const auto& d : store.draws) {
    out << d.iteration << "," << d.state.m() << "," << d.state.sigma_z2 << ","
        << d.state.tau_z;
    if (with_theta) {
      for (int j = 0; j < k2; ++j) out << "," << d.theta.theta(j);
      out << "," << d.log_pi2;
    }
    out << "\n";
  }
}

}  // namespace fieldcal
