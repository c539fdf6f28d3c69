#include "spg/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "spg/errors.hpp"

namespace spg {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kGameSchema = "spg-game/1";
constexpr const char* kScenarioSchema = "spg-scenario/1";

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw SchemaError(path + ": " + what);
}

const json& field(const json& obj, const std::string& path,
                  const std::string& key) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, "missing field '" + key + "'");
  return *it;
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known) fail(path + "." + item.key(), "unknown field");
  }
}

double read_num(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "non-finite number");
  return v;
}

Vec read_vec(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  Vec v(j.size());
  for (size_t k = 0; k < j.size(); ++k)
    v(static_cast<int>(k)) = read_num(j[k], path + "[" + std::to_string(k) + "]");
  return v;
}

// Row-major nested arrays. An empty array is a matrix with zero rows and
// `cols_if_empty` columns.
Mat read_mat(const json& j, const std::string& path, int cols_if_empty) {
  if (!j.is_array()) fail(path, "expected an array of rows");
  if (j.empty()) return Mat(0, cols_if_empty);
  const size_t rows = j.size();
  if (!j[0].is_array()) fail(path + "[0]", "expected an array of numbers");
  const size_t cols = j[0].size();
  Mat m(static_cast<int>(rows), static_cast<int>(cols));
  for (size_t rr = 0; rr < rows; ++rr) {
    const std::string rp = path + "[" + std::to_string(rr) + "]";
    if (!j[rr].is_array() || j[rr].size() != cols)
      fail(rp, "ragged matrix row");
    for (size_t cc = 0; cc < cols; ++cc)
      m(static_cast<int>(rr), static_cast<int>(cc)) =
          read_num(j[rr][cc], rp + "[" + std::to_string(cc) + "]");
  }
  return m;
}

json vec_to_json(const Vec& v) {
  json a = json::array();
  for (int k = 0; k < v.size(); ++k) a.push_back(v(k));
  return a;
}

json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (int rr = 0; rr < m.rows(); ++rr) {
    json row = json::array();
    for (int cc = 0; cc < m.cols(); ++cc) row.push_back(m(rr, cc));
    rows.push_back(std::move(row));
  }
  return rows;
}

FollowerSpec follower_from_json(const json& j, const std::string& path,
                                int price_dim) {
  reject_unknown(j, path, {"P", "Q", "r", "S", "A", "b", "G", "h"});
  FollowerSpec f;
  f.P = read_mat(field(j, path, "P"), path + ".P", 0);
  if (f.P.rows() == 0 || f.P.rows() != f.P.cols())
    fail(path + ".P", "must be a nonempty square matrix");
  const int d = static_cast<int>(f.P.rows());
  f.Q = read_mat(field(j, path, "Q"), path + ".Q", d);
  f.r = read_vec(field(j, path, "r"), path + ".r");
  f.S = read_mat(field(j, path, "S"), path + ".S", price_dim);
  f.A = read_mat(field(j, path, "A"), path + ".A", d);
  f.b = read_vec(field(j, path, "b"), path + ".b");
  f.G = read_mat(field(j, path, "G"), path + ".G", d);
  f.h = read_vec(field(j, path, "h"), path + ".h");
  return f;
}

json follower_to_json(const FollowerSpec& f) {
  json j = json::object();
  j["P"] = mat_to_json(f.P);
  j["Q"] = mat_to_json(f.Q);
  j["r"] = vec_to_json(f.r);
  j["S"] = mat_to_json(f.S);
  j["A"] = mat_to_json(f.A);
  j["b"] = vec_to_json(f.b);
  j["G"] = mat_to_json(f.G);
  j["h"] = vec_to_json(f.h);
  return j;
}

PricingGame game_from_json(const json& j) {
  reject_unknown(j, "$",
                 {"schema", "price_lo", "price_hi", "objective", "followers"});
  PricingGame game;
  game.price_lo = read_vec(field(j, "$", "price_lo"), "$.price_lo");
  game.price_hi = read_vec(field(j, "$", "price_hi"), "$.price_hi");

  const json& obj = field(j, "$", "objective");
  reject_unknown(obj, "$.objective", {"kind", "n_des"});
  const json& kind = field(obj, "$.objective", "kind");
  if (!kind.is_string() || kind.get<std::string>() != "tracking")
    fail("$.objective.kind", "unsupported objective kind (expected 'tracking')");
  game.objective = std::make_shared<TrackingObjective>(
      read_vec(field(obj, "$.objective", "n_des"), "$.objective.n_des"));

  const json& followers = field(j, "$", "followers");
  if (!followers.is_array() || followers.empty())
    fail("$.followers", "expected a nonempty array");
  for (size_t i = 0; i < followers.size(); ++i)
    game.followers.push_back(follower_from_json(
        followers[i], "$.followers[" + std::to_string(i) + "]",
        static_cast<int>(game.price_lo.size())));
  check_dimensions(game);
  return game;
}

ChargingScenario scenario_from_json(const json& j) {
  reject_unknown(j, "$",
                 {"schema", "capacity", "queue_weight", "price_lo", "price_hi",
                  "n_des", "companies"});
  ChargingScenario s;
  s.capacity = read_vec(field(j, "$", "capacity"), "$.capacity");
  s.queue_weight = read_vec(field(j, "$", "queue_weight"), "$.queue_weight");
  s.price_lo = read_vec(field(j, "$", "price_lo"), "$.price_lo");
  s.price_hi = read_vec(field(j, "$", "price_hi"), "$.price_hi");
  s.n_des = read_vec(field(j, "$", "n_des"), "$.n_des");
  const int m = s.num_stations();

  const json& companies = field(j, "$", "companies");
  if (!companies.is_array() || companies.empty())
    fail("$.companies", "expected a nonempty array");
  for (size_t i = 0; i < companies.size(); ++i) {
    const std::string path = "$.companies[" + std::to_string(i) + "]";
    const json& cj = companies[i];
    reject_unknown(cj, path,
                   {"fleet", "charge_demand", "e_arr", "e_pro", "reach_G",
                    "reach_h"});
    ChargingScenario::Company c;
    c.fleet = read_num(field(cj, path, "fleet"), path + ".fleet");
    c.charge_demand =
        read_vec(field(cj, path, "charge_demand"), path + ".charge_demand");
    c.e_arr = read_vec(field(cj, path, "e_arr"), path + ".e_arr");
    c.e_pro = read_vec(field(cj, path, "e_pro"), path + ".e_pro");
    if (cj.contains("reach_G"))
      c.reach_G = read_mat(cj["reach_G"], path + ".reach_G", m);
    else
      c.reach_G = Mat(0, m);
    if (cj.contains("reach_h"))
      c.reach_h = read_vec(cj["reach_h"], path + ".reach_h");
    else
      c.reach_h = Vec(0);
    s.companies.push_back(std::move(c));
  }
  return s;
}

json scenario_to_json(const ChargingScenario& s) {
  json j = json::object();
  j["schema"] = kScenarioSchema;
  j["capacity"] = vec_to_json(s.capacity);
  j["queue_weight"] = vec_to_json(s.queue_weight);
  j["price_lo"] = vec_to_json(s.price_lo);
  j["price_hi"] = vec_to_json(s.price_hi);
  j["n_des"] = vec_to_json(s.n_des);
  json companies = json::array();
  for (const auto& c : s.companies) {
    json cj = json::object();
    cj["fleet"] = c.fleet;
    cj["charge_demand"] = vec_to_json(c.charge_demand);
    cj["e_arr"] = vec_to_json(c.e_arr);
    cj["e_pro"] = vec_to_json(c.e_pro);
    if (c.reach_G.rows() > 0) {
      cj["reach_G"] = mat_to_json(c.reach_G);
      cj["reach_h"] = vec_to_json(c.reach_h);
    }
    companies.push_back(std::move(cj));
  }
  j["companies"] = std::move(companies);
  return j;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

GameFile parse_game_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("document is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("$: expected a JSON object");
  const json& schema = field(doc, "$", "schema");
  if (!schema.is_string()) fail("$.schema", "expected a string");
  GameFile out;
  out.schema = schema.get<std::string>();
  if (out.schema == kGameSchema) {
    out.game = game_from_json(doc);
  } else if (out.schema == kScenarioSchema) {
    out.scenario = scenario_from_json(doc);
    out.game = build_game_from_scenario(*out.scenario);
  } else {
    fail("$.schema", "unsupported schema '" + out.schema + "'");
  }
  return out;
}

GameFile parse_game_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failure on " + path);
  try {
    return parse_game_text(buf.str());
  } catch (const SchemaError& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

std::string game_to_text(const PricingGame& game) {
  check_dimensions(game);
  json j = json::object();
  j["schema"] = kGameSchema;
  j["price_lo"] = vec_to_json(game.price_lo);
  j["price_hi"] = vec_to_json(game.price_hi);
  json obj = json::object();
  obj["kind"] = "tracking";
  const auto* tracking =
      dynamic_cast<const TrackingObjective*>(game.objective.get());
  if (tracking == nullptr)
    throw SchemaError("only the tracking objective can be serialized");
  obj["n_des"] = vec_to_json(tracking->n_des());
  j["objective"] = std::move(obj);
  json followers = json::array();
  for (const auto& f : game.followers) followers.push_back(follower_to_json(f));
  j["followers"] = std::move(followers);
  return j.dump(2) + "\n";
}

std::string scenario_to_text(const ChargingScenario& s) {
  return scenario_to_json(s).dump(2) + "\n";
}

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write failure on " + path);
}

}  // namespace

void write_game_file(const std::string& path, const PricingGame& game) {
  write_text(path, game_to_text(game));
}

void write_scenario_file(const std::string& path, const ChargingScenario& s) {
  write_text(path, scenario_to_text(s));
}

std::string trace_to_csv(const LeaderTrace& trace) {
  const int mL =
      trace.rows.empty() ? 0 : static_cast<int>(trace.rows.front().pi.size());
  std::string out = "t";
  for (int k = 1; k <= mL; ++k) out += ",pi_" + std::to_string(k);
  out += ",JL,grad_norm,armijo_l,step,nash_iters,wall_ms\n";
  for (const auto& row : trace.rows) {
    out += std::to_string(row.t);
    for (int k = 0; k < mL; ++k) out += "," + fmt17(row.pi(k));
    out += "," + fmt17(row.JL);
    out += "," + fmt17(row.grad_norm);
    out += "," + std::to_string(row.armijo_l);
    out += "," + fmt17(row.step);
    out += "," + std::to_string(row.nash_iters);
    out += "," + fmt17(row.wall_ms);
    out += "\n";
  }
  return out;
}

std::string trace_to_json_text(const LeaderTrace& trace) {
  json rows = json::array();
  for (const auto& row : trace.rows) {
    json rj = json::object();
    rj["t"] = row.t;
    rj["pi"] = vec_to_json(row.pi);
    rj["JL"] = row.JL;
    rj["grad_norm"] = row.grad_norm;
    rj["armijo_l"] = row.armijo_l;
    rj["step"] = row.step;
    rj["nash_iters"] = row.nash_iters;
    rj["wall_ms"] = row.wall_ms;
    rows.push_back(std::move(rj));
  }
  return rows.dump(2) + "\n";
}

void write_trace(const LeaderTrace& trace, const std::string& path,
                 const std::string& format) {
  if (format == "csv") {
    write_text(path, trace_to_csv(trace));
  } else if (format == "json") {
    write_text(path, trace_to_json_text(trace));
  } else {
    throw Error("unknown trace format '" + format + "' (expected csv or json)");
  }
}

}  // namespace spg
