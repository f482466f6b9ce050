#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tensionlab/experiments.hpp"
#include "tensionlab/grid.hpp"
#include "tensionlab/solver.hpp"
#include "tensionlab/tension.hpp"

namespace tensionlab {

using json = nlohmann::json;

// 17 significant digits, '.' decimal separator (C locale), round-trip exact.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---- JSON round-trips ----

inline json to_json(const ProfileGrid& g) {
  return json{{"a", g.a}, {"b", g.b}, {"n", g.n}};
}
inline ProfileGrid grid_from_json(const json& j) {
  return ProfileGrid{j.at("a").get<double>(), j.at("b").get<double>(), j.at("n").get<int>()};
}

inline json to_json(const GridFunction& v) {
  json j{{"grid", to_json(v.grid)}, {"values", v.values}};
  if (v.tails.is_constant()) {
    j["tails"] = json{{"left", v.tails.c_left}, {"right", v.tails.c_right}};
  } else {
    j["tails"] = nullptr;
  }
  return j;
}
inline GridFunction grid_function_from_json(const json& j) {
  GridFunction v;
  v.grid = grid_from_json(j.at("grid"));
  v.values = j.at("values").get<std::vector<double>>();
  if (j.at("tails").is_null())
    v.tails = TailSpec::none();
  else
    v.tails = TailSpec::constant(j.at("tails").at("left").get<double>(),
                                 j.at("tails").at("right").get<double>());
  return v;
}

inline json to_json(const TensionResult& r) {
  json hist = json::array();
  for (const auto& h : r.history)
    hist.push_back(json{{"T", h.T}, {"N", h.N}, {"value", h.value}, {"converged", h.converged}});
  return json{{"kind", tension_kind_name(r.kind)},
              {"k", r.order.k},
              {"s", r.order.s},
              {"delta", r.delta},
              {"value", r.value},
              {"T_final", r.T_final},
              {"N_final", r.N_final},
              {"converged", r.converged},
              {"history", hist},
              {"profile", to_json(r.profile)}};
}
inline TensionResult tension_result_from_json(const json& j) {
  TensionResult r;
  r.kind = tension_kind_from_name(j.at("kind").get<std::string>());
  r.order = {j.at("k").get<int>(), j.at("s").get<double>()};
  r.delta = j.at("delta").get<double>();
  r.value = j.at("value").get<double>();
  r.T_final = j.at("T_final").get<double>();
  r.N_final = j.at("N_final").get<int>();
  r.converged = j.at("converged").get<bool>();
  for (const auto& h : j.at("history"))
    r.history.push_back({h.at("T").get<double>(), h.at("N").get<int>(),
                         h.at("value").get<double>(), h.at("converged").get<bool>()});
  r.profile = grid_function_from_json(j.at("profile"));
  return r;
}

inline json to_json(const SweepRecord& rec) {
  json rows = json::array();
  for (const auto& r : rec.rows)
    rows.push_back(json{{"param", r.param},
                        {"gap", r.gap},
                        {"energy", r.energy},
                        {"inner_transitions", r.inner_transitions},
                        {"outer_upper", r.outer_upper},
                        {"outer_lower", r.outer_lower},
                        {"converged", r.converged},
                        {"profile_checksum", r.profile_checksum}});
  return json{{"sweep", rec.sweep},
              {"label", rec.label},
              {"k", rec.order.k},
              {"s", rec.order.s},
              {"rows", rows}};
}
inline SweepRecord sweep_record_from_json(const json& j) {
  SweepRecord rec;
  rec.sweep = j.at("sweep").get<std::string>();
  rec.label = j.at("label").get<std::string>();
  rec.order = {j.at("k").get<int>(), j.at("s").get<double>()};
  for (const auto& r : j.at("rows")) {
    SweepRow row;
    row.param = r.at("param").get<double>();
    row.gap = r.at("gap").get<double>();
    row.energy = r.at("energy").get<double>();
    row.inner_transitions = r.at("inner_transitions").get<int>();
    row.outer_upper = r.at("outer_upper").get<int>();
    row.outer_lower = r.at("outer_lower").get<int>();
    row.converged = r.at("converged").get<bool>();
    row.profile_checksum = r.at("profile_checksum").get<std::uint64_t>();
    rec.rows.push_back(row);
  }
  return rec;
}

// ---- CSV export (fixed header order, bit-exact rendering) ----

inline std::string tension_csv(const std::vector<TensionResult>& results) {
  if (results.empty()) throw std::invalid_argument("export_csv: empty results");
  std::string out = "kind,k,s,delta,value,T,N,converged\n";
  for (const auto& r : results) {
    out += tension_kind_name(r.kind) + ',' + std::to_string(r.order.k) + ',' +
           format_double(r.order.s) + ',' + format_double(r.delta) + ',' +
           format_double(r.value) + ',' + format_double(r.T_final) + ',' +
           std::to_string(r.N_final) + ',' + (r.converged ? "true" : "false") + '\n';
  }
  return out;
}

inline std::string sweep_csv(const SweepRecord& rec) {
  if (rec.rows.empty()) throw std::invalid_argument("export_csv: empty sweep");
  std::string out = "param,energy,inner_transitions,outer_upper,outer_lower,converged\n";
  for (const auto& r : rec.rows) {
    out += format_double(r.param) + ',' + format_double(r.energy) + ',' +
           std::to_string(r.inner_transitions) + ',' + std::to_string(r.outer_upper) + ',' +
           std::to_string(r.outer_lower) + ',' + (r.converged ? "true" : "false") + '\n';
  }
  return out;
}

inline std::string trace_csv(const std::vector<TraceEntry>& trace) {
  std::string out = "iteration,energy,grad_norm\n";
  for (const auto& t : trace)
    out += std::to_string(t.iteration) + ',' + format_double(t.energy) + ',' +
           format_double(t.grad_norm) + '\n';
  return out;
}

inline std::string profile_csv(const GridFunction& v) {
  std::string out = "x,value\n";
  for (int i = 0; i < v.grid.n; ++i)
    out += format_double(v.grid.center(i)) + ',' + format_double(v.values[i]) + '\n';
  return out;
}

inline void export_csv(const std::vector<TensionResult>& results,
                       const std::filesystem::path& path) {
  write_text_atomic(path, tension_csv(results));
}
inline void export_csv(const SweepRecord& rec, const std::filesystem::path& path) {
  write_text_atomic(path, sweep_csv(rec));
}

}  // namespace tensionlab
