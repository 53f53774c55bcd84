#pragma once

// Text formats. Actor labels are 1-based in every file and 0-based in memory.
//
//   list file    one list per line, highest first; commas or blanks between
//                labels; '#' starts a comment; a leading "[k]" is ignored.
//   poset file   "n=<int>" then "i > j" / "i ~ j" lines, closed on load. A
//                dense 0/1 CSV matrix is accepted as well.
//   run config   flat JSON object, unknown keys rejected.
//   trace dir    trace.csv, posets.jsonl, pointwise.csv, acceptance.csv,
//                manifest.json.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "posetmc/error.hpp"
#include "posetmc/mcmc.hpp"
#include "posetmc/observation.hpp"
#include "posetmc/partial_order.hpp"
#include "posetmc/summaries.hpp"

namespace posetmc::io {

using nlohmann::json;

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ParseError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::ParseError, "cannot write " + path.string());
  out << text;
}

inline std::string strip_comment(std::string line) {
  if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

inline bool blank(std::string_view s) { return s.find_first_not_of(" \t") == std::string_view::npos; }

inline std::string where(int line) { return "line " + std::to_string(line) + ": "; }

inline int parse_label(const std::string& tok, int line) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(tok, &used);
  } catch (const std::exception&) {
    fail(ErrorCode::ParseError, where(line) + "bad actor label '" + tok + "'");
  }
  if (used != tok.size() || v < 1) fail(ErrorCode::ParseError, where(line) + "bad actor label '" + tok + "'");
  return v;
}

/// Round-trip formatting for doubles.
inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

// Lists -------------------------------------------------------------------------

inline ObservationSet parse_lists_text(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  std::vector<RankList> lists;
  int line = 0, n = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = detail::strip_comment(raw);
    if (auto open = s.find_first_not_of(" \t"); open != std::string::npos && s[open] == '[') {
      const auto close = s.find(']', open);
      if (close == std::string::npos) fail(ErrorCode::ParseError, detail::where(line) + "unclosed '['");
      s.erase(0, close + 1);
    }
    for (char& c : s)
      if (c == ',') c = ' ';
    if (detail::blank(s)) continue;
    std::istringstream toks(s);
    std::string tok;
    RankList l;
    Mask seen = 0;
    while (toks >> tok) {
      const int a = detail::parse_label(tok, line);
      if (a > kMaxActors) fail(ErrorCode::SizeLimitExceeded, detail::where(line) + "label above " + std::to_string(kMaxActors));
      if (has(seen, a - 1)) fail(ErrorCode::DuplicateActor, detail::where(line) + "actor " + tok + " repeated");
      seen |= bit(a - 1);
      l.push_back(a - 1);
      n = std::max(n, a);
    }
    if (l.size() < 2) fail(ErrorCode::ParseError, detail::where(line) + "a list needs at least two actors");
    lists.push_back(std::move(l));
  }
  if (lists.empty()) fail(ErrorCode::ParseError, "no lists found");
  return ObservationSet::validated(std::move(lists), n);
}

inline ObservationSet parse_lists(const std::filesystem::path& path) {
  return parse_lists_text(detail::read_file(path));
}

inline std::string format_lists(const ObservationSet& data) {
  std::string out;
  for (std::size_t i = 0; i < data.size(); ++i) {
    out += "[" + std::to_string(i + 1) + "]";
    for (int a : data.lists[i]) out += " " + std::to_string(a + 1);
    out += "\n";
  }
  return out;
}

struct ListStats {
  std::size_t lists = 0;
  int actors = 0;
  std::size_t longest = 0;
  std::size_t shortest = 0;
};

inline ListStats list_stats(const ObservationSet& data) {
  ListStats s{data.size(), data.n, 0, data.empty() ? 0 : data.lists.front().size()};
  for (const auto& l : data.lists) {
    s.longest = std::max(s.longest, l.size());
    s.shortest = std::min(s.shortest, l.size());
  }
  return s;
}

// Posets --------------------------------------------------------------------------

/// Text form: tie chains inside each class, then the covering relations of
/// the quotient written between least members of the classes.
inline std::string serialize_poset(const TiedPartialOrder& h) {
  const CollapsedOrder c = collapse_ties(h);
  const auto blocks = c.partition.blocks();
  std::string out = "n=" + std::to_string(h.size()) + "\n";
  for (const auto& b : blocks)
    for (std::size_t t = 1; t < b.size(); ++t) out += std::to_string(b[t - 1] + 1) + " ~ " + std::to_string(b[t] + 1) + "\n";
  for (const Edge& e : transitive_reduction(c.quotient))
    out += std::to_string(blocks[e.from][0] + 1) + " > " + std::to_string(blocks[e.to][0] + 1) + "\n";
  return out;
}

inline std::string serialize_poset(const PartialOrder& h) { return serialize_poset(TiedPartialOrder::from_untied(h)); }

inline Relation parse_dense_csv(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  std::vector<std::vector<int>> rows;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = detail::strip_comment(raw);
    if (detail::blank(s)) continue;
    for (char& c : s)
      if (c == ',') c = ' ';
    std::istringstream toks(s);
    std::string tok;
    std::vector<int> row;
    while (toks >> tok) {
      if (tok != "0" && tok != "1") fail(ErrorCode::ParseError, detail::where(line) + "matrix entries must be 0 or 1");
      row.push_back(tok == "1");
    }
    rows.push_back(std::move(row));
  }
  for (const auto& r : rows)
    if (r.size() != rows.size()) fail(ErrorCode::ParseError, "matrix is not square");
  return Relation::from_matrix(rows);
}

/// Reads either format; the result is closed and validated.
inline TiedPartialOrder deserialize_poset(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  std::optional<int> n;
  std::vector<std::pair<Edge, bool>> items;  // (edge, is_tie)
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = detail::strip_comment(raw);
    if (detail::blank(s)) continue;
    if (!n) {
      std::string compact;
      for (char c : s)
        if (c != ' ' && c != '\t') compact += c;
      if (compact.rfind("n=", 0) != 0) return TiedPartialOrder::validated(transitive_closure(parse_dense_csv(text)));
      n = detail::parse_label(compact.substr(2), line);
      continue;
    }
    std::istringstream toks(s);
    std::string a, op, b, extra;
    if (!(toks >> a >> op >> b) || (toks >> extra) || (op != ">" && op != "~"))
      fail(ErrorCode::ParseError, detail::where(line) + "expected 'i > j' or 'i ~ j'");
    const int i = detail::parse_label(a, line), j = detail::parse_label(b, line);
    if (i > *n || j > *n) fail(ErrorCode::ParseError, detail::where(line) + "label exceeds n");
    if (i == j) fail(ErrorCode::ParseError, detail::where(line) + "self relation");
    items.push_back({{i - 1, j - 1}, op == "~"});
  }
  if (!n) fail(ErrorCode::ParseError, "missing 'n=' header");
  Relation r(*n);
  for (const auto& [e, tie] : items) {
    r.set(e.from, e.to);
    if (tie) r.set(e.to, e.from);
  }
  try {
    return TiedPartialOrder::validated(transitive_closure(r));
  } catch (const Error& e) {
    fail(ErrorCode::ParseError, e.what());
  }
}

inline TiedPartialOrder read_poset(const std::filesystem::path& path) { return deserialize_poset(detail::read_file(path)); }

inline std::string to_dense_csv(const Relation& r) {
  std::string out;
  for (int i = 0; i < r.size(); ++i) {
    for (int j = 0; j < r.size(); ++j) out += std::string(j ? "," : "") + (r(i, j) ? "1" : "0");
    out += "\n";
  }
  return out;
}

/// Covering relations of the quotient; each tie class is a boxed cluster.
inline std::string to_dot(const TiedPartialOrder& h, std::string_view name = "order") {
  const CollapsedOrder c = collapse_ties(h);
  const auto blocks = c.partition.blocks();
  std::string out = "digraph " + std::string(name) + " {\n  rankdir=TB;\n";
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].size() > 1) {
      out += "  subgraph cluster_" + std::to_string(b) + " { style=rounded; color=blue;";
      for (int a : blocks[b]) out += " " + std::to_string(a + 1) + ";";
      out += " }\n";
    } else {
      out += "  " + std::to_string(blocks[b][0] + 1) + ";\n";
    }
  }
  for (const Edge& e : transitive_reduction(c.quotient))
    out += "  " + std::to_string(blocks[e.from][0] + 1) + " -> " + std::to_string(blocks[e.to][0] + 1) + ";\n";
  return out + "}\n";
}

/// Thresholded relation as drawn: every kept edge, red above 0.9, kept
/// ties boxed.
inline std::string to_dot(const Consensus& c, const EdgeProbMatrix& p) {
  std::string out = "digraph consensus {\n  rankdir=TB;\n";
  for (int i = 0; i < c.n; ++i) out += "  " + std::to_string(i + 1) + ";\n";
  for (std::size_t t = 0; t < c.ties.size(); ++t)
    out += "  subgraph cluster_tie" + std::to_string(t) + " { style=rounded; color=blue; " +
           std::to_string(c.ties[t].from + 1) + "; " + std::to_string(c.ties[t].to + 1) + "; }\n";
  for (const Edge& e : c.edges) {
    const double prob = p.strict[e.from][e.to];
    out += "  " + std::to_string(e.from + 1) + " -> " + std::to_string(e.to + 1) + " [label=\"" +
           detail::num(std::round(prob * 1000) / 1000) + "\"" + (prob > 0.9 ? ", color=red" : "") + "];\n";
  }
  return out + "}\n";
}

inline std::string matrix_csv(const Matrix& m) {
  std::string out = "actor";
  for (std::size_t j = 0; j < m.size(); ++j) out += "," + std::to_string(j + 1);
  out += "\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += std::to_string(i + 1);
    for (double x : m[i]) out += "," + detail::num(x);
    out += "\n";
  }
  return out;
}

// Run configuration -------------------------------------------------------------------

struct RunConfig {
  McmcConfig mcmc;
  std::string data;
  std::string out_dir;
};

inline std::string model_name(NoiseModel m) {
  switch (m) {
    case NoiseModel::NoiseFree: return "noisefree";
    case NoiseModel::QueueJump: return "qj";
    case NoiseModel::Mallows: return "mallows";
  }
  return "?";
}

inline NoiseModel parse_model(const std::string& s) {
  if (s == "noisefree" || s == "noise-free") return NoiseModel::NoiseFree;
  if (s == "qj" || s == "queue-jump") return NoiseModel::QueueJump;
  if (s == "mallows") return NoiseModel::Mallows;
  fail(ErrorCode::BadConfig, "unknown model '" + s + "'");
}

inline json prior_to_json(const PriorConfig& p) {
  json j{{"eta_a", p.eta_a},
         {"eta_b", p.eta_b},
         {"eta_rho", p.eta_rho},
         {"eta_K", p.eta_K},
         {"theta_prior", {p.theta_prior[0], p.theta_prior[1]}},
         {"p_prior", {p.p_prior[0], p.p_prior[1]}},
         {"no_ties", p.no_ties}};
  j["fixed_K"] = p.fixed_K ? json(*p.fixed_K) : json(nullptr);
  return j;
}

inline json to_json(const RunConfig& c) {
  json j = prior_to_json(c.mcmc.prior);
  j["iterations"] = c.mcmc.iterations;
  j["thin"] = c.mcmc.thin;
  j["burn_in"] = c.mcmc.burn_in;
  j["seed"] = c.mcmc.seed;
  j["model"] = model_name(c.mcmc.model);
  j["w_rho"] = c.mcmc.w_rho;
  j["theta_step"] = c.mcmc.theta_step;
  j["p_step"] = c.mcmc.p_step;
  j["reseats_per_sweep"] = c.mcmc.reseats_per_sweep;
  j["z_updates_per_sweep"] = c.mcmc.z_updates_per_sweep;
  j["rescales_per_sweep"] = c.mcmc.rescales_per_sweep;
  j["w_rescale"] = c.mcmc.w_rescale;
  j["data"] = c.data;
  j["out_dir"] = c.out_dir;
  return j;
}

/// Keys missing from `j` keep the values already in `base`.
inline RunConfig run_config_from_json(const json& j, RunConfig base = {}) {
  if (!j.is_object()) fail(ErrorCode::BadConfig, "config must be a JSON object");
  RunConfig c = std::move(base);
  PriorConfig& p = c.mcmc.prior;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "eta_a") p.eta_a = v.get<double>();
      else if (key == "eta_b") p.eta_b = v.get<double>();
      else if (key == "eta_rho") p.eta_rho = v.get<double>();
      else if (key == "eta_K") p.eta_K = v.get<double>();
      else if (key == "theta_prior") p.theta_prior = v.get<std::array<double, 2>>();
      else if (key == "p_prior") p.p_prior = v.get<std::array<double, 2>>();
      else if (key == "fixed_K") p.fixed_K = v.is_null() ? std::nullopt : std::optional<int>(v.get<int>());
      else if (key == "no_ties") p.no_ties = v.get<bool>();
      else if (key == "iterations") c.mcmc.iterations = v.get<long long>();
      else if (key == "thin") c.mcmc.thin = v.get<int>();
      else if (key == "burn_in") c.mcmc.burn_in = v.get<int>();
      else if (key == "seed") c.mcmc.seed = v.get<std::uint64_t>();
      else if (key == "model") c.mcmc.model = parse_model(v.get<std::string>());
      else if (key == "w_rho") c.mcmc.w_rho = v.get<double>();
      else if (key == "theta_step") c.mcmc.theta_step = v.get<double>();
      else if (key == "p_step") c.mcmc.p_step = v.get<double>();
      else if (key == "reseats_per_sweep") c.mcmc.reseats_per_sweep = v.get<int>();
      else if (key == "z_updates_per_sweep") c.mcmc.z_updates_per_sweep = v.get<int>();
      else if (key == "rescales_per_sweep") c.mcmc.rescales_per_sweep = v.get<int>();
      else if (key == "w_rescale") c.mcmc.w_rescale = v.get<double>();
      else if (key == "data") c.data = v.get<std::string>();
      else if (key == "out_dir") c.out_dir = v.get<std::string>();
      else fail(ErrorCode::BadConfig, "unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::BadConfig, e.what());
  }
  c.mcmc.check();
  return c;
}

inline RunConfig read_run_config(const std::filesystem::path& path, RunConfig base = {}) {
  json j;
  try {
    j = json::parse(detail::read_file(path));
  } catch (const json::exception& e) {
    fail(ErrorCode::BadConfig, path.string() + ": " + e.what());
  }
  return run_config_from_json(j, std::move(base));
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

// Trace directories -----------------------------------------------------------------------

inline json record_order_json(const TraceRecord& r) {
  const CollapsedOrder c = collapse_ties(r.order);
  const auto blocks = c.partition.blocks();
  json edges = json::array(), ties = json::array(), part = json::array();
  for (const Edge& e : transitive_reduction(c.quotient)) edges.push_back({blocks[e.from][0] + 1, blocks[e.to][0] + 1});
  for (const auto& b : blocks)
    for (std::size_t t = 1; t < b.size(); ++t) ties.push_back({b[t - 1] + 1, b[t] + 1});
  for (const auto& b : r.partition.blocks()) {
    json blk = json::array();
    for (int a : b) blk.push_back(a + 1);
    part.push_back(blk);
  }
  return {{"iteration", r.iteration}, {"edges", edges}, {"ties", ties}, {"partition", part}};
}

inline void write_trace_dir(const std::filesystem::path& dir, const McmcTrace& trace, const RunConfig& config,
                            std::size_t lists) {
  std::filesystem::create_directories(dir);
  const char* noise_col = trace.model == NoiseModel::QueueJump ? "p" : "theta";
  std::string t = std::string("iteration,loglik,K,C,rho,") + noise_col + ",depth\n";
  std::string posets, pw = "iteration";
  for (std::size_t i = 0; i < lists; ++i) pw += ",list" + std::to_string(i + 1);
  pw += "\n";
  for (const auto& r : trace.records) {
    t += std::to_string(r.iteration) + "," + detail::num(r.loglik) + "," + std::to_string(r.K) + "," +
         std::to_string(r.C) + "," + detail::num(r.rho) + "," + (std::isnan(r.noise) ? "" : detail::num(r.noise)) +
         "," + std::to_string(r.depth) + "\n";
    posets += record_order_json(r).dump() + "\n";
    pw += std::to_string(r.iteration);
    for (double v : r.pointwise) pw += "," + detail::num(v);
    pw += "\n";
  }
  std::string acc = "move,proposed,accepted,rate\n";
  for (int m = 0; m < kMoveCount; ++m)
    acc += std::string(kMoveNames[m]) + "," + std::to_string(trace.moves[m].proposed) + "," +
           std::to_string(trace.moves[m].accepted) + "," + detail::num(trace.moves[m].rate()) + "\n";
  const json cfg = to_json(config);
  const json manifest{{"seed", config.mcmc.seed},
                      {"config", cfg},
                      {"config_hash", hex(fnv1a(cfg.dump()))},
                      {"model", model_name(trace.model)},
                      {"n", trace.n},
                      {"lists", lists},
                      {"records", trace.records.size()},
                      {"thin", config.mcmc.thin_for(trace.n)}};
  detail::write_file(dir / "trace.csv", t);
  detail::write_file(dir / "posets.jsonl", posets);
  detail::write_file(dir / "pointwise.csv", pw);
  detail::write_file(dir / "acceptance.csv", acc);
  detail::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

struct TraceDir {
  McmcTrace trace;
  RunConfig config;
};

inline TraceDir read_trace_dir(const std::filesystem::path& dir) {
  TraceDir out;
  json manifest;
  try {
    manifest = json::parse(detail::read_file(dir / "manifest.json"));
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, "manifest.json: " + std::string(e.what()));
  }
  out.config = run_config_from_json(manifest.at("config"));
  McmcTrace& tr = out.trace;
  tr.model = parse_model(manifest.at("model").get<std::string>());
  tr.n = manifest.at("n").get<int>();

  auto csv_rows = [&](const std::string& name) {
    std::istringstream in(detail::read_file(dir / name));
    std::string line;
    std::vector<std::vector<std::string>> rows;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<std::string> cells;
      std::string cell;
      std::istringstream ls(line);
      while (std::getline(ls, cell, ',')) cells.push_back(cell);
      if (!line.empty() && line.back() == ',') cells.emplace_back();
      rows.push_back(std::move(cells));
    }
    return rows;
  };

  const auto trows = csv_rows("trace.csv");
  const auto prows = csv_rows("pointwise.csv");
  std::istringstream pj(detail::read_file(dir / "posets.jsonl"));
  if (prows.size() != trows.size()) fail(ErrorCode::ParseError, "pointwise.csv and trace.csv differ in length");
  std::string line;
  try {
    for (std::size_t k = 0; k < trows.size(); ++k) {
      const auto& row = trows[k];
      if (row.size() != 7) fail(ErrorCode::ParseError, "trace.csv row " + std::to_string(k + 2) + " malformed");
      TraceRecord r;
      r.iteration = std::stoll(row[0]);
      r.loglik = std::stod(row[1]);
      r.K = std::stoi(row[2]);
      r.C = std::stoi(row[3]);
      r.rho = std::stod(row[4]);
      r.noise = row[5].empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(row[5]);
      r.depth = std::stoi(row[6]);
      for (std::size_t c = 1; c < prows[k].size(); ++c) r.pointwise.push_back(std::stod(prows[k][c]));
      if (!std::getline(pj, line)) fail(ErrorCode::ParseError, "posets.jsonl is shorter than trace.csv");
      const json rec = json::parse(line);
      Relation rel(tr.n);
      for (const auto& e : rec.at("edges")) rel.set(e[0].get<int>() - 1, e[1].get<int>() - 1);
      for (const auto& e : rec.at("ties")) {
        rel.set(e[0].get<int>() - 1, e[1].get<int>() - 1);
        rel.set(e[1].get<int>() - 1, e[0].get<int>() - 1);
      }
      r.order = TiedPartialOrder::validated(transitive_closure(rel));
      std::vector<std::vector<int>> blocks;
      for (const auto& b : rec.at("partition")) {
        std::vector<int> blk;
        for (const auto& a : b) blk.push_back(a.get<int>() - 1);
        blocks.push_back(std::move(blk));
      }
      r.partition = Partition::from_blocks(blocks, tr.n);
      tr.records.push_back(std::move(r));
    }
  } catch (const std::logic_error& e) {  // stoi/stod and json access errors
    fail(ErrorCode::ParseError, std::string("trace directory: ") + e.what());
  }
  const auto arows = csv_rows("acceptance.csv");
  for (const auto& row : arows)
    for (int m = 0; m < kMoveCount; ++m)
      if (row.size() >= 3 && row[0] == kMoveNames[m]) tr.moves[m] = {std::stoll(row[1]), std::stoll(row[2])};
  return out;
}

}  // namespace posetmc::io
