#pragma once
// Text formats. Both carry a versioned magic on the first line so stale
// files fail loudly instead of parsing into nonsense.
//
// Network (.net): line-oriented keyed document.
//   tepnet 1
//   name <word>            (optional)
//   mva_base <num>         (optional, default 1)
//   slack_bus <id>         (optional, default auto)
//   [buses]
//   <id> <name> <connected|transshipment>
//   [circuits]
//   <id> <from> <to> <susceptance> <rating_mw> <existing|candidate> <corridor|-> <rank> <cost>
//
// Scenarios (.scn): delimited table, one row per (scenario, bus).
//   tepscn 1
//   scenario,bus,generation_mw,demand_mw[,year[,month,block,draw]]
//
// '#' starts a comment in either format.

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tep/network.hpp"

namespace tep {

class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string strip(const std::string& line) {
  std::string s = line;
  if (auto pos = s.find('#'); pos != std::string::npos) s.erase(pos);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.pop_back();
  size_t b = 0;
  while (b < s.size() && (s[b] == ' ' || s[b] == '\t')) ++b;
  return s.substr(b);
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

inline std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  for (auto& f : out) {
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.erase(f.begin());
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t')) f.pop_back();
  }
  return out;
}

inline double parse_num(const std::string& tok, const std::string& where, int line) {
  try {
    size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw io_error(where + ":" + std::to_string(line) + ": expected a number, got '" + tok + "'");
  }
}

inline int parse_int(const std::string& tok, const std::string& where, int line) {
  try {
    size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw io_error(where + ":" + std::to_string(line) + ": expected an integer, got '" + tok + "'");
  }
}

}  // namespace detail

inline Network load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open network file: " + path);

  Network net;
  std::string line;
  int lineno = 0;
  enum class Section { Head, Buses, Circuits } section = Section::Head;
  bool magic_seen = false;

  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = detail::strip(line);
    if (s.empty()) continue;
    if (!magic_seen) {
      const auto tok = detail::split_ws(s);
      if (tok.size() != 2 || tok[0] != "tepnet" || tok[1] != "1")
        throw io_error(path + ":1: expected 'tepnet 1' header");
      magic_seen = true;
      continue;
    }
    if (s == "[buses]") {
      section = Section::Buses;
      continue;
    }
    if (s == "[circuits]") {
      section = Section::Circuits;
      continue;
    }
    if (s.front() == '[')
      throw io_error(path + ":" + std::to_string(lineno) + ": unknown section " + s);

    const auto tok = detail::split_ws(s);
    switch (section) {
      case Section::Head: {
        if (tok.size() != 2)
          throw io_error(path + ":" + std::to_string(lineno) + ": expected 'key value'");
        if (tok[0] == "name") net.name = tok[1];
        else if (tok[0] == "mva_base") net.mva_base = detail::parse_num(tok[1], path, lineno);
        else if (tok[0] == "slack_bus") net.slack_bus = detail::parse_int(tok[1], path, lineno);
        else throw io_error(path + ":" + std::to_string(lineno) + ": unknown key " + tok[0]);
        break;
      }
      case Section::Buses: {
        if (tok.size() != 3)
          throw io_error(path + ":" + std::to_string(lineno) + ": expected 'id name kind'");
        Bus b;
        b.id = detail::parse_int(tok[0], path, lineno);
        b.name = tok[1];
        if (tok[2] == "connected") b.kind = BusKind::Connected;
        else if (tok[2] == "transshipment") b.kind = BusKind::Transshipment;
        else throw io_error(path + ":" + std::to_string(lineno) + ": unknown bus kind " + tok[2]);
        net.buses.push_back(b);
        break;
      }
      case Section::Circuits: {
        if (tok.size() != 9)
          throw io_error(path + ":" + std::to_string(lineno) +
                         ": expected 9 circuit fields, got " + std::to_string(tok.size()));
        Circuit c;
        c.id = detail::parse_int(tok[0], path, lineno);
        c.from = detail::parse_int(tok[1], path, lineno);
        c.to = detail::parse_int(tok[2], path, lineno);
        c.susceptance = detail::parse_num(tok[3], path, lineno);
        c.rating = detail::parse_num(tok[4], path, lineno);
        if (tok[5] == "existing") c.status = CircuitStatus::Existing;
        else if (tok[5] == "candidate") c.status = CircuitStatus::Candidate;
        else throw io_error(path + ":" + std::to_string(lineno) + ": unknown status " + tok[5]);
        c.corridor = (tok[6] == "-") ? std::string{} : tok[6];
        c.rank = detail::parse_int(tok[7], path, lineno);
        c.cost = (tok[8] == "-") ? 0.0 : detail::parse_num(tok[8], path, lineno);
        net.circuits.push_back(c);
        break;
      }
    }
  }
  if (!magic_seen) throw io_error(path + ": empty network file");

  // Canonical bus order: ascending id. Scenario vectors rely on it.
  std::sort(net.buses.begin(), net.buses.end(),
            [](const Bus& a, const Bus& b) { return a.id < b.id; });
  return net;
}

// Scenario rows may arrive in any order; rows of one scenario are gathered by
// id. Buses without a row default to zero injection.
inline std::vector<OperationScenario> load_scenarios(const std::string& path,
                                                     const Network& net) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open scenario file: " + path);

  std::string line;
  int lineno = 0;
  bool magic_seen = false;
  bool header_seen = false;
  size_t ncols = 4;

  std::map<int, OperationScenario> by_id;

  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = detail::strip(line);
    if (s.empty()) continue;
    if (!magic_seen) {
      const auto tok = detail::split_ws(s);
      if (tok.size() != 2 || tok[0] != "tepscn" || tok[1] != "1")
        throw io_error(path + ":1: expected 'tepscn 1' header");
      magic_seen = true;
      continue;
    }
    const auto f = detail::split_csv(s);
    if (!header_seen) {
      static const char* want[] = {"scenario", "bus",  "generation_mw", "demand_mw",
                                   "year",     "month", "block",         "draw"};
      if (f.size() < 4 || f.size() > 8)
        throw io_error(path + ":" + std::to_string(lineno) + ": bad column count in header");
      for (size_t i = 0; i < f.size(); ++i)
        if (f[i] != want[i])
          throw io_error(path + ":" + std::to_string(lineno) + ": expected column '" +
                         want[i] + "', got '" + f[i] + "'");
      if (f.size() == 6 || f.size() == 7)
        throw io_error(path + ":" + std::to_string(lineno) +
                       ": month/block/draw must appear together");
      ncols = f.size();
      header_seen = true;
      continue;
    }
    if (f.size() != ncols)
      throw io_error(path + ":" + std::to_string(lineno) + ": expected " +
                     std::to_string(ncols) + " fields, got " + std::to_string(f.size()));

    const int sid = detail::parse_int(f[0], path, lineno);
    const int bus_id = detail::parse_int(f[1], path, lineno);
    const int bi = net.bus_index(bus_id);
    if (bi < 0)
      throw io_error(path + ":" + std::to_string(lineno) + ": unknown bus " +
                     std::to_string(bus_id));

    auto [it, fresh] = by_id.try_emplace(sid);
    OperationScenario& sc = it->second;
    if (fresh) {
      sc.id = sid;
      sc.generation.assign(static_cast<size_t>(net.num_buses()), 0.0);
      sc.demand.assign(static_cast<size_t>(net.num_buses()), 0.0);
    }
    sc.generation[static_cast<size_t>(bi)] = detail::parse_num(f[2], path, lineno);
    sc.demand[static_cast<size_t>(bi)] = detail::parse_num(f[3], path, lineno);
    if (ncols >= 5) {
      const int year = detail::parse_int(f[4], path, lineno);
      if (!fresh && sc.year != year && sc.year != 1)
        throw io_error(path + ":" + std::to_string(lineno) + ": scenario " +
                       std::to_string(sid) + " listed under two years");
      sc.year = year;
    }
    if (ncols == 8) {
      sc.month = detail::parse_int(f[5], path, lineno);
      sc.block = detail::parse_int(f[6], path, lineno);
      sc.draw = detail::parse_int(f[7], path, lineno);
    }
  }
  if (!magic_seen) throw io_error(path + ": empty scenario file");
  if (!header_seen) throw io_error(path + ": scenario file has no header row");

  std::vector<OperationScenario> out;
  out.reserve(by_id.size());
  for (auto& [id, sc] : by_id) out.push_back(std::move(sc));
  return out;
}

// Writes every bus row, labelled columns included, so a reload round-trips.
inline void write_scenarios(const std::string& path, const Network& net,
                            const std::vector<OperationScenario>& scenarios) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << "tepscn 1\n";
  out << "scenario,bus,generation_mw,demand_mw,year,month,block,draw\n";
  char buf[160];
  for (const OperationScenario& s : scenarios) {
    for (int bi = 0; bi < net.num_buses(); ++bi) {
      std::snprintf(buf, sizeof buf, "%d,%d,%.6f,%.6f,%d,%d,%d,%d\n", s.id,
                    net.buses[static_cast<size_t>(bi)].id,
                    s.generation[static_cast<size_t>(bi)],
                    s.demand[static_cast<size_t>(bi)], s.year, s.month, s.block, s.draw);
      out << buf;
    }
  }
  if (!out) throw io_error("write failed: " + path);
}

}  // namespace tep
