#include "matchlab/io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <vector>

#include "matchlab/error.hpp"

namespace matchlab {
namespace {

template <class T>
T parse_number(std::string_view text, int line, const char* what) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw ValidationError("line " + std::to_string(line) + ": bad " + what + " '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

// Next non-blank, non-comment line; false at end of input.
bool next_line(std::istream& is, std::string& line, int& line_no) {
  while (std::getline(is, line)) {
    ++line_no;
    const auto tokens = split_ws(line);
    if (!tokens.empty() && tokens.front().front() != '#') return true;
  }
  return false;
}

}  // namespace

void write_instance(std::ostream& os, const Instance& inst) {
  const auto& g = inst.graph;
  os << g.n_offline() << ' ' << g.num_types() << ' ' << to_string(inst.arrivals.model) << ' '
     << (inst.params.empty() ? "-" : inst.params) << ' ';
  if (inst.seed) os << *inst.seed;
  else os << '-';
  os << '\n';
  for (TypeId t = 0; t < g.num_types(); ++t) {
    os << t << ':';
    for (const auto& nb : g.neighbors(t)) {
      os << ' ' << nb.offline;
      if (g.weighted()) os << ':' << nb.weight;
    }
    os << '\n';
  }
  os << "arrivals:";
  for (TypeId t : inst.arrivals.arrivals) os << ' ' << t;
  os << '\n';
}

Instance read_instance(std::istream& is) {
  std::string line;
  int line_no = 0;
  if (!next_line(is, line, line_no)) throw ValidationError("empty instance file");
  const auto header = split_ws(line);
  if (header.size() != 5) {
    throw ValidationError("line " + std::to_string(line_no) + ": header must be 'n m model params seed'");
  }
  const int n = parse_number<int>(header[0], line_no, "n");
  const int m = parse_number<int>(header[1], line_no, "m");
  if (n < 0 || m < 0) throw ValidationError("line " + std::to_string(line_no) + ": negative size");
  Instance inst;
  ArrivalModel model;
  try {
    model = arrival_model_from_string(header[2]);
  } catch (const ValidationError& e) {
    throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
  }
  inst.params = std::string(header[3]);
  if (header[4] != "-") inst.seed = parse_number<std::uint64_t>(header[4], line_no, "seed");

  TypeGraph graph(n, m, inst.params.find("R=") != std::string::npos);
  for (TypeId t = 0; t < m; ++t) {
    if (!next_line(is, line, line_no)) throw ValidationError("missing neighbor line for type " + std::to_string(t));
    const auto tokens = split_ws(line);
    const std::string expected = std::to_string(t) + ":";
    if (tokens.empty() || tokens.front() != expected) {
      throw ValidationError("line " + std::to_string(line_no) + ": expected '" + expected + "'");
    }
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      const auto tok = tokens[i];
      const auto colon = tok.find(':');
      const auto id = parse_number<OfflineId>(tok.substr(0, colon), line_no, "neighbor");
      Weight w = 1;
      if (colon != std::string_view::npos) {
        w = parse_number<Weight>(tok.substr(colon + 1), line_no, "weight");
        graph.set_weighted(true);
      }
      graph.add_edge(t, id, w);
    }
  }
  graph.normalize();
  graph.validate();

  if (!next_line(is, line, line_no)) throw ValidationError("missing 'arrivals:' line");
  const auto tokens = split_ws(line);
  if (tokens.empty() || tokens.front() != "arrivals:") {
    throw ValidationError("line " + std::to_string(line_no) + ": expected 'arrivals:'");
  }
  std::vector<TypeId> arrivals;
  arrivals.reserve(tokens.size() - 1);
  for (std::size_t i = 1; i < tokens.size(); ++i) arrivals.push_back(parse_number<TypeId>(tokens[i], line_no, "arrival"));
  inst.arrivals = ArrivalSequence::from_list(std::move(arrivals), m, model);
  if (!inst.arrivals.consistent()) {
    throw ValidationError("arrivals are not contiguous per type as model " + std::string(to_string(model)) +
                          " requires");
  }
  if (next_line(is, line, line_no)) throw ValidationError("line " + std::to_string(line_no) + ": trailing content");
  inst.graph = std::move(graph);
  return inst;
}

void write_matching_csv(std::ostream& os, const Matching& m) {
  os << "offline_id,online_id,weight\n";
  for (const auto& p : m.pairs()) os << p.offline << ',' << p.online << ',' << p.weight << '\n';
}

Matching read_matching_csv(std::istream& is) {
  std::string line;
  int line_no = 0;
  if (!std::getline(is, line) || line.rfind("offline_id,online_id,weight", 0) != 0) {
    throw ValidationError("matching CSV must start with 'offline_id,online_id,weight'");
  }
  ++line_no;
  Matching m;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string_view s(line);
    const auto c1 = s.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : s.find(',', c1 + 1);
    if (c2 == std::string_view::npos) throw ValidationError("line " + std::to_string(line_no) + ": expected 3 fields");
    m.add({parse_number<OfflineId>(s.substr(0, c1), line_no, "offline_id"),
           parse_number<int>(s.substr(c1 + 1, c2 - c1 - 1), line_no, "online_id"),
           parse_number<Weight>(s.substr(c2 + 1), line_no, "weight")});
  }
  return m;
}

void write_trace_csv(std::ostream& os, const SimulationTrace& trace) {
  os << "round,z,x,matched,cumulative\n";
  for (const auto& r : trace.rounds) {
    os << r.round << ',' << r.z << ',' << r.x << ',' << r.matched << ',' << r.cumulative << '\n';
  }
}

}  // namespace matchlab
