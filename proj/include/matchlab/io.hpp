#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "matchlab/graph.hpp"
#include "matchlab/matching.hpp"
#include "matchlab/policies.hpp"

namespace matchlab {

/// A type graph with its arrivals and provenance, as stored on disk.
/// See docs/FORMAT.md for the text layout.
struct Instance {
  TypeGraph graph;
  ArrivalSequence arrivals;
  std::string params = "-";          // e.g. "p=0.5,R=10"; "-" when unknown
  std::optional<std::uint64_t> seed;  // master seed, if generated

  friend bool operator==(const Instance&, const Instance&) = default;
};

void write_instance(std::ostream& os, const Instance& inst);
/// Throws ValidationError with the line number on malformed input.
Instance read_instance(std::istream& is);

void write_matching_csv(std::ostream& os, const Matching& m);
Matching read_matching_csv(std::istream& is);

void write_trace_csv(std::ostream& os, const SimulationTrace& trace);

}  // namespace matchlab
