#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "gvp/condenser.hpp"
#include "gvp/kernel.hpp"
#include "gvp/measure.hpp"
#include "gvp/solver.hpp"

namespace gvp {

struct ExhaustionSpec {
  int steps = 1;
  ExhaustionOrder order = ExhaustionOrder::by_index;
};

struct ProblemFile {
  int schema_version = 1;
  Kernel kernel = Kernel::custom(Matrix(1, 1, 1.0));
  Condenser condenser;
  ExternalField field;
  SolverConfig solver;
  std::optional<ExhaustionSpec> exhaustion;
  unsigned long seed = 0;
};

// Parse and fully validate a problem file. Errors carry a JSON-pointer-ish
// location: ParseError for malformed text, SchemaError for shape/type
// problems, ValidationError for violated domain rules.
ProblemFile parse_problem(const std::string& path);
ProblemFile parse_problem_text(const std::string& text, const std::string& origin);

nlohmann::ordered_json serialize_problem(const ProblemFile& pf);

// Measure files: {"plates": [{"weights": [...]}, ...]}.
DiscreteVectorMeasure parse_measure_text(const std::string& text,
                                         const std::string& origin);
DiscreteVectorMeasure parse_measure(const std::string& path);
nlohmann::ordered_json serialize_measure(const DiscreteVectorMeasure& mu);

// FNV-1a over the canonical serialization.
std::string problem_hash(const ProblemFile& pf);

}  // namespace gvp
