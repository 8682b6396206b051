#pragma once

#include <string>

#include "gvp/exhaust.hpp"
#include "gvp/solver.hpp"
#include "gvp/system.hpp"

namespace gvp {

enum class CsvKind { potentials, exhaustion_trace, iterates };

CsvKind csv_kind_from_name(const std::string& name);

// potentials: plate, node_index, coords..., weight, W_value, C_over_g, residual
void write_potentials_csv(const System& sys, const FieldValues& f,
                          const EquilibriumReport& rep, const std::string& path);

// exhaustion_trace: step, value, gap, distance_to_final, per-plate constants
void write_exhaustion_csv(const ExhaustionReport& rep, const std::string& path);

// iterates: iter, value, gap, feasibility_err (requires a recorded trace)
void write_iterates_csv(const EquilibriumReport& rep, const std::string& path);

}  // namespace gvp
