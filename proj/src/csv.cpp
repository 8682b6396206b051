#include "gvp/csv.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>

namespace gvp {

namespace {

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot open output file: " + path);
  out.precision(17);
  return out;
}

}  // namespace

CsvKind csv_kind_from_name(const std::string& name) {
  if (name == "potentials") return CsvKind::potentials;
  if (name == "exhaustion_trace") return CsvKind::exhaustion_trace;
  if (name == "iterates") return CsvKind::iterates;
  fail(Errc::schema_error, "unknown csv kind: " + name);
}

void write_potentials_csv(const System& sys, const FieldValues& f,
                          const EquilibriumReport& rep, const std::string& path) {
  if (rep.lambda.weights.empty())
    fail(Errc::missing_data, "potentials csv needs a solved measure");
  std::ofstream out = open_csv(path);

  std::size_t max_dim = 0;
  for (std::size_t p = 0; p < sys.node_count(); ++p)
    max_dim = std::max(max_dim, sys.point(p).size());

  out << "plate,node_index";
  for (std::size_t d = 0; d < max_dim; ++d) out << ",x" << d;
  out << ",weight,W_value,C_over_g,residual\n";

  const std::vector<double> pot = weighted_potentials(sys, rep.lambda, f);
  for (std::size_t i = 0; i < sys.plate_count(); ++i) {
    const Plate& p = sys.condenser().plates[i];
    const std::size_t off = sys.offset(i);
    for (std::size_t n = 0; n < p.nodes.size(); ++n) {
      out << i << ',' << n;
      for (std::size_t d = 0; d < max_dim; ++d)
        out << ',' << (d < p.nodes[n].size() ? p.nodes[n][d] : 0.0);
      const double w = pot[off + n];
      out << ',' << rep.lambda.weights[i][n] << ',' << w << ','
          << rep.constants[i] / p.g[n] << ','
          << p.mass * w - rep.constants[i] * p.g[n] << '\n';
    }
  }
}

void write_exhaustion_csv(const ExhaustionReport& rep, const std::string& path) {
  if (rep.steps.empty()) fail(Errc::missing_data, "exhaustion csv needs step rows");
  std::ofstream out = open_csv(path);
  out << "step,value,gap,distance_to_final";
  for (std::size_t i = 0; i < rep.steps.front().constants.size(); ++i)
    out << ",C" << i;
  out << '\n';
  for (const auto& s : rep.steps) {
    out << s.step << ',' << s.value << ',' << s.gap << ',' << s.distance_to_final;
    for (double c : s.constants) out << ',' << c;
    out << '\n';
  }
}

void write_iterates_csv(const EquilibriumReport& rep, const std::string& path) {
  if (rep.trace.empty())
    fail(Errc::missing_data, "iterates csv needs a recorded trace (--trace)");
  std::ofstream out = open_csv(path);
  out << "iter,value,gap,feasibility_err\n";
  for (const auto& t : rep.trace)
    out << t.iter << ',' << t.value << ',' << t.gap << ',' << t.feasibility_err
        << '\n';
}

}  // namespace gvp
