#pragma once

#include <json.hpp>

#include "gvp/certify.hpp"
#include "gvp/exhaust.hpp"
#include "gvp/solver.hpp"

namespace gvp {

nlohmann::ordered_json to_json(const EquilibriumReport& rep);
nlohmann::ordered_json to_json(const CertificateResult& cert);
nlohmann::ordered_json to_json(const EtaCertificate& eta);
nlohmann::ordered_json to_json(const ExhaustionReport& rep);
nlohmann::ordered_json to_json(const CapacityResult& cap);
nlohmann::ordered_json to_json(const FeasibilityReport& f);
nlohmann::ordered_json to_json(const ValidationResult& v);
nlohmann::ordered_json to_json(const UniquenessReport& u);

}  // namespace gvp
