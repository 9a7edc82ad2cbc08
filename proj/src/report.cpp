#include "hrs/report.hpp"

#include <json.hpp>

#include <sstream>

namespace hrs {

std::string render_text(const std::string& system_name, const SystemReport& rep) {
  std::ostringstream os;
  os << "system " << system_name << "\n";
  for (const auto& d : rep.system_diagnostics) os << "  " << d << "\n";
  auto mark = [](bool b) { return b ? "ok" : "FAIL"; };
  for (const auto& r : rep.rules) {
    os << "  " << r.rule << ": " << (r.pass() ? "ok" : "FAIL")
       << " [monotony " << mark(r.monotony) << ", accessibility "
       << mark(r.accessibility) << ", minimality " << mark(r.minimality)
       << ", subject-reduction/decrease " << mark(r.srd) << "]\n";
    for (const auto& d : r.diagnostics) os << "    " << d << "\n";
  }
  os << verdict_name(rep.verdict) << "\n";
  return os.str();
}

std::string render_json(const std::string& system_name, const SystemReport& rep) {
  nlohmann::json j;
  j["system"] = system_name;
  j["verdict"] = verdict_name(rep.verdict);
  j["diagnostics"] = rep.system_diagnostics;
  j["rules"] = nlohmann::json::array();
  for (const auto& r : rep.rules) {
    nlohmann::json jr;
    jr["name"] = r.rule;
    jr["monotony"] = r.monotony;
    jr["accessibility"] = r.accessibility;
    jr["minimality"] = r.minimality;
    jr["subject_reduction_decrease"] = r.srd;
    jr["diagnostics"] = r.diagnostics;
    j["rules"].push_back(jr);
  }
  return j.dump(2);
}

}  // namespace hrs
