#ifndef HRS_REPORT_HPP
#define HRS_REPORT_HPP

#include <string>

#include "hrs/termination.hpp"

namespace hrs {

/// Human-readable report: one block per rule with the four condition
/// verdicts, diagnostics on failure, and the overall verdict.
std::string render_text(const std::string& system_name, const SystemReport& rep);

/// Machine form with the same content:
/// {system, verdict, rules: [{name, monotony, accessibility, minimality,
///  subject_reduction_decrease, diagnostics}]}
std::string render_json(const std::string& system_name, const SystemReport& rep);

}  // namespace hrs

#endif
