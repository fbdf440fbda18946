#pragma once

#include <cstdint>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>

#include "json.hpp"

#include "heis/form.hpp"
#include "heis/identities.hpp"
#include "heis/numeric_lab.hpp"

namespace heis {

using Json = nlohmann::ordered_json;

enum class Format { kText, kStructured, kLatex };

inline std::optional<Format> parse_format(const std::string& s) {
  if (s == "text") return Format::kText;
  if (s == "structured" || s == "json") return Format::kStructured;
  if (s == "latex") return Format::kLatex;
  return std::nullopt;
}

inline Json audit_json(const AuditLine& line) {
  Json j;
  j["label"] = line.label;
  j["written"] = line.written;
  j["engine"] = line.engine;
  j["verdict"] = std::string(verdict_name(line.verdict));
  j["flipped"] = line.flipped_terms;
  return j;
}

inline Json random_check_json(const RandomCheckReport& r) {
  Json j;
  j["trials"] = r.trials;
  j["seed"] = r.seed;
  j["corrupted_rhs"] = r.corrupted;
  j["nonzero"] = r.nonzero;
  j["failing_trials"] = r.failing_trials;
  return j;
}

inline Json report_json(const VerificationReport& r, const std::optional<RandomCheckReport>& random = std::nullopt) {
  Json j;
  j["identity"] = std::string(external_name(r.identity));
  j["n"] = r.n;
  j["convention"] = r.convention.name();
  j["status"] = std::string(status_name(r.status));
  Json result;
  result["difference"] = to_text(r.difference());
  Json residuals = Json::array();
  for (auto& res : r.residuals) residuals.push_back({{"name", res.name}, {"form", to_text(res.form)}});
  result["residuals"] = residuals;
  result["exploratory"] = r.exploratory;
  result["notes"] = r.notes;
  if (random) result["random_check"] = random_check_json(*random);
  j["result"] = result;
  Json audit = Json::array();
  for (auto& line : r.line_audit) audit.push_back(audit_json(line));
  j["line_audit"] = audit;
  j["seed"] = random ? Json(random->seed) : Json(nullptr);
  j["wall_time"] = r.wall_time + (random ? random->wall_time : 0.0);
  return j;
}

inline std::string seconds(double s) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << s << "s";
  return os.str();
}

inline std::string report_text(const VerificationReport& r, const std::optional<RandomCheckReport>& random = std::nullopt) {
  std::ostringstream os;
  os << "identity: " << external_name(r.identity) << "\n";
  os << "n: " << r.n << "\n";
  os << "convention: " << r.convention.name() << "\n";
  os << "status: " << status_name(r.status) << (r.exploratory ? " (exploratory)" : "") << "\n";
  for (auto& res : r.residuals) os << "residual " << res.name << ": " << to_text(res.form) << "\n";
  if (random)
    os << "random check: " << random->nonzero << "/" << random->trials << " nonzero (seed " << random->seed
       << (random->corrupted ? ", corrupted rhs" : "") << ")\n";
  if (!r.line_audit.empty()) {
    os << "line audit:\n";
    for (auto& line : r.line_audit) {
      os << "  [" << verdict_name(line.verdict) << "] " << line.label << "\n";
      os << "    written: " << line.written << "\n";
      if (line.verdict != AuditVerdict::kMatch) os << "    engine:  " << line.engine << "\n";
    }
  }
  for (auto& note : r.notes) os << "note: " << note << "\n";
  os << "wall_time: " << seconds(r.wall_time + (random ? random->wall_time : 0.0)) << "\n";
  return os.str();
}

inline std::string report_latex(const VerificationReport& r) {
  std::ostringstream os;
  os << "% " << external_name(r.identity) << ", n = " << r.n << ", convention " << r.convention.name() << ": "
     << status_name(r.status) << "\n";
  os << "\\begin{align*}\n";
  os << "\\text{lhs} &= " << to_latex(r.lhs) << " \\\\\n";
  os << "\\text{rhs} &= " << to_latex(r.rhs) << " \\\\\n";
  os << "\\text{lhs} - \\text{rhs} &= " << to_latex(r.lhs - r.rhs) << "\n";
  os << "\\end{align*}\n";
  return os.str();
}

}  // namespace heis
