#include "carnot/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace carnot {

Section::Section(std::string command, Json inputs) : command_(std::move(command)), inputs_(std::move(inputs)) {}

Check& Section::at_most(const std::string& name, const std::string& anchor, double value, double tol,
                        Json details) {
  checks_.push_back({name, anchor, value <= tol ? "PASS" : "FAIL", value, tol, "<=", std::move(details)});
  return checks_.back();
}

Check& Section::at_least(const std::string& name, const std::string& anchor, double value, double tol,
                         Json details) {
  checks_.push_back({name, anchor, value >= tol ? "PASS" : "FAIL", value, tol, ">=", std::move(details)});
  return checks_.back();
}

Check& Section::holds(const std::string& name, const std::string& anchor, bool ok, Json details) {
  return at_most(name, anchor, ok ? 0.0 : 1.0, 0.0, std::move(details));
}

Check& Section::info(const std::string& name, const std::string& anchor, double value, Json details) {
  checks_.push_back({name, anchor, "INFO", value, 0.0, "", std::move(details)});
  return checks_.back();
}

Check& Section::error(const std::string& name, const std::string& anchor, const std::exception& e) {
  Json d = {{"error", e.what()}};
  if (auto* ce = dynamic_cast<const Error*>(&e)) d["kind"] = ce->kind();
  return holds(name, anchor, false, std::move(d));
}

bool Section::ok() const {
  for (const auto& c : checks_)
    if (c.status == "FAIL") return false;
  return true;
}

Json Section::to_json() const {
  Json checks = Json::array();
  for (const auto& c : checks_) {
    Json j = {{"name", c.name}, {"anchor", c.anchor}, {"status", c.status}, {"value", c.value}};
    if (c.status != "INFO") {
      j["tol"] = c.tol;
      j["relation"] = c.relation;
    }
    j["details"] = c.details;
    checks.push_back(std::move(j));
  }
  return {{"command", command_},
          {"inputs", inputs_},
          {"inputs_digest", fnv1a_hex(inputs_.dump())},
          {"status", ok() ? "PASS" : "FAIL"},
          {"checks", std::move(checks)}};
}

Section& Report::add(Section s) {
  sections_.push_back(std::move(s));
  return sections_.back();
}

bool Report::ok() const {
  for (const auto& s : sections_)
    if (!s.ok()) return false;
  return true;
}

Json Report::to_json() const {
  int pass = 0, failed = 0, info = 0;
  Json sections = Json::array();
  for (const auto& s : sections_) {
    for (const auto& c : s.checks()) {
      if (c.status == "PASS") ++pass;
      else if (c.status == "FAIL") ++failed;
      else ++info;
    }
    sections.push_back(s.to_json());
  }
  return {{"schema", kReportSchema},
          {"command", command_},
          {"seed", seed_},
          {"status", ok() ? "PASS" : "FAIL"},
          {"summary", {{"pass", pass}, {"fail", failed}, {"info", info}}},
          {"sections", std::move(sections)}};
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) fail("IoError", "cannot write " + tmp);
    f << text;
    f.flush();
    if (!f) fail("IoError", "short write to " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    fail("IoError", "cannot rename onto " + path);
  }
}

namespace {

void need(std::vector<std::string>& errs, const Json& j, const std::string& key, Json::value_t type,
          const std::string& where) {
  if (!j.contains(key)) {
    errs.push_back(where + ": missing '" + key + "'");
    return;
  }
  const auto t = j.at(key).type();
  const bool number = type == Json::value_t::number_float;
  const bool ok = number ? (j.at(key).is_number() || j.at(key).is_null()) : t == type ||
                  (type == Json::value_t::number_unsigned && j.at(key).is_number_integer());
  if (!ok) errs.push_back(where + ": '" + key + "' has the wrong type");
}

}  // namespace

std::vector<std::string> validate_report(const Json& doc) {
  using T = Json::value_t;
  std::vector<std::string> errs;
  if (!doc.is_object()) return {"report is not an object"};
  need(errs, doc, "schema", T::string, "report");
  need(errs, doc, "command", T::string, "report");
  need(errs, doc, "seed", T::number_unsigned, "report");
  need(errs, doc, "status", T::string, "report");
  need(errs, doc, "summary", T::object, "report");
  need(errs, doc, "sections", T::array, "report");
  if (!errs.empty()) return errs;
  if (doc["schema"] != kReportSchema) errs.push_back("report: unknown schema");
  if (doc["sections"].empty()) errs.push_back("report: no sections");

  int pass = 0, failed = 0, info = 0;
  bool all_ok = true;
  for (size_t i = 0; i < doc["sections"].size(); ++i) {
    const Json& s = doc["sections"][i];
    const std::string where = "section " + std::to_string(i);
    if (!s.is_object()) {
      errs.push_back(where + ": not an object");
      continue;
    }
    const size_t before = errs.size();
    need(errs, s, "command", T::string, where);
    need(errs, s, "inputs", T::object, where);
    need(errs, s, "inputs_digest", T::string, where);
    need(errs, s, "status", T::string, where);
    need(errs, s, "checks", T::array, where);
    if (errs.size() != before) continue;
    if (s["inputs_digest"] != fnv1a_hex(s["inputs"].dump())) errs.push_back(where + ": digest mismatch");
    bool sec_ok = true;
    for (size_t k = 0; k < s["checks"].size(); ++k) {
      const Json& c = s["checks"][k];
      const std::string cw = where + " check " + std::to_string(k);
      const size_t b2 = errs.size();
      need(errs, c, "name", T::string, cw);
      need(errs, c, "anchor", T::string, cw);
      need(errs, c, "status", T::string, cw);
      need(errs, c, "value", T::number_float, cw);
      need(errs, c, "details", T::object, cw);
      if (errs.size() != b2) continue;
      const std::string st = c["status"];
      if (c["anchor"].get<std::string>().empty()) errs.push_back(cw + ": empty anchor");
      if (st == "INFO") {
        ++info;
        continue;
      }
      if (st != "PASS" && st != "FAIL") {
        errs.push_back(cw + ": bad status '" + st + "'");
        continue;
      }
      need(errs, c, "tol", T::number_float, cw);
      need(errs, c, "relation", T::string, cw);
      if (errs.size() != b2) continue;
      if (c["relation"] != "<=" && c["relation"] != ">=") errs.push_back(cw + ": bad relation");
      if (st == "PASS") ++pass;
      else {
        ++failed;
        sec_ok = false;
      }
    }
    if (s["status"] != (sec_ok ? "PASS" : "FAIL")) errs.push_back(where + ": status disagrees with its checks");
    all_ok = all_ok && sec_ok;
  }
  const Json& sum = doc["summary"];
  if (sum.value("pass", -1) != pass || sum.value("fail", -1) != failed || sum.value("info", -1) != info)
    errs.push_back("report: summary counts disagree with the checks");
  if (doc["status"] != (all_ok ? "PASS" : "FAIL")) errs.push_back("report: status disagrees with its sections");
  return errs;
}

}  // namespace carnot
