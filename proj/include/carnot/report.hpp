#pragma once
/// Machine-readable run reports.
///
/// A report holds one or more sections, one per executed subcommand. Each
/// section records its inputs, an FNV-1a digest of them and a list of checks.
/// Asserted checks carry the value and tolerance they were judged on; INFO
/// checks only record a measurement and never affect the exit code. No
/// timestamps or runtimes are written, so a fixed seed reproduces the file.

#include "carnot/common.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace carnot {

using Json = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "carnot-report/1";

struct Check {
  std::string name;
  std::string anchor;  ///< descriptive name of the property, or "plumbing"
  std::string status;  ///< PASS, FAIL or INFO
  double value = 0.0;
  double tol = 0.0;
  std::string relation;  ///< "<=", ">=" or "" for INFO
  Json details = Json::object();
};

class Section {
 public:
  Section(std::string command, Json inputs);

  /// PASS iff value <= tol.
  Check& at_most(const std::string& name, const std::string& anchor, double value, double tol,
                 Json details = Json::object());
  /// PASS iff value >= tol.
  Check& at_least(const std::string& name, const std::string& anchor, double value, double tol,
                  Json details = Json::object());
  /// Boolean property recorded as a count of failures against tolerance 0.
  Check& holds(const std::string& name, const std::string& anchor, bool ok, Json details = Json::object());
  Check& info(const std::string& name, const std::string& anchor, double value, Json details = Json::object());
  /// A module error turned into a FAIL entry.
  Check& error(const std::string& name, const std::string& anchor, const std::exception& e);

  const std::string& command() const { return command_; }
  const std::vector<Check>& checks() const { return checks_; }
  bool ok() const;
  Json to_json() const;

 private:
  std::string command_;
  Json inputs_;
  std::vector<Check> checks_;
};

class Report {
 public:
  Report(std::string command, std::uint64_t seed) : command_(std::move(command)), seed_(seed) {}

  Section& add(Section s);
  const std::vector<Section>& sections() const { return sections_; }
  bool ok() const;
  int exit_code() const { return ok() ? 0 : 1; }
  Json to_json() const;

 private:
  std::string command_;
  std::uint64_t seed_;
  std::vector<Section> sections_;
};

/// 64-bit FNV-1a of the text, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

/// Writes to path.tmp and renames over path. Throws IoError.
void write_atomic(const std::string& path, const std::string& text);

/// Schema violations; empty when the document is a valid report.
std::vector<std::string> validate_report(const Json& doc);

}  // namespace carnot
