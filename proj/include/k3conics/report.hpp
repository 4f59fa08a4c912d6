#pragma once

#include <json.hpp>

#include <chrono>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace k3conics::report {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Where an expected value comes from.
namespace source {
inline constexpr const char* kPublished = "published";  ///< value stated for the construction
inline constexpr const char* kDerived = "derived";      ///< recomputed by an independent method
inline constexpr const char* kControl = "control";      ///< planted negative control
inline constexpr const char* kProperty = "property";    ///< invariance or consistency property
}  // namespace source

struct Check {
  std::string name;
  Json expected;
  Json computed;
  bool pass = false;
  std::string source;
};

struct Section {
  std::string name;
  std::vector<Check> checks;
  Json details = Json::object();
  double elapsed_seconds = 0;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  /// Records a check whose verdict is expected == computed.
  template <class E, class C>
  bool expect_equal(std::string name, const E& expected, const C& computed, const char* src) {
    Json e = expected, c = computed;
    const bool ok = e == c;
    checks.push_back({std::move(name), std::move(e), std::move(c), ok, src});
    return ok;
  }

  bool expect_true(std::string name, bool computed, const char* src) {
    return expect_equal(std::move(name), true, computed, src);
  }
};

struct Runtime {
  unsigned threads = 1;
  double total_seconds = 0;
};

/// Stage results plus configuration. Everything except `runtime` depends
/// only on the configuration, so two runs compare equal once it is removed.
struct VerificationReport {
  Json config = Json::object();
  std::vector<Section> sections;
  Runtime runtime;

  bool overall() const {
    for (const auto& s : sections)
      if (!s.pass()) return false;
    return !sections.empty();
  }

  Json to_json(bool include_runtime = true) const {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["tool"] = "k3conics";
#ifdef K3CONICS_VERSION
    j["version"] = K3CONICS_VERSION;
#endif
    j["config"] = config;
    Json stages = Json::array();
    for (const auto& s : sections) {
      Json st;
      st["name"] = s.name;
      st["pass"] = s.pass();
      Json checks = Json::array();
      for (const auto& c : s.checks)
        checks.push_back({{"name", c.name}, {"expected", c.expected}, {"computed", c.computed}, {"pass", c.pass},
                          {"source", c.source}});
      st["checks"] = std::move(checks);
      st["details"] = s.details;
      stages.push_back(std::move(st));
    }
    j["stages"] = std::move(stages);
    j["overall"] = overall();
    if (include_runtime) {
      Json rt;
      rt["threads"] = runtime.threads;
      Json elapsed = Json::object();
      for (const auto& s : sections) elapsed[s.name] = s.elapsed_seconds;
      rt["elapsed_seconds"] = std::move(elapsed);
      rt["total_seconds"] = runtime.total_seconds;
      j["runtime"] = std::move(rt);
    }
    return j;
  }
};

/// Compact one-line rendering of a JSON value for the console table.
inline std::string brief(const Json& v, std::size_t limit = 60) {
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.size() > limit) s = s.substr(0, limit - 3) + "...";
  return s;
}

inline void print_table(std::ostream& os, const VerificationReport& r) {
  for (const auto& s : r.sections) {
    os << "== " << s.name << " (" << (s.pass() ? "pass" : "FAIL") << ")\n";
    for (const auto& c : s.checks)
      os << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name << ": expected " << brief(c.expected)
         << ", computed " << brief(c.computed) << " (" << c.source << ")\n";
  }
  os << "overall: " << (r.overall() ? "PASS" : "FAIL") << '\n';
}

/// Wall-clock timer for a section.
class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace k3conics::report
