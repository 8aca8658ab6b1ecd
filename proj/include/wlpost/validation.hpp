#pragma once

// Oracle-backed end-to-end checks. Every check reports what it measured, the
// pinned tolerance and a verdict; failures are report entries, not exceptions.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "wlpost/config.hpp"
#include "wlpost/runner.hpp"

namespace wlpost {

struct CheckResult {
    std::string id;           // "1" .. "11", or "10-hard"
    std::string title;
    bool pass = false;
    double measured = 0.0;    // headline number
    std::string tolerance;    // human-readable bound on `measured`
    nlohmann::json details = nlohmann::json::object();
    double seconds = 0.0;
};

nlohmann::json to_json(const CheckResult& r);
std::string one_line(const CheckResult& r);

struct ValidationOptions {
    std::string cache_dir = "validation-runs";  // deterministic runs are cached here by config
    std::ostream* log = nullptr;
    bool full = true;  // criterion 7 covers the large runs only when full
};

/// Criteria 1..11 at their stated scale. Criterion 10 includes its hard
/// companion (the 4-node ERGM surface check).
CheckResult run_check(int criterion, const ValidationOptions& opts);
CheckResult check_ergm_surface(const ValidationOptions& opts);

/// Runs a configuration through run_experiment, reusing a finished run with an
/// identical configuration from the cache directory.
RunResult cached_run(RunConfig cfg, const ValidationOptions& opts);

enum class ValidationLevel { Fast, Full };
ValidationLevel parse_validation_level(const std::string& s);

/// fast: the enumerable-instance checks (1-6, 8, the 4-node ERGM surface, and 7
/// over those runs). full: additionally the 64x64 Ising, Florentine ERGM and
/// image segmentation runs. Writes <out_dir>/report.json and returns it.
nlohmann::json validate_suite(ValidationLevel level, const std::string& out_dir, std::ostream* log = nullptr);

}  // namespace wlpost
