#pragma once

#include <map>
#include <string>
#include <vector>

namespace vqht::cli {

/// Validated experiment settings. Every key the scenario may read is present,
/// with defaults filled in; values keep their normalized text form so the
/// manifest can echo them.
class Settings {
public:
    std::string scenario() const { return text("run.scenario"); }

    const std::string& text(const std::string& key) const;
    double real(const std::string& key) const;
    long integer(const std::string& key) const;
    bool flag(const std::string& key) const;
    std::vector<double> reals(const std::string& key) const;
    std::vector<long> integers(const std::string& key) const;

    const std::map<std::string, std::string>& values() const { return values_; }
    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

private:
    std::map<std::string, std::string> values_;  ///< "section.key" -> value
};

/// Parses an INI file and checks it against the schema of its scenario.
/// Throws ValidationError on unknown sections or keys, missing required
/// keys, malformed values or out-of-range numbers.
Settings load_settings(const std::string& path);
Settings parse_settings(const std::string& text);

/// Schema reference, one line per key, for `vqht validate --schema`.
std::string schema_text();

const std::vector<std::string>& scenario_names();

}  // namespace vqht::cli
