#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qsr::pipeline {

/// Flat "key = value" configuration. Sections are spelled with dotted keys
/// (fsr.rho, train.epochs). '#' starts a comment; blank lines are ignored.
class KeyValueConfig {
public:
    /// Throws FormatError on lines without '=' or with an empty key.
    [[nodiscard]] static KeyValueConfig parse(std::string_view text);
    /// Throws IoError when the file cannot be read.
    [[nodiscard]] static KeyValueConfig load(const std::filesystem::path& path);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    [[nodiscard]] bool contains(const std::string& key) const { return values_.count(key) != 0; }
    [[nodiscard]] std::optional<std::string> get(const std::string& key) const;

    /// Typed lookups; throw ValidationError when the stored value does not parse.
    [[nodiscard]] std::string get_string(const std::string& key, const std::string& fallback) const;
    [[nodiscard]] int get_int(const std::string& key, int fallback) const;
    [[nodiscard]] double get_double(const std::string& key, double fallback) const;
    [[nodiscard]] bool get_bool(const std::string& key, bool fallback) const;

    /// Keys not in `known`, in sorted order.
    [[nodiscard]] std::vector<std::string> unknown_keys(const std::vector<std::string>& known) const;

    [[nodiscard]] const std::map<std::string, std::string>& values() const noexcept { return values_; }

private:
    std::map<std::string, std::string> values_;
};

}  // namespace qsr::pipeline
