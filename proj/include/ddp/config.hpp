#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ddp {

/// Flat `key = value` text: one pair per line, `#` starts a comment, blank
/// lines ignored. Later duplicates override earlier ones.
class KeyValues {
public:
    static KeyValues parse(std::istream& in);
    static KeyValues parse(const std::string& text);
    static KeyValues read(const std::filesystem::path& path);

    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    std::optional<std::string> get(const std::string& key) const;
    std::string require(const std::string& key) const;

    std::optional<double> getReal(const std::string& key) const;
    std::optional<long long> getInt(const std::string& key) const;
    std::optional<std::size_t> getSize(const std::string& key) const;
    std::optional<bool> getBool(const std::string& key) const;

    void set(const std::string& key, const std::string& value) { entries_[key] = value; }
    const std::map<std::string, std::string>& entries() const { return entries_; }

    /// Throws ConfigError naming the first key not in `known`.
    void rejectUnknown(const std::vector<std::string>& known) const;

private:
    std::map<std::string, std::string> entries_;
};

std::vector<double> parse_real_list(const std::string& text);

}  // namespace ddp
