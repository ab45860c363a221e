#include "ddp/config.hpp"

#include "ddp/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace ddp {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T convert(const std::string& key, const std::string& value) {
    T out{};
    const auto* end = value.data() + value.size();
    const auto res = std::from_chars(value.data(), end, out);
    if (res.ec != std::errc{} || res.ptr != end) throw ConfigError("bad value for '" + key + "': '" + value + "'");
    return out;
}

}  // namespace

KeyValues KeyValues::parse(std::istream& in) {
    KeyValues kv;
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineNo) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineNo) + ": empty key");
        kv.entries_[key] = trim(line.substr(eq + 1));
    }
    return kv;
}

KeyValues KeyValues::parse(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
}

KeyValues KeyValues::read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return parse(in);
}

std::optional<std::string> KeyValues::get(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::string KeyValues::require(const std::string& key) const {
    if (auto v = get(key)) return *v;
    throw ConfigError("missing key '" + key + "'");
}

std::optional<double> KeyValues::getReal(const std::string& key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    return convert<double>(key, *v);
}

std::optional<long long> KeyValues::getInt(const std::string& key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    return convert<long long>(key, *v);
}

std::optional<std::size_t> KeyValues::getSize(const std::string& key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    return convert<std::size_t>(key, *v);
}

std::optional<bool> KeyValues::getBool(const std::string& key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
    if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
    throw ConfigError("bad boolean for '" + key + "': '" + *v + "'");
}

void KeyValues::rejectUnknown(const std::vector<std::string>& known) const {
    for (const auto& [k, v] : entries_)
        if (std::find(known.begin(), known.end(), k) == known.end()) throw ConfigError("unknown key '" + k + "'");
}

std::vector<double> parse_real_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(convert<double>("list", item));
    }
    return out;
}

}  // namespace ddp
