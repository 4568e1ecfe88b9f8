#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace bhpm::cli {

// Flat key = value store. See the README for the grammar.
class Config {
public:
    static Config parse(const std::string& text, const std::string& origin = "<config>");
    static Config load(const std::string& path);

    // "key=value" from the command line; replaces an existing entry
    void set(const std::string& assignment);
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const { return kv_.count(key) != 0; }
    const std::map<std::string, std::string>& entries() const { return kv_; }

    std::string str(const std::string& key, const std::string& def) const;
    std::string str(const std::string& key) const;
    double num(const std::string& key, double def) const;
    double num(const std::string& key) const;
    int integer(const std::string& key, int def) const;
    bool flag(const std::string& key, bool def) const;
    std::vector<double> nums(const std::string& key) const;
    std::vector<double> nums(const std::string& key, const std::vector<double>& def) const;
    std::vector<int> ints(const std::string& key, const std::vector<int>& def) const;
    // whitespace separated words, since potential ids contain commas
    std::vector<std::string> words(const std::string& key, const std::vector<std::string>& def) const;
    int power_of_two(const std::string& key, int def) const;

    // throws a usage error naming the first key not in `allowed`
    void restrict_to(const std::set<std::string>& allowed) const;

    // sorted key=value lines, without keys that cannot change the results
    std::string canonical() const;
    std::string hash() const; // 16 hex digits of FNV-1a over canonical()

private:
    std::map<std::string, std::string> kv_;
};

// A single number: 1e3, -0.5, 2^-12.
double parse_number(const std::string& s);
// Comma separated numbers, geom(lo, hi, n) or lin(lo, hi, n), mixed freely.
std::vector<double> parse_list(const std::string& s);

std::uint64_t fnv1a(const std::string& s);

} // namespace bhpm::cli
