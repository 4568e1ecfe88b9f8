#include "config.hpp"

#include "bhpm/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace bhpm::cli {

namespace {

[[noreturn]] void usage(const std::string& msg) { throw Error(ErrorKind::usage, msg); }

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

bool valid_key(const std::string& k) {
    if (k.empty() || !(std::isalpha(static_cast<unsigned char>(k[0])) || k[0] == '_')) return false;
    for (char c : k)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')) return false;
    return true;
}

// split on commas outside parentheses
std::vector<std::string> split_top(const std::string& s) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char c : s) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

// output paths and the worker count never change what gets written
const std::set<std::string> kNotHashed{"out", "threads"};

} // namespace

double parse_number(const std::string& raw) {
    const std::string s = trim(raw);
    if (s.empty()) usage("empty number");
    const auto caret = s.find('^');
    if (caret != std::string::npos) return std::pow(parse_number(s.substr(0, caret)), parse_number(s.substr(caret + 1)));
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || !std::isfinite(v)) usage("not a number: '" + s + "'");
    return v;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    if (trim(s).empty()) return out;
    for (const std::string& item : split_top(s)) {
        const bool geom = item.rfind("geom(", 0) == 0, lin = item.rfind("lin(", 0) == 0;
        if (geom || lin) {
            if (item.back() != ')') usage("unterminated '" + item + "'");
            const auto open = item.find('(');
            const auto args = split_top(item.substr(open + 1, item.size() - open - 2));
            if (args.size() != 3) usage("'" + item + "' needs lo, hi, n");
            const double lo = parse_number(args[0]), hi = parse_number(args[1]);
            const double nf = parse_number(args[2]);
            if (nf < 1 || nf != std::floor(nf)) usage("bad count in '" + item + "'");
            const int n = int(nf);
            if (geom && (lo <= 0 || hi <= 0)) usage("geom() needs positive ends");
            for (int i = 0; i < n; ++i) {
                const double t = n == 1 ? 0.0 : double(i) / (n - 1);
                // exact endpoints, so lists written either way hash the same
                double v = geom ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
                if (i == 0) v = lo;
                if (i == n - 1) v = hi;
                out.push_back(v);
            }
        } else if (!item.empty()) {
            out.push_back(parse_number(item));
        } else {
            usage("empty list item in '" + s + "'");
        }
    }
    return out;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Config Config::parse(const std::string& text, const std::string& origin) {
    Config c;
    std::istringstream in(text);
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
        ++no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) usage(origin + ":" + std::to_string(no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (!valid_key(key)) usage(origin + ":" + std::to_string(no) + ": bad key '" + key + "'");
        if (c.has(key)) usage(origin + ":" + std::to_string(no) + ": duplicate key '" + key + "'");
        c.kv_[key] = trim(line.substr(eq + 1));
    }
    return c;
}

Config Config::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) usage("cannot read config '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str(), path);
}

void Config::set(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) usage("override '" + assignment + "' is not key=value");
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void Config::set(const std::string& key, const std::string& value) {
    if (!valid_key(key)) usage("bad key '" + key + "'");
    kv_[key] = value;
}

std::string Config::str(const std::string& key, const std::string& def) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? def : it->second;
}

std::string Config::str(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) usage("missing key '" + key + "'");
    return it->second;
}

double Config::num(const std::string& key, double def) const { return has(key) ? num(key) : def; }

double Config::num(const std::string& key) const {
    try {
        return parse_number(str(key));
    } catch (const Error& e) {
        usage(key + ": " + e.what());
    }
}

int Config::integer(const std::string& key, int def) const {
    if (!has(key)) return def;
    const double v = num(key);
    if (v != std::floor(v) || std::abs(v) > 1e9) usage(key + " must be an integer");
    return int(v);
}

bool Config::flag(const std::string& key, bool def) const {
    if (!has(key)) return def;
    const std::string v = str(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    usage(key + " must be true or false");
}

std::vector<double> Config::nums(const std::string& key) const {
    try {
        return parse_list(str(key));
    } catch (const Error& e) {
        usage(key + ": " + e.what());
    }
}

std::vector<double> Config::nums(const std::string& key, const std::vector<double>& def) const {
    return has(key) ? nums(key) : def;
}

std::vector<int> Config::ints(const std::string& key, const std::vector<int>& def) const {
    if (!has(key)) return def;
    std::vector<int> out;
    for (double v : nums(key)) {
        if (v != std::floor(v) || std::abs(v) > 1e9) usage(key + " must hold integers");
        out.push_back(int(v));
    }
    return out;
}

std::vector<std::string> Config::words(const std::string& key, const std::vector<std::string>& def) const {
    if (!has(key)) return def;
    std::istringstream in(str(key));
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

int Config::power_of_two(const std::string& key, int def) const {
    const int v = integer(key, def);
    if (v < 1 || (v & (v - 1)) != 0) usage(key + " must be a power of two");
    return v;
}

void Config::restrict_to(const std::set<std::string>& allowed) const {
    for (const auto& [k, v] : kv_)
        if (!allowed.count(k)) usage("unknown key '" + k + "' for this command");
}

std::string Config::canonical() const {
    std::string out;
    for (const auto& [k, v] : kv_) {
        if (kNotHashed.count(k)) continue;
        out += k + "=" + v + "\n";
    }
    return out;
}

std::string Config::hash() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical())));
    return buf;
}

} // namespace bhpm::cli
