#ifndef PROGPOLY_TOML_LITE_HPP
#define PROGPOLY_TOML_LITE_HPP

#include <map>
#include <string>
#include <vector>

namespace progpoly::tomllite {

// A small reader for the flat subset of TOML the config files use:
// scalar keys (integers, floats, booleans, quoted strings), homogeneous
// scalar arrays, [section] tables and [[array-of-tables]] entries.

struct Value {
    enum class Kind { Int, Float, Str, Bool, Array } kind = Kind::Int;
    long i = 0;
    double f = 0;
    bool b = false;
    std::string s;
    std::vector<Value> items;
};

struct Table {
    std::map<std::string, Value> values;

    bool has(const std::string& k) const { return values.count(k) != 0; }
    long get_int(const std::string& k, long fallback) const;
    double get_float(const std::string& k, double fallback) const;
    bool get_bool(const std::string& k, bool fallback) const;
    std::string get_str(const std::string& k, const std::string& fallback) const;
};

struct Document {
    Table root;  // top-level and [section] keys, the latter as "section.key"
    std::map<std::string, std::vector<Table>> table_arrays;
};

Document parse(const std::string& text);
Document parse_file(const std::string& path);

}  // namespace progpoly::tomllite

#endif
