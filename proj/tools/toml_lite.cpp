#include "toml_lite.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace progpoly::tomllite {

namespace {

std::string strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Removes a trailing comment that is not inside a string literal.
std::string strip_comment(const std::string& s) {
    bool in_str = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_str = !in_str;
        if (s[i] == '#' && !in_str) return s.substr(0, i);
    }
    return s;
}

Value parse_scalar(const std::string& tok) {
    Value v;
    if (tok.empty()) throw std::invalid_argument("toml: empty value");
    if (tok.front() == '"') {
        if (tok.size() < 2 || tok.back() != '"')
            throw std::invalid_argument("toml: unterminated string: " + tok);
        v.kind = Value::Kind::Str;
        v.s = tok.substr(1, tok.size() - 2);
        return v;
    }
    if (tok == "true" || tok == "false") {
        v.kind = Value::Kind::Bool;
        v.b = tok == "true";
        return v;
    }
    if (tok.find('.') != std::string::npos || tok.find('e') != std::string::npos ||
        tok.find('E') != std::string::npos) {
        v.kind = Value::Kind::Float;
        v.f = std::stod(tok);
        return v;
    }
    v.kind = Value::Kind::Int;
    v.i = std::stol(tok, nullptr, 0);
    return v;
}

Value parse_value(const std::string& tok) {
    if (!tok.empty() && tok.front() == '[') {
        if (tok.back() != ']') throw std::invalid_argument("toml: unterminated array");
        Value v;
        v.kind = Value::Kind::Array;
        std::string body = tok.substr(1, tok.size() - 2);
        std::string cur;
        bool in_str = false;
        for (char c : body) {
            if (c == '"') in_str = !in_str;
            if (c == ',' && !in_str) {
                const std::string t = strip(cur);
                if (!t.empty()) v.items.push_back(parse_scalar(t));
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        const std::string t = strip(cur);
        if (!t.empty()) v.items.push_back(parse_scalar(t));
        return v;
    }
    return parse_scalar(tok);
}

}  // namespace

long Table::get_int(const std::string& k, long fallback) const {
    auto it = values.find(k);
    if (it == values.end()) return fallback;
    if (it->second.kind != Value::Kind::Int)
        throw std::invalid_argument("toml: expected integer for " + k);
    return it->second.i;
}

double Table::get_float(const std::string& k, double fallback) const {
    auto it = values.find(k);
    if (it == values.end()) return fallback;
    if (it->second.kind == Value::Kind::Int) return static_cast<double>(it->second.i);
    if (it->second.kind != Value::Kind::Float)
        throw std::invalid_argument("toml: expected number for " + k);
    return it->second.f;
}

bool Table::get_bool(const std::string& k, bool fallback) const {
    auto it = values.find(k);
    if (it == values.end()) return fallback;
    if (it->second.kind != Value::Kind::Bool)
        throw std::invalid_argument("toml: expected boolean for " + k);
    return it->second.b;
}

std::string Table::get_str(const std::string& k, const std::string& fallback) const {
    auto it = values.find(k);
    if (it == values.end()) return fallback;
    if (it->second.kind != Value::Kind::Str)
        throw std::invalid_argument("toml: expected string for " + k);
    return it->second.s;
}

Document parse(const std::string& text) {
    Document doc;
    std::istringstream in(text);
    std::string line;
    std::string section;         // "" means root
    Table* array_entry = nullptr;
    while (std::getline(in, line)) {
        line = strip(strip_comment(line));
        if (line.empty()) continue;
        if (line.rfind("[[", 0) == 0) {
            if (line.size() < 5 || line.substr(line.size() - 2) != "]]")
                throw std::invalid_argument("toml: malformed table array: " + line);
            const std::string name = strip(line.substr(2, line.size() - 4));
            doc.table_arrays[name].emplace_back();
            array_entry = &doc.table_arrays[name].back();
            section.clear();
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("toml: malformed section: " + line);
            section = strip(line.substr(1, line.size() - 2));
            array_entry = nullptr;
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("toml: expected key = value: " + line);
        const std::string key = strip(line.substr(0, eq));
        const Value val = parse_value(strip(line.substr(eq + 1)));
        if (array_entry != nullptr)
            array_entry->values[key] = val;
        else if (section.empty())
            doc.root.values[key] = val;
        else
            doc.root.values[section + "." + key] = val;
    }
    return doc;
}

Document parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

}  // namespace progpoly::tomllite
