#include "congesta/toml.hpp"

#include <cctype>
#include <fstream>

namespace congesta::toml {

namespace {

std::string strip(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// comment starts at the first '#' outside a quoted string
std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_str = !in_str;
        else if (line[i] == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

Value parse_scalar(const std::string& tok, int lineno) {
    if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"') {
        Value v;
        v.kind = Value::Kind::string;
        v.str = tok.substr(1, tok.size() - 2);
        return v;
    }
    if (tok == "true" || tok == "false") {
        Value v;
        v.kind = Value::Kind::boolean;
        v.num = tok == "true" ? 1.0 : 0.0;
        return v;
    }
    try {
        size_t pos = 0;
        double d = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        Value v;
        v.kind = Value::Kind::number;
        v.num = d;
        return v;
    } catch (const std::exception&) {
        fail(errc::config,
             "line " + std::to_string(lineno) + ": cannot parse value '" + tok + "'");
    }
}

std::vector<std::string> split_top_level(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    bool in_str = false;
    for (char ch : s) {
        if (ch == '"') in_str = !in_str;
        if (ch == ',' && !in_str) {
            out.push_back(strip(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    std::string last = strip(cur);
    if (!last.empty()) out.push_back(last);
    return out;
}

} // namespace

Table parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(errc::config, "cannot open scenario file " + path.string());
    Table table;
    std::string section;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = strip(strip_comment(line));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                fail(errc::config, "line " + std::to_string(lineno) + ": malformed section header");
            section = strip(s.substr(1, s.size() - 2));
            if (section.empty())
                fail(errc::config, "line " + std::to_string(lineno) + ": empty section name");
            continue;
        }
        size_t eq = s.find('=');
        if (eq == std::string::npos)
            fail(errc::config, "line " + std::to_string(lineno) + ": expected key = value");
        std::string key = strip(s.substr(0, eq));
        std::string val = strip(s.substr(eq + 1));
        if (key.empty() || val.empty())
            fail(errc::config, "line " + std::to_string(lineno) + ": empty key or value");
        std::string full = section.empty() ? key : section + "." + key;
        Value v;
        if (val.front() == '[') {
            if (val.back() != ']')
                fail(errc::config, "line " + std::to_string(lineno) + ": unterminated array");
            v.kind = Value::Kind::array;
            for (const std::string& tok : split_top_level(val.substr(1, val.size() - 2))) {
                Value elem = parse_scalar(tok, lineno);
                if (elem.kind == Value::Kind::string) v.strs.push_back(elem.str);
                else v.nums.push_back(elem.num);
            }
        } else {
            v = parse_scalar(val, lineno);
        }
        v.bare_key = key;
        if (!table.emplace(full, std::move(v)).second)
            fail(errc::config, "duplicate key: " + full);
    }
    return table;
}

} // namespace congesta::toml
