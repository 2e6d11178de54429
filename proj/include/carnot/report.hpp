#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace carnot {

/// Fixed formatting so reports are byte-stable across runs on a platform.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// Line-oriented `key = value` report with optional named tables; the output
/// order is exactly the emission order.
class Report {
public:
    void kv(const std::string& key, const std::string& v) { lines_.push_back(key + " = " + v); }
    void kv(const std::string& key, const char* v) { kv(key, std::string(v)); }
    void kv(const std::string& key, double v) { kv(key, format_double(v)); }
    void kv(const std::string& key, bool v) { kv(key, std::string(v ? "true" : "false")); }
    void kv(const std::string& key, int v) { kv(key, std::to_string(v)); }
    void kv(const std::string& key, long v) { kv(key, std::to_string(v)); }
    void kv(const std::string& key, std::size_t v) { kv(key, std::to_string(v)); }
    void kv(const std::string& key, unsigned long long v) { kv(key, std::to_string(v)); }

    void blank() { lines_.emplace_back(); }

    void section(const std::string& name, const std::vector<std::string>& columns) {
        std::string head = "[" + name + "]";
        lines_.push_back(head);
        std::string cols;
        for (const auto& c : columns) cols += (cols.empty() ? "" : "  ") + c;
        lines_.push_back(cols);
    }

    void row(const std::vector<std::string>& cells) {
        std::string r;
        for (const auto& c : cells) r += (r.empty() ? "" : "  ") + c;
        lines_.push_back(r);
    }

    void row(const std::vector<double>& cells) {
        std::vector<std::string> s;
        s.reserve(cells.size());
        for (double c : cells) s.push_back(format_double(c));
        row(s);
    }

    std::string str() const {
        std::string out;
        for (const auto& l : lines_) {
            out += l;
            out += '\n';
        }
        return out;
    }

    void write(std::ostream& os) const { os << str(); }

private:
    std::vector<std::string> lines_;
};

} // namespace carnot
