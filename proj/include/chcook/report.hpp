// report.hpp — CSV tables and JSON summaries with byte-stable formatting.
//
// Every numeric cell goes through the same "%.17g" round-trip format, so a
// rerun with the same configuration and seed reproduces the CSV body exactly.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace chcook {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Finite numbers stay numbers; infinities and NaN become strings so the
/// summary stays valid JSON.
inline nlohmann::json json_number(double v) {
    if (std::isfinite(v)) return v;
    return fmt_double(v);
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    class RowBuilder {
      public:
        explicit RowBuilder(Table& t) : table_(t) {}
        RowBuilder& cell(const std::string& s) {
            row_.push_back(s);
            return *this;
        }
        RowBuilder& cell(double v) { return cell(fmt_double(v)); }
        RowBuilder& cell(int v) { return cell(std::to_string(v)); }
        RowBuilder& cell(std::size_t v) { return cell(std::to_string(v)); }
        ~RowBuilder() { table_.rows.push_back(std::move(row_)); }

      private:
        Table& table_;
        std::vector<std::string> row_;
    };

    RowBuilder row() { return RowBuilder(*this); }

    std::string to_csv() const {
        std::string out;
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (i) out += ',';
            out += columns[i];
        }
        out += '\n';
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (i) out += ',';
                out += r[i];
            }
            out += '\n';
        }
        return out;
    }
};

inline void write_text(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << body;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace chcook
