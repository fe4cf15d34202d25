#ifndef TSF_CSV_HPP
#define TSF_CSV_HPP

#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "common.hpp"
#include "surface.hpp"

namespace tsf {

inline constexpr const char* artifact_version = "1.0.0";

// Header plus rows; numbers are printed with 17 significant digits, rows end in LF.
class CsvTable {
public:
    using Cell = std::variant<double, long long, std::string>;

    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<Cell> row) {
        if (row.size() != header_.size()) throw validation_error("csv row width does not match header");
        rows_.push_back(std::move(row));
    }

    std::size_t rows() const { return rows_.size(); }

    std::string str() const {
        std::vector<std::string> head;
        for (const auto& h : header_) head.push_back(quote(h));
        std::string out = join(head);
        for (const auto& r : rows_) {
            std::vector<std::string> cells;
            for (const auto& c : r) cells.push_back(format(c));
            out += join(cells);
        }
        return out;
    }

    void write(const std::string& path) const { write_text_file(path, str()); }

    static void write_text_file(const std::string& path, const std::string& text) {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw io_error("cannot open '" + path + "' for writing");
        f << text;
        f.close();
        if (!f) throw io_error("write to '" + path + "' failed");
    }

private:
    static std::string format(const Cell& c) {
        if (auto* d = std::get_if<double>(&c)) return detail::fmt17(*d);
        if (auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
        return quote(std::get<std::string>(c));
    }
    // RFC 4180 quoting for cells with separators or quotes
    static std::string quote(const std::string& s) {
        if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
        std::string q = "\"";
        for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        return q + "\"";
    }
    static std::string join(const std::vector<std::string>& cells) {
        std::string line;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) line += ',';
            line += cells[i];
        }
        return line + '\n';
    }

    std::vector<std::string> header_;
    std::vector<std::vector<Cell>> rows_;
};

inline std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    if (f.bad()) throw io_error("read from '" + path + "' failed");
    return ss.str();
}

struct RunManifest {
    std::vector<std::string> command_line;
    std::uint64_t seed = 0;
    std::string config;  // canonical "key=value;..." string the hash is taken over
    std::vector<std::string> outputs;
    std::string started;
    std::string finished;

    std::string config_hash() const { return hex64(fnv1a(config)); }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["command_line"] = command_line;
        j["seed"] = seed;
        j["config"] = config;
        j["config_hash"] = config_hash();
        j["version"] = artifact_version;
        j["started"] = started;
        j["finished"] = finished;
        j["outputs"] = outputs;
        return j;
    }

    void write(const std::string& path) const { CsvTable::write_text_file(path, to_json().dump(2) + "\n"); }
};

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace tsf

#endif  // TSF_CSV_HPP
