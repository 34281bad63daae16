#include "survbma/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "survbma/errors.hpp"

namespace survbma {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(current);
            current.clear();
        } else if (c != '\r') {
            current.push_back(c);
        }
    }
    fields.push_back(current);
    return fields;
}

double parse_number(const std::string& field, std::size_t row, const char* column) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError("row " + std::to_string(row) + ": column '" + column +
                          "' is not a number: '" + field + "'");
    }
    return value;
}

int parse_flag(const std::string& field, std::size_t row, const char* column) {
    if (field == "0") return 0;
    if (field == "1") return 1;
    throw ConfigError("row " + std::to_string(row) + ": column '" + column +
                      "' must be 0 or 1, got '" + field + "'");
}

}  // namespace

SurvivalData ingest_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open data file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty data file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "time,event,group") {
        throw ConfigError("expected header 'time,event,group', got '" + line + "'");
    }

    SurvivalData data;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        ++row;
        const auto fields = split_fields(line);
        if (fields.size() != 3) {
            throw ConfigError("row " + std::to_string(row) + ": expected 3 columns, got " +
                              std::to_string(fields.size()));
        }
        const double time = parse_number(fields[0], row, "time");
        if (!(time > 0.0) || !std::isfinite(time)) {
            throw ConfigError("row " + std::to_string(row) +
                              ": time must be positive and finite");
        }
        const int event = parse_flag(fields[1], row, "event");
        const int group = parse_flag(fields[2], row, "group");
        data.add(time, event == 1, group);
    }
    return data;
}

void write_csv(const SurvivalData& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << "time,event,group\n";
    char buffer[64];
    for (std::size_t i = 0; i < data.size(); ++i) {
        std::snprintf(buffer, sizeof(buffer), "%.17g", data.time(i));
        out << buffer << ',' << (data.event(i) ? 1 : 0) << ',' << data.treatment(i) << '\n';
    }
    if (!out) throw ConfigError("failed writing: " + path);
}

}  // namespace survbma
