#include "proxloc/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "proxloc/errors.hpp"

namespace proxloc {

namespace {

constexpr const char* kVersionComment = "# format_version 1";
constexpr const char* kTraceHeader = "t_ms,beacon_id,rssi_dbm";
constexpr const char* kCalibrationHeader = "distance_m,rssi_dbm";

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

bool skippable(const std::string& line) {
    return line.empty() || line[0] == '#';
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& field, int row, int col, const char* col_name) {
    const std::string t = trim(field);
    try {
        std::size_t consumed = 0;
        const double v = std::stod(t, &consumed);
        if (consumed != t.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(col) +
                         " (" + col_name + "): '" + t + "' is not a number");
    }
}

std::int64_t parse_int(const std::string& field, int row, int col, const char* col_name) {
    const std::string t = trim(field);
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size())
        throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(col) +
                         " (" + col_name + "): '" + t + "' is not an integer");
    return v;
}

// Reads header + data rows, skipping comments/blanks, invoking on_row with
// the physical 1-based row number.
template <typename OnRow>
void read_csv(std::istream& in, const char* expected_header, int expected_fields,
              OnRow&& on_row) {
    std::string line;
    int row = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++row;
        line = strip_cr(line);
        if (skippable(line)) continue;
        if (!header_seen) {
            if (line != expected_header)
                throw ParseError("row " + std::to_string(row) + ": expected header '" +
                                 expected_header + "', got '" + line + "'");
            header_seen = true;
            continue;
        }
        auto fields = split_fields(line);
        if (static_cast<int>(fields.size()) != expected_fields)
            throw ParseError("row " + std::to_string(row) + ": expected " +
                             std::to_string(expected_fields) + " fields, got " +
                             std::to_string(fields.size()));
        on_row(row, fields);
    }
    if (!header_seen)
        throw ParseError(std::string("missing header '") + expected_header + "'");
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "' for reading");
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    return out;
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

std::string format_number(double v, int significant_digits) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", significant_digits, v);
    return buf;
}

std::vector<RssiSample> read_trace(std::istream& in, std::vector<std::string>* warnings) {
    std::vector<RssiSample> samples;
    std::map<std::string, std::int64_t> last_t;
    read_csv(in, kTraceHeader, 3, [&](int row, const std::vector<std::string>& f) {
        RssiSample s;
        s.t_ms = parse_int(f[0], row, 1, "t_ms");
        if (s.t_ms < 0)
            throw ParseError("row " + std::to_string(row) + ", column 1 (t_ms): must be >= 0");
        s.beacon_id = trim(f[1]);
        if (s.beacon_id.empty())
            throw ParseError("row " + std::to_string(row) + ", column 2 (beacon_id): empty");
        s.rssi = parse_double(f[2], row, 3, "rssi_dbm");
        if (s.rssi == 0.0)
            throw ParseError("row " + std::to_string(row) +
                             ", column 3 (rssi_dbm): 0 is reserved as the stream-end sentinel");
        if (!std::isfinite(s.rssi))
            throw ParseError("row " + std::to_string(row) + ", column 3 (rssi_dbm): not finite");

        auto [it, first] = last_t.try_emplace(s.beacon_id, s.t_ms);
        if (!first) {
            if (warnings && s.t_ms < it->second)
                warnings->push_back("row " + std::to_string(row) + ": t_ms " +
                                    std::to_string(s.t_ms) + " is behind beacon '" +
                                    s.beacon_id + "' stream (last " +
                                    std::to_string(it->second) + ")");
            it->second = std::max(it->second, s.t_ms);
        }
        samples.push_back(std::move(s));
    });
    return samples;
}

std::vector<RssiSample> read_trace_file(const std::string& path,
                                        std::vector<std::string>* warnings) {
    auto in = open_input(path);
    return read_trace(in, warnings);
}

void write_trace(const std::vector<RssiSample>& samples, std::ostream& out) {
    out << kVersionComment << '\n' << kTraceHeader << '\n';
    for (const auto& s : samples) {
        out << s.t_ms << ',' << s.beacon_id << ',' << format_number(s.rssi) << '\n';
    }
}

void write_trace_file(const std::vector<RssiSample>& samples, const std::string& path) {
    auto out = open_output(path);
    write_trace(samples, out);
}

std::vector<CalibrationPoint> read_calibration(std::istream& in) {
    std::vector<CalibrationPoint> points;
    read_csv(in, kCalibrationHeader, 2, [&](int row, const std::vector<std::string>& f) {
        CalibrationPoint p;
        p.distance = parse_double(f[0], row, 1, "distance_m");
        p.mean_rssi = parse_double(f[1], row, 2, "rssi_dbm");
        points.push_back(p);
    });
    return points;
}

std::vector<CalibrationPoint> read_calibration_file(const std::string& path) {
    auto in = open_input(path);
    return read_calibration(in);
}

void write_model(const PathLossFit& fit, std::ostream& out) {
    out << kVersionComment << '\n';
    out << "n=" << format_number(fit.model.n) << ", c=" << format_number(fit.model.c)
        << ", d0=" << format_number(fit.model.d0);
    if (!std::isnan(fit.r2)) out << ", r2=" << format_number(fit.r2);
    out << '\n';
}

void write_model_file(const PathLossFit& fit, const std::string& path) {
    auto out = open_output(path);
    write_model(fit, out);
}

PathLossFit read_model(std::istream& in) {
    std::string line;
    int row = 0;
    while (std::getline(in, line)) {
        ++row;
        line = strip_cr(line);
        if (skippable(line)) continue;

        PathLossFit fit;
        fit.r2 = std::numeric_limits<double>::quiet_NaN();
        bool have_n = false, have_c = false;
        for (const auto& field : split_fields(line)) {
            const auto eq = field.find('=');
            if (eq == std::string::npos)
                throw ParseError("row " + std::to_string(row) + ": expected key=value, got '" +
                                 trim(field) + "'");
            const std::string key = trim(field.substr(0, eq));
            const double value = parse_double(field.substr(eq + 1), row, 0, key.c_str());
            if (key == "n") {
                fit.model.n = value;
                have_n = true;
            } else if (key == "c") {
                fit.model.c = value;
                have_c = true;
            } else if (key == "d0") {
                fit.model.d0 = value;
            } else if (key == "r2") {
                fit.r2 = value;
            } else {
                throw ParseError("row " + std::to_string(row) + ": unknown key '" + key + "'");
            }
        }
        if (!have_n || !have_c)
            throw ParseError("row " + std::to_string(row) + ": model record needs n and c");
        fit.model.validate();
        return fit;
    }
    throw ParseError("model record not found");
}

PathLossFit read_model_file(const std::string& path) {
    auto in = open_input(path);
    return read_model(in);
}

}  // namespace proxloc
