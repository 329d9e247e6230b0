#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "proxloc/pathloss.hpp"

namespace proxloc {

// One timestamped RSSI observation from one beacon. An RSSI of exactly 0 is
// reserved as the stream-end sentinel and is rejected in data rows.
struct RssiSample {
    std::int64_t t_ms = 0;
    std::string beacon_id;
    double rssi = 0.0;  // dBm

    bool operator==(const RssiSample&) const = default;
};

// Exact shortest decimal representation; parses back to the identical double.
std::string format_number(double v);
// Fixed significant digits, for aggregate report tables.
std::string format_number(double v, int significant_digits);

// Trace CSV, header `t_ms,beacon_id,rssi_dbm`. Lines starting with '#' and
// blank lines are skipped; LF and CRLF both accepted. Errors carry 1-based
// physical row numbers. Non-monotonic timestamps within a beacon stream are
// reported through `warnings`, not as errors.
std::vector<RssiSample> read_trace(std::istream& in,
                                   std::vector<std::string>* warnings = nullptr);
std::vector<RssiSample> read_trace_file(const std::string& path,
                                        std::vector<std::string>* warnings = nullptr);
void write_trace(const std::vector<RssiSample>& samples, std::ostream& out);
void write_trace_file(const std::vector<RssiSample>& samples, const std::string& path);

// Calibration CSV, header `distance_m,rssi_dbm`.
std::vector<CalibrationPoint> read_calibration(std::istream& in);
std::vector<CalibrationPoint> read_calibration_file(const std::string& path);

// Path-loss model record: one `n=…, c=…, d0=…, r2=…` line after the
// format_version comment. r2 is optional on read (NaN when absent).
void write_model(const PathLossFit& fit, std::ostream& out);
void write_model_file(const PathLossFit& fit, const std::string& path);
PathLossFit read_model(std::istream& in);
PathLossFit read_model_file(const std::string& path);

}  // namespace proxloc
