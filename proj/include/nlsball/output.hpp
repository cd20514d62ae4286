#pragma once

// CSV tables and JSON reports. Every artifact carries the config hash and the
// artifact version.

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace nlsball {

inline constexpr std::string_view artifact_version = "1.0.0";

/// Shortest decimal that round-trips; "nan", "inf" and "-inf" otherwise.
std::string format_double(double x);

/// Hex rendering of a 64-bit hash, 16 lowercase digits.
std::string format_hash(std::uint64_t h);

using CsvCell = std::variant<double, std::int64_t, std::uint64_t, std::string>;

/// RFC 4180 writer: comma separated, CRLF line ends, fields quoted when they
/// contain a comma, quote, CR or LF. Two trailing columns, config_hash and
/// artifact_version, are appended to the header and every row.
class CsvWriter {
public:
    CsvWriter(std::ostream& os, std::vector<std::string> header, std::uint64_t config_hash);

    void row(const std::vector<CsvCell>& cells);
    std::size_t columns() const noexcept { return width_; }

private:
    void emit(const std::vector<std::string>& fields);

    std::ostream& os_;
    std::size_t width_;
    std::string hash_;
};

std::string csv_escape(std::string_view field);

/// Writes `rows` under `header` to `path`.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<CsvCell>>& rows, std::uint64_t config_hash);

/// A report object starting with the provenance keys, in insertion order.
nlohmann::ordered_json report_header(std::string_view kind, std::uint64_t config_hash);

/// Pretty-printed with two-space indent and a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc);

} // namespace nlsball
