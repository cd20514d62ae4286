#include "nlsball/output.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace nlsball {

std::string format_double(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

std::string format_hash(std::uint64_t h)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string csv_escape(std::string_view field)
{
    if (field.find_first_of(",\"\r\n") == std::string_view::npos)
        return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

CsvWriter::CsvWriter(std::ostream& os, std::vector<std::string> header, std::uint64_t config_hash)
    : os_(os), width_(header.size()), hash_(format_hash(config_hash))
{
    if (header.empty())
        throw std::invalid_argument("CSV header must not be empty");
    header.emplace_back("config_hash");
    header.emplace_back("artifact_version");
    emit(header);
}

void CsvWriter::row(const std::vector<CsvCell>& cells)
{
    if (cells.size() != width_)
        throw std::invalid_argument("CSV row has " + std::to_string(cells.size()) +
                                    " fields, header has " + std::to_string(width_));
    std::vector<std::string> fields;
    fields.reserve(width_ + 2);
    for (const auto& c : cells) {
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, double>)
                    fields.push_back(format_double(v));
                else if constexpr (std::is_same_v<T, std::string>)
                    fields.push_back(v);
                else
                    fields.push_back(std::to_string(v));
            },
            c);
    }
    fields.push_back(hash_);
    fields.emplace_back(artifact_version);
    emit(fields);
}

void CsvWriter::emit(const std::vector<std::string>& fields)
{
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            os_ << ',';
        os_ << csv_escape(fields[i]);
    }
    os_ << "\r\n";
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<CsvCell>>& rows, std::uint64_t config_hash)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    CsvWriter w(os, header, config_hash);
    for (const auto& r : rows)
        w.row(r);
    if (!os)
        throw std::runtime_error("failed writing " + path.string());
}

nlohmann::ordered_json report_header(std::string_view kind, std::uint64_t config_hash)
{
    nlohmann::ordered_json j;
    j["artifact_version"] = artifact_version;
    j["config_hash"] = format_hash(config_hash);
    j["kind"] = kind;
    return j;
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    os << doc.dump(2) << '\n';
    if (!os)
        throw std::runtime_error("failed writing " + path.string());
}

} // namespace nlsball
