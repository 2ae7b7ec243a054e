#include "boundwave/io.hpp"

#include <charconv>

#include "boundwave/errors.hpp"

namespace boundwave::io {

std::string format(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path), width_(header.size())
{
    if (!out_)
        throw ConfigError("cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i)
        out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values)
{
    if (values.size() != width_)
        throw DomainError("io", "CSV row width does not match the header");
    for (std::size_t i = 0; i < values.size(); ++i)
        out_ << (i ? "," : "") << format(values[i]);
    out_ << '\n';
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j)
{
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

}  // namespace boundwave::io
