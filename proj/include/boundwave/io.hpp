#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace boundwave::io {

/// Shortest round-trip decimal form, locale independent.
std::string format(double v);

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
    void row(const std::vector<double>& values);

private:
    std::ofstream out_;
    std::size_t width_;
};

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace boundwave::io
