#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace fracreg::cli {

// Writes rows with a fixed header; every row gets the config hash as its last column.
class CsvWriter {
public:
    CsvWriter(const std::string& path, std::vector<std::string> header, std::string config_hash);
    void row(const std::vector<std::string>& cells);
    void close();

private:
    std::string path_;
    std::size_t width_;
    std::string hash_;
    std::ofstream out_;
};

// Shortest text that reads back to the same double.
std::string num(double v);
std::string num(long long v);
std::string quote(const std::string& cell);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    int column(const std::string& name) const;
};
CsvTable read_csv(const std::string& path);

} // namespace fracreg::cli
