#include "fracreg/cli/csv.hpp"
#include "fracreg/cli/config.hpp"

#include <charconv>
#include <sstream>

namespace fracreg::cli {

std::string num(double v)
{
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string num(long long v)
{
    return std::to_string(v);
}

std::string quote(const std::string& cell)
{
    if (cell.find_first_of(",\"\n") == std::string::npos)
        return cell;
    std::string q = "\"";
    for (char c : cell) {
        if (c == '"')
            q += '"';
        q += c;
    }
    return q + "\"";
}

CsvWriter::CsvWriter(const std::string& path, std::vector<std::string> header, std::string config_hash)
    : path_(path), width_(header.size()), hash_(std::move(config_hash)), out_(path)
{
    if (!out_)
        throw IoError("cannot write '" + path + "'");
    header.push_back("config_hash");
    for (std::size_t i = 0; i < header.size(); ++i)
        out_ << (i ? "," : "") << header[i];
    out_ << "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells)
{
    if (cells.size() != width_)
        throw std::logic_error("csv row width mismatch for " + path_);
    for (const auto& c : cells)
        out_ << quote(c) << ",";
    out_ << hash_ << "\n";
    if (!out_)
        throw IoError("write failed for '" + path_ + "'");
}

void CsvWriter::close()
{
    out_.close();
    if (out_.fail())
        throw IoError("close failed for '" + path_ + "'");
}

int CsvTable::column(const std::string& name) const
{
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name)
            return static_cast<int>(i);
    return -1;
}

namespace {

std::vector<std::string> parse_line(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    cells.push_back(cur);
    return cells;
}

} // namespace

CsvTable read_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read '" + path + "'");
    CsvTable t;
    std::string line;
    if (!std::getline(in, line))
        throw IoError("empty csv '" + path + "'");
    t.header = parse_line(line);
    while (std::getline(in, line))
        if (!line.empty())
            t.rows.push_back(parse_line(line));
    return t;
}

} // namespace fracreg::cli
