#include "otx/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace otx::io {

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::ifstream open_in(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
    return out;
}

} // namespace

std::string format_real(double value)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

double parse_real(const std::string& token)
{
    const std::string t = trim(token);
    if (t.empty()) throw Error(Errc::ParseError, "empty numeric field");
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) throw Error(Errc::ParseError, "not a number: '" + t + "'");
    return v;
}

Vector read_vector(const std::filesystem::path& path)
{
    auto in = open_in(path);
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        values.push_back(parse_real(t));
    }
    return Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Histogram read_histogram(const std::filesystem::path& path)
{
    return make_histogram(read_vector(path));
}

void write_vector(const std::filesystem::path& path, const Vector& values)
{
    auto out = open_out(path);
    for (Eigen::Index i = 0; i < values.size(); ++i) out << format_real(values[i]) << '\n';
}

Matrix read_matrix(const std::filesystem::path& path)
{
    auto in = open_in(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        std::vector<double> row;
        std::stringstream ss(t);
        std::string field;
        while (std::getline(ss, field, ',')) row.push_back(parse_real(field));
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw Error(Errc::ParseError, path.string() + ": ragged matrix rows");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error(Errc::EmptyVector, path.string() + ": no matrix rows");
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return m;
}

void write_matrix(const std::filesystem::path& path, const Matrix& values)
{
    auto out = open_out(path);
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        for (Eigen::Index j = 0; j < values.cols(); ++j) {
            if (j) out << ',';
            out << format_real(values(i, j));
        }
        out << '\n';
    }
}

} // namespace otx::io
