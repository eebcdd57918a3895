#include "linrecover/bench.hpp"
#include "linrecover/errors.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace linrecover {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return fields;
}

bool parse_number(std::string_view field, double& out) {
    if (field.empty()) {
        return false;
    }
    if (field.front() == '+') {
        field.remove_prefix(1);
    }
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
    return ec == std::errc() && ptr == field.data() + field.size() && std::isfinite(out);
}

} // namespace

Matrix parse_csv(const std::string& text, const std::string& source) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    bool seen_first = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_fields(line);
        std::vector<double> values(fields.size());
        bool numeric = true;
        std::size_t bad_col = 0;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (!parse_number(fields[c], values[c])) {
                numeric = false;
                bad_col = c + 1;
                break;
            }
        }
        if (!seen_first) {
            seen_first = true;
            width = fields.size();
            if (!numeric) {
                continue; // header
            }
        }
        if (fields.size() != width) {
            throw IoError(fmt::format("{}: line {}: expected {} columns, found {} (ragged row)",
                                      source, line_no, width, fields.size()));
        }
        if (!numeric) {
            throw IoError(fmt::format("{}: line {}, column {}: non-numeric value '{}'", source,
                                      line_no, bad_col, std::string(fields[bad_col - 1])));
        }
        rows.push_back(std::move(values));
    }
    if (rows.empty()) {
        throw IoError(source + ": no numeric rows");
    }
    Matrix x(static_cast<Index>(rows.size()), static_cast<Index>(width));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < width; ++j) {
            x(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
        }
    }
    return x;
}

Matrix load_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), path.string());
}

void write_csv(const std::filesystem::path& path, const Matrix& x) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    std::string line;
    for (Index i = 0; i < x.rows(); ++i) {
        line.clear();
        for (Index j = 0; j < x.cols(); ++j) {
            if (j > 0) {
                line += ',';
            }
            line += fmt::format("{:.17g}", x(i, j));
        }
        line += '\n';
        out << line;
    }
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

} // namespace linrecover
