#include "cslr/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "cslr/error.hpp"

namespace cslr {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
    std::size_t b = 0;
    std::size_t e = text.size();
    while (b < e && (text[b] == ' ' || text[b] == '\t')) ++b;
    while (e > b && (text[e - 1] == ' ' || text[e - 1] == '\t' || text[e - 1] == '\r')) --e;
    double v = 0.0;
    const char* first = text.data() + b;
    const char* last = text.data() + e;
    if (b < e && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (b == e || res.ec != std::errc() || res.ptr != last)
        throw Error(ErrorCode::Io, "not a number: '" + text + "'");
    return v;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string trim(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    std::size_t b = 0;
    while (b < s.size() && s[b] == ' ') ++b;
    return s.substr(b);
}

// Next line that is neither empty nor a '#' comment.
bool next_data_line(std::istream& is, std::string& line) {
    while (std::getline(is, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        return true;
    }
    return false;
}

int parse_delta(const std::string& text) {
    const double v = parse_double(text);
    if (v != 0.0 && v != 1.0) throw Error(ErrorCode::Io, "delta must be 0 or 1, got '" + text + "'");
    return v == 1.0 ? 1 : 0;
}

}  // namespace

void write_sample_csv(std::ostream& os, const Sample& sample) {
    const std::size_t k = sample.dim();
    os << "# schema: " << kSchemaVersion << '\n' << 't';
    for (std::size_t j = 0; j < k; ++j) os << ",x" << (j + 1);
    os << ",delta\n";
    for (std::size_t i = 0; i < sample.size(); ++i) {
        os << format_double(sample.t(i));
        for (std::size_t j = 0; j < k; ++j) os << ',' << format_double(sample.x(i, j));
        os << ',' << sample.delta(i) << '\n';
    }
}

Sample read_sample_csv(std::istream& is) {
    std::string line;
    if (!next_data_line(is, line)) throw Error(ErrorCode::Io, "empty sample file");
    const auto header = split_fields(line);
    if (header.size() < 3 || trim(header.front()) != "t" || trim(header.back()) != "delta")
        throw Error(ErrorCode::Io, "sample header must be t,x1..xk,delta");
    const std::size_t k = header.size() - 2;
    for (std::size_t j = 0; j < k; ++j)
        if (trim(header[j + 1]) != "x" + std::to_string(j + 1))
            throw Error(ErrorCode::Io, "unexpected column '" + header[j + 1] + "'");

    std::vector<double> t;
    std::vector<double> x;
    std::vector<int> delta;
    std::size_t row = 0;
    while (next_data_line(is, line)) {
        ++row;
        const auto cells = split_fields(line);
        if (cells.size() != k + 2)
            throw Error(ErrorCode::Io, "row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                                           " fields, expected " + std::to_string(k + 2));
        t.push_back(parse_double(cells[0]));
        for (std::size_t j = 0; j < k; ++j) x.push_back(parse_double(cells[j + 1]));
        delta.push_back(parse_delta(cells[k + 1]));
    }
    if (t.empty()) throw Error(ErrorCode::Io, "sample file has no rows");
    return Sample(std::move(t), std::move(x), std::move(delta), k);
}

void write_sample_csv_file(const std::string& path, const Sample& sample) {
    std::ofstream os(path);
    if (!os) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
    write_sample_csv(os, sample);
    if (!os) throw Error(ErrorCode::Io, "write to '" + path + "' failed");
}

Sample read_sample_csv_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
    return read_sample_csv(is);
}

std::string sample_to_json(const Sample& sample) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < sample.size(); ++i) {
        nlohmann::json row;
        row["t"] = sample.t(i);
        for (std::size_t j = 0; j < sample.dim(); ++j) row["x" + std::to_string(j + 1)] = sample.x(i, j);
        row["delta"] = sample.delta(i);
        rows.push_back(std::move(row));
    }
    return nlohmann::json{{"schema", kSchemaVersion}, {"rows", std::move(rows)}}.dump();
}

Sample sample_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Io, std::string("bad sample JSON: ") + e.what());
    }
    if (!doc.contains("rows") || !doc["rows"].is_array() || doc["rows"].empty())
        throw Error(ErrorCode::Io, "sample JSON needs a non-empty rows array");
    const auto& rows = doc["rows"];
    std::size_t k = 0;
    while (rows[0].contains("x" + std::to_string(k + 1))) ++k;

    std::vector<double> t;
    std::vector<double> x;
    std::vector<int> delta;
    try {
        for (const auto& row : rows) {
            if (row.size() != k + 2) throw Error(ErrorCode::Io, "sample JSON rows differ in shape");
            t.push_back(row.at("t").get<double>());
            for (std::size_t j = 0; j < k; ++j) x.push_back(row.at("x" + std::to_string(j + 1)).get<double>());
            const double d = row.at("delta").get<double>();
            if (d != 0.0 && d != 1.0) throw Error(ErrorCode::Io, "delta must be 0 or 1");
            delta.push_back(d == 1.0 ? 1 : 0);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Io, std::string("bad sample JSON: ") + e.what());
    }
    return Sample(std::move(t), std::move(x), std::move(delta), k);
}

void write_step_csv(std::ostream& os, const StepDistribution& F) {
    os << "# schema: " << kSchemaVersion << "\nknot,value\n";
    for (std::size_t i = 0; i < F.knots().size(); ++i)
        os << format_double(F.knots()[i]) << ',' << format_double(F.values()[i]) << '\n';
}

StepDistribution read_step_csv(std::istream& is) {
    std::string line;
    if (!next_data_line(is, line) || line != "knot,value") throw Error(ErrorCode::Io, "step header must be knot,value");
    std::vector<double> knots;
    std::vector<double> values;
    while (next_data_line(is, line)) {
        const auto cells = split_fields(line);
        if (cells.size() != 2) throw Error(ErrorCode::Io, "step rows need two fields");
        knots.push_back(parse_double(cells[0]));
        values.push_back(parse_double(cells[1]));
    }
    return StepDistribution(std::move(knots), std::move(values));
}

}  // namespace cslr
