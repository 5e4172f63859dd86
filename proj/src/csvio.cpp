#include "fairband/csvio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fairband::csv {

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.9g", value);
    return buffer;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(current);
            current.clear();
        } else if (c != '\r') {
            current += c;
        }
    }
    fields.push_back(current);
    return fields;
}

namespace {

double parse_double(const std::string& field, const std::string& context) {
    try {
        std::size_t used = 0;
        double v = std::stod(field, &used);
        while (used < field.size() && std::isspace(static_cast<unsigned char>(field[used]))) ++used;
        if (used != field.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument(context + ": cannot parse number '" + field + "'");
    }
}

} // namespace

RewardMatrix read_matrix_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("matrix csv: empty input");
    std::vector<std::string> header = split_line(line);
    if (header.size() < 2 || header[0] != "agent")
        throw std::invalid_argument("matrix csv: expected header 'agent,arm_1..arm_K'");
    int k = static_cast<int>(header.size()) - 1;

    std::vector<std::vector<double>> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::vector<std::string> fields = split_line(line);
        if (static_cast<int>(fields.size()) != k + 1)
            throw std::invalid_argument("matrix csv line " + std::to_string(line_no) + ": expected " +
                                        std::to_string(k + 1) + " fields, got " +
                                        std::to_string(fields.size()));
        std::vector<double> row(k);
        for (int a = 0; a < k; ++a)
            row[a] = parse_double(fields[a + 1], "matrix csv line " + std::to_string(line_no));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::invalid_argument("matrix csv: no agent rows");
    return RewardMatrix::from_rows(rows);
}

RewardMatrix read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open matrix file: " + path);
    return read_matrix_csv(in);
}

void write_matrix_csv(std::ostream& out, const RewardMatrix& matrix) {
    out << "agent";
    for (int a = 0; a < matrix.n_arms(); ++a) out << ",arm_" << (a + 1);
    out << '\n';
    for (int i = 0; i < matrix.n_agents(); ++i) {
        out << (i + 1);
        for (int a = 0; a < matrix.n_arms(); ++a) out << ',' << format_number(matrix.at(i, a));
        out << '\n';
    }
}

Policy read_policy_csv(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        std::vector<std::string> fields = split_line(line);
        std::vector<double> probs;
        probs.reserve(fields.size());
        for (const auto& f : fields) probs.push_back(parse_double(f, "policy csv"));
        return Policy(std::move(probs));
    }
    throw std::invalid_argument("policy csv: empty input");
}

Policy read_policy_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open policy file: " + path);
    return read_policy_csv(in);
}

void write_policy_csv(std::ostream& out, const Policy& policy) {
    for (int a = 0; a < policy.n_arms(); ++a) {
        if (a) out << ',';
        out << format_number(policy.prob(a));
    }
    out << '\n';
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write file: " + path);
    out << contents;
}

} // namespace fairband::csv
