#include "cafe/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cafe/error.hpp"

namespace cafe::io {

namespace {

double parse_real(const std::string& tok, const std::string& where) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != tok.size()) throw InputError(where + ": not a number '" + tok + "'");
    return v;
}

}  // namespace

std::vector<LabeledEdge> parse_edge_list(std::istream& in, const std::string& source) {
    std::vector<LabeledEdge> edges;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream fields(line);
        std::vector<std::string> tok;
        for (std::string t; fields >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        const std::string where = source + ":" + std::to_string(lineno);
        if (tok.size() < 2 || tok.size() > 3) throw InputError(where + ": expected 'u w [weight]'");
        LabeledEdge e{tok[0], tok[1], 1.0};
        if (tok.size() == 3) e.weight = parse_real(tok[2], where);
        if (!std::isfinite(e.weight) || e.weight < 0.0) throw InputError(where + ": invalid weight");
        edges.push_back(std::move(e));
    }
    return edges;
}

std::vector<LabeledEdge> read_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open graph file: " + path);
    return parse_edge_list(in, path);
}

std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_embedding(std::ostream& out, const NodeIndex& nodes, const Matrix& h) {
    if (static_cast<std::size_t>(h.rows()) != nodes.size()) throw InputError("embedding rows do not match node count");
    for (Eigen::Index u = 0; u < h.rows(); ++u) {
        out << nodes.label(static_cast<std::size_t>(u));
        for (Eigen::Index c = 0; c < h.cols(); ++c) out << '\t' << format_real(h(u, c));
        out << '\n';
    }
}

LabeledMatrix read_embedding(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open embedding file: " + path);
    LabeledMatrix out;
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const std::string where = path + ":" + std::to_string(lineno);
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const auto tab = line.find('\t', start);
            fields.push_back(line.substr(start, tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (fields.size() < 2) throw InputError(where + ": expected label and at least one value");
        std::vector<double> row;
        for (std::size_t i = 1; i < fields.size(); ++i) row.push_back(parse_real(fields[i], where));
        if (!rows.empty() && row.size() != rows.front().size()) throw InputError(where + ": inconsistent column count");
        out.labels.push_back(fields[0]);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InputError("empty embedding file: " + path);
    out.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return out;
}

}  // namespace cafe::io
