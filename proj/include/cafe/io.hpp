#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cafe/matrix.hpp"
#include "cafe/sampled_graph.hpp"

namespace cafe::io {

/// `u w [weight]` per line, whitespace separated, '#' comments, weight 1 by default.
std::vector<LabeledEdge> parse_edge_list(std::istream& in, const std::string& source = "<stream>");
std::vector<LabeledEdge> read_edge_list(const std::string& path);

/// Full-precision text for a double (17 significant digits).
std::string format_real(double v);

/// `label<TAB>v1<TAB>...` per row.
void write_embedding(std::ostream& out, const NodeIndex& nodes, const Matrix& h);

struct LabeledMatrix {
    std::vector<std::string> labels;
    Matrix values;
};

/// Reads the embedding format back; rows must share a column count.
LabeledMatrix read_embedding(const std::string& path);

}  // namespace cafe::io
