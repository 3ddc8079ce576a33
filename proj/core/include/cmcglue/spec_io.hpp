#pragma once

#include "cmcglue/assembly.hpp"
#include "cmcglue/graph.hpp"

#include <map>
#include <optional>
#include <string>

namespace cmcglue {

struct SpecParams
{
    double tau = 1e-3;
    double delta = kDefaultDelta;
    std::optional<double> b_override;
    double eps_pre_embed = 0.1;
};

struct GraphSpec
{
    Graph graph;
    SpecParams params;
};

// Malformed or inconsistent spec text; line and column are 1-based (0 when the problem is not positional).
class SpecParseError : public ValidationError
{
public:
    SpecParseError(const std::string& what, int line, int column);
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

// JSON document with vertices [{id, position}], edges [{id, p_plus, p_minus, l, tau_hat}],
// rays [{id, vertex, direction, tau_hat}] and params {tau, delta, b_override?, eps_pre_embed}.
GraphSpec parse_graph_spec(const std::string& text);
GraphSpec load_graph_spec(const std::string& path);
std::string write_graph_spec(const Graph& g, const SpecParams& params = {});

// d-file: {"<vertex id>": [x, y, z], ...}.
std::map<std::string, Vec3> parse_d_file(const std::string& text);
// zeta-file: [{"vertex": id, "element": id, "value": [x, y, z]}, ...].
ZetaAssignment parse_zeta_file(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

} // namespace cmcglue
