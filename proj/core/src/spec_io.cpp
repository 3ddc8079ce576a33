#include "cmcglue/spec_io.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <sstream>

namespace cmcglue {

using json = nlohmann::ordered_json;

namespace {

// 1-based line and column of a byte offset.
std::pair<int, int> locate(const std::string& text, size_t offset)
{
    int line = 1, column = 1;
    for (size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

json parse_json(const std::string& text)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const size_t at = e.byte > 0 ? e.byte - 1 : 0;
        const auto [line, column] = locate(text, at);
        std::string detail = e.what();
        const auto cut = detail.find(": ", detail.find("column"));
        if (cut != std::string::npos)
            detail = detail.substr(cut + 2);
        throw SpecParseError("parse error at line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                                 detail,
                             line, column);
    }
}

[[noreturn]] void fail(const std::string& what) { throw SpecParseError(what, 0, 0); }

const json& field(const json& obj, const char* key, const std::string& where)
{
    if (!obj.is_object() || !obj.contains(key))
        fail(where + ": missing field '" + key + "'");
    return obj.at(key);
}

double number(const json& v, const std::string& where)
{
    if (!v.is_number())
        fail(where + ": expected a number");
    return v.get<double>();
}

std::string text_of(const json& v, const std::string& where)
{
    if (!v.is_string())
        fail(where + ": expected a string");
    return v.get<std::string>();
}

Vec3 vec3(const json& v, const std::string& where)
{
    if (!v.is_array() || v.size() != 3)
        fail(where + ": expected an array of three numbers");
    return {number(v[0], where), number(v[1], where), number(v[2], where)};
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

} // namespace

SpecParseError::SpecParseError(const std::string& what, int line, int column)
    : ValidationError(what), line_(line), column_(column)
{
}

GraphSpec parse_graph_spec(const std::string& text)
{
    const json doc = parse_json(text);
    if (!doc.is_object())
        fail("spec: top level must be an object");
    std::vector<Vertex> vertices;
    std::vector<Edge> edges;
    std::vector<Ray> rays;
    std::map<std::string, int> seen;
    auto claim = [&](const std::string& id, const std::string& where) {
        if (id.empty())
            fail(where + ": empty id");
        if (seen.count(id))
            fail(where + ": duplicate id '" + id + "'");
        seen[id] = 1;
    };

    const json& vs = field(doc, "vertices", "spec");
    if (!vs.is_array())
        fail("vertices: expected an array");
    for (size_t i = 0; i < vs.size(); ++i) {
        const std::string where = "vertices[" + std::to_string(i) + "]";
        Vertex v;
        v.id = text_of(field(vs[i], "id", where), where + ".id");
        v.position = vec3(field(vs[i], "position", where), where + ".position");
        claim(v.id, where);
        vertices.push_back(v);
    }
    std::map<std::string, int> vids;
    for (const auto& v : vertices)
        vids[v.id] = 1;

    if (doc.contains("edges")) {
        const json& es = doc.at("edges");
        if (!es.is_array())
            fail("edges: expected an array");
        for (size_t i = 0; i < es.size(); ++i) {
            const std::string where = "edges[" + std::to_string(i) + "]";
            Edge e;
            e.id = text_of(field(es[i], "id", where), where + ".id");
            e.p_plus = text_of(field(es[i], "p_plus", where), where + ".p_plus");
            e.p_minus = text_of(field(es[i], "p_minus", where), where + ".p_minus");
            const double l = number(field(es[i], "l", where), where + ".l");
            if (l < 1 || l != std::floor(l))
                fail(where + ".l: expected a positive integer");
            e.l = static_cast<int>(l);
            e.tau_hat = es[i].contains("tau_hat") ? number(es[i].at("tau_hat"), where + ".tau_hat") : 1.0;
            if (!vids.count(e.p_plus) || !vids.count(e.p_minus))
                fail(where + ": unknown vertex id");
            if (e.p_plus == e.p_minus)
                fail(where + ": endpoints coincide");
            if (!(e.tau_hat > 0.0))
                fail(where + ".tau_hat: must be positive");
            claim(e.id, where);
            edges.push_back(e);
        }
    }
    if (doc.contains("rays")) {
        const json& rs = doc.at("rays");
        if (!rs.is_array())
            fail("rays: expected an array");
        for (size_t i = 0; i < rs.size(); ++i) {
            const std::string where = "rays[" + std::to_string(i) + "]";
            Ray r;
            r.id = text_of(field(rs[i], "id", where), where + ".id");
            r.vertex = text_of(field(rs[i], "vertex", where), where + ".vertex");
            const Vec3 dir = vec3(field(rs[i], "direction", where), where + ".direction");
            if (!(dir.norm() > 0.0))
                fail(where + ".direction: must be nonzero");
            r.direction = dir.normalized();
            r.tau_hat = rs[i].contains("tau_hat") ? number(rs[i].at("tau_hat"), where + ".tau_hat") : 1.0;
            if (!vids.count(r.vertex))
                fail(where + ": unknown vertex id");
            if (!(r.tau_hat > 0.0))
                fail(where + ".tau_hat: must be positive");
            claim(r.id, where);
            rays.push_back(r);
        }
    }

    GraphSpec out;
    if (doc.contains("params")) {
        const json& p = doc.at("params");
        if (!p.is_object())
            fail("params: expected an object");
        if (p.contains("tau"))
            out.params.tau = number(p.at("tau"), "params.tau");
        if (p.contains("delta"))
            out.params.delta = number(p.at("delta"), "params.delta");
        if (p.contains("b_override") && !p.at("b_override").is_null())
            out.params.b_override = number(p.at("b_override"), "params.b_override");
        if (p.contains("eps_pre_embed"))
            out.params.eps_pre_embed = number(p.at("eps_pre_embed"), "params.eps_pre_embed");
    }
    const std::string family = doc.contains("family") ? text_of(doc.at("family"), "family") : std::string();
    out.graph = Graph(std::move(vertices), std::move(edges), std::move(rays), family);
    return out;
}

GraphSpec load_graph_spec(const std::string& path) { return parse_graph_spec(read_text_file(path)); }

std::string write_graph_spec(const Graph& g, const SpecParams& params)
{
    json doc = json::object();
    if (!g.family().empty())
        doc["family"] = g.family();
    json vs = json::array();
    for (const auto& v : g.vertices())
        vs.push_back({{"id", v.id}, {"position", vec_json(v.position)}});
    json es = json::array();
    for (const auto& e : g.edges())
        es.push_back({{"id", e.id}, {"p_plus", e.p_plus}, {"p_minus", e.p_minus}, {"l", e.l}, {"tau_hat", e.tau_hat}});
    json rs = json::array();
    for (const auto& r : g.rays())
        rs.push_back({{"id", r.id}, {"vertex", r.vertex}, {"direction", vec_json(r.direction)}, {"tau_hat", r.tau_hat}});
    json p = {{"tau", params.tau}, {"delta", params.delta}, {"eps_pre_embed", params.eps_pre_embed}};
    if (params.b_override)
        p["b_override"] = *params.b_override;
    doc["vertices"] = vs;
    doc["edges"] = es;
    doc["rays"] = rs;
    doc["params"] = p;
    return doc.dump(2) + "\n";
}

std::map<std::string, Vec3> parse_d_file(const std::string& text)
{
    const json doc = parse_json(text);
    if (!doc.is_object())
        fail("d-file: top level must be an object keyed by vertex id");
    std::map<std::string, Vec3> d;
    for (const auto& [key, value] : doc.items())
        d[key] = vec3(value, "d-file." + key);
    return d;
}

ZetaAssignment parse_zeta_file(const std::string& text)
{
    const json doc = parse_json(text);
    if (!doc.is_array())
        fail("zeta-file: top level must be an array");
    ZetaAssignment z;
    for (size_t i = 0; i < doc.size(); ++i) {
        const std::string where = "zeta-file[" + std::to_string(i) + "]";
        z.set(text_of(field(doc[i], "vertex", where), where + ".vertex"),
              text_of(field(doc[i], "element", where), where + ".element"),
              vec3(field(doc[i], "value", where), where + ".value"));
    }
    return z;
}

std::string read_text_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out)
        throw IoError("write to '" + path + "' failed");
}

} // namespace cmcglue
