#pragma once

// Front-end plumbing shared by the command-line tool and the tests: the
// line-oriented graph file format, job assembly (twist data, substitutions,
// deformation variable), the four commands, and the JSON certificate format
// that round-trips everything a verifier needs.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "diffop.hpp"
#include "expr.hpp"
#include "graph.hpp"
#include "pfdriver.hpp"

namespace twistpf {

using json = nlohmann::ordered_json;

struct GraphFile {
    FeynmanGraph graph;
    KinematicTable table;
};

namespace detail {

inline bool is_identifier(const std::string& s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

[[noreturn]] inline void parse_fail(const std::string& file, int line, const std::string& msg) {
    throw std::invalid_argument(file + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace detail

// Format, one directive per line ('#' starts a comment):
//   vertices v1 v2 ...
//   edge <name> <v> <w> mass <expression>
//   leg <momentum> <vertex>
//   dot <p>.<q> = <expression>
inline GraphFile parse_graph_file(std::istream& in, const std::string& filename = "<input>") {
    GraphFile out;
    std::map<std::string, int> vindex;
    int lineno = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string head;
        if (!(ls >> head)) continue;

        if (head == "vertices") {
            std::string name;
            while (ls >> name) {
                if (vindex.count(name)) detail::parse_fail(filename, lineno, "duplicate vertex '" + name + "'");
                vindex[name] = static_cast<int>(out.graph.vertices.size());
                out.graph.vertices.push_back(name);
            }
            if (out.graph.vertices.empty())
                detail::parse_fail(filename, lineno, "'vertices' needs at least one name");
        } else if (head == "edge") {
            std::string name, va, vb, kw;
            if (!(ls >> name >> va >> vb >> kw) || kw != "mass")
                detail::parse_fail(filename, lineno, "expected 'edge <name> <v> <w> mass <expr>'");
            if (!detail::is_identifier(name))
                detail::parse_fail(filename, lineno, "edge name '" + name + "' is not an identifier");
            std::string expr;
            std::getline(ls, expr);
            if (!vindex.count(va)) detail::parse_fail(filename, lineno, "unknown vertex '" + va + "'");
            if (!vindex.count(vb)) detail::parse_fail(filename, lineno, "unknown vertex '" + vb + "'");
            FeynmanGraph::Edge e;
            e.name = name;
            e.a = vindex[va];
            e.b = vindex[vb];
            try {
                e.mass = parse_field(expr);
            } catch (const std::exception& ex) {
                detail::parse_fail(filename, lineno, std::string("bad mass expression: ") + ex.what());
            }
            out.graph.edges.push_back(std::move(e));
        } else if (head == "leg") {
            std::string mom, v;
            if (!(ls >> mom >> v)) detail::parse_fail(filename, lineno, "expected 'leg <momentum> <vertex>'");
            if (!vindex.count(v)) detail::parse_fail(filename, lineno, "unknown vertex '" + v + "'");
            std::string extra;
            if (ls >> extra) detail::parse_fail(filename, lineno, "trailing tokens after leg");
            out.graph.legs.push_back({mom, vindex[v]});
        } else if (head == "dot") {
            std::string pair, eq;
            if (!(ls >> pair >> eq) || eq != "=")
                detail::parse_fail(filename, lineno, "expected 'dot <p>.<q> = <expr>'");
            auto dotpos = pair.find('.');
            if (dotpos == std::string::npos || dotpos == 0 || dotpos + 1 == pair.size())
                detail::parse_fail(filename, lineno, "expected momentum pair '<p>.<q>'");
            std::string pa = pair.substr(0, dotpos), pb = pair.substr(dotpos + 1);
            if (out.table.has(pa, pb))
                detail::parse_fail(filename, lineno, "duplicate kinematic entry " + pa + "." + pb);
            std::string expr;
            std::getline(ls, expr);
            try {
                out.table.set(pa, pb, parse_field(expr));
            } catch (const std::exception& ex) {
                detail::parse_fail(filename, lineno, std::string("bad kinematic expression: ") + ex.what());
            }
        } else {
            detail::parse_fail(filename, lineno, "unknown directive '" + head + "'");
        }
    }
    try {
        out.graph.validate();
    } catch (const std::exception& ex) {
        throw std::invalid_argument(filename + ": " + ex.what());
    }
    for (const auto& la : out.graph.legs)
        for (const auto& lb : out.graph.legs)
            if (!out.table.has(la.momentum, lb.momentum))
                throw std::invalid_argument(filename + ": kinematic table is missing " + la.momentum +
                                            "." + lb.momentum);
    return out;
}

inline GraphFile parse_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open graph file '" + path + "'");
    return parse_graph_file(in, path);
}

enum class Command { polys, op, verify, singular };

struct JobSpec {
    Command command = Command::polys;
    std::string graph_path;
    int delta = 1;
    std::vector<int> nu, mu;  // empty = all ones / all zeros
    std::string t_name = "t";
    std::vector<std::pair<std::string, std::string>> sets;  // name=expr pairs, simultaneous
    int max_order = 0;                                      // 0 = automatic bound
    int threads = 1;
    std::string emit_certificate;   // write the certificate JSON here (operator/singular)
    std::string certificate_path;   // verify input
    bool structured = false;
};

namespace detail {

struct PreparedJob {
    GraphFile gf;
    SymanzikPair sym;        // after substitutions
    TwistSpec twist;
    Symbol t;
    std::map<Symbol, ParamField> bindings;
    std::vector<std::string> edge_names;
};

inline PreparedJob prepare(const JobSpec& job, std::ostream& err) {
    PreparedJob p;
    p.gf = parse_graph_file(job.graph_path);
    const int E = p.gf.graph.num_edges();

    std::vector<int> nu = job.nu.empty() ? std::vector<int>(E, 1) : job.nu;
    std::vector<int> mu = job.mu.empty() ? std::vector<int>(E, 0) : job.mu;
    if (static_cast<int>(nu.size()) != E)
        throw std::invalid_argument("--nu needs exactly " + std::to_string(E) + " entries");
    if (static_cast<int>(mu.size()) != E)
        throw std::invalid_argument("--mu needs exactly " + std::to_string(E) + " entries");

    p.t = sym(job.t_name);
    for (const auto& [name, expr] : job.sets) {
        if (name == "eps" || name == "kap")
            throw std::invalid_argument("--set cannot bind the reserved regulator '" + name + "'");
        if (name == job.t_name)
            throw std::invalid_argument("--set cannot bind the deformation variable '" + name + "'");
        if (!detail::is_identifier(name))
            throw std::invalid_argument("--set target '" + name + "' is not an identifier");
        Symbol s = sym(name);
        if (p.bindings.count(s)) throw std::invalid_argument("--set binds '" + name + "' twice");
        p.bindings.emplace(s, parse_field(expr));
    }

    p.sym = symanzik(p.gf.graph, p.gf.table);
    if (!p.bindings.empty()) {
        p.sym.U = p.sym.U.substitute_params(p.bindings);
        p.sym.V = p.sym.V.substitute_params(p.bindings);
        p.sym.F = p.sym.F.substitute_params(p.bindings);
    }
    p.twist = make_twist(job.delta, nu, mu, p.gf.graph.loops());
    p.edge_names = p.gf.graph.edge_names();

    bool t_occurs = false;
    for (const auto& term : p.sym.F.terms())
        if (term.second.contains(p.t)) t_occurs = true;
    if (!t_occurs && job.command != Command::polys)
        err << "warning: the deformation variable '" << job.t_name
            << "' does not appear in F after substitutions\n";
    return p;
}

inline json graph_to_json(const GraphFile& gf) {
    json jg;
    jg["vertices"] = gf.graph.vertices;
    jg["edges"] = json::array();
    for (const auto& e : gf.graph.edges)
        jg["edges"].push_back(json{{"name", e.name},
                                   {"from", gf.graph.vertices[e.a]},
                                   {"to", gf.graph.vertices[e.b]},
                                   {"mass", e.mass.to_string()}});
    jg["legs"] = json::array();
    for (const auto& l : gf.graph.legs)
        jg["legs"].push_back(json{{"momentum", l.momentum}, {"vertex", gf.graph.vertices[l.vertex]}});
    return jg;
}

inline json kinematics_to_json(const KinematicTable& table) {
    json out = json::array();
    for (const auto& [key, value] : table.entries())
        out.push_back(json{{"pair", json::array({key.first, key.second})}, {"value", value.to_string()}});
    return out;
}

inline json homopoly_to_json(const HomoPoly& p) {
    json terms = json::array();
    for (const auto& t : p.terms()) {
        json e = json::array();
        for (auto x : t.first) e.push_back(static_cast<int>(x));
        terms.push_back(json{{"e", e}, {"c", t.second.to_string()}});
    }
    return json{{"nvars", p.nvars()}, {"degree", p.degree()}, {"terms", terms}};
}

inline HomoPoly homopoly_from_json(const json& j) {
    int nvars = j.at("nvars").get<int>();
    long degree = j.at("degree").get<long>();
    HomoPoly out(nvars, degree);
    for (const auto& t : j.at("terms")) {
        EVec e;
        for (const auto& x : t.at("e")) e.push_back(static_cast<std::uint16_t>(x.get<int>()));
        out += HomoPoly::monomial(nvars, e, parse_field(t.at("c").get<std::string>()));
    }
    return out;
}

inline json certificate_to_json(const ReductionCertificate& cert) {
    json out = json::array();
    for (const auto& step : cert) {
        json js;
        js["a"] = step.a;
        js["C"] = json::array();
        for (const auto& Ci : step.C) js["C"].push_back(homopoly_to_json(Ci));
        js["c"] = homopoly_to_json(step.c);
        out.push_back(std::move(js));
    }
    return out;
}

inline ReductionCertificate certificate_from_json(const json& j) {
    ReductionCertificate cert;
    for (const auto& js : j) {
        ReductionStep step;
        step.a = js.at("a").get<int>();
        for (const auto& c : js.at("C")) step.C.push_back(homopoly_from_json(c));
        step.c = homopoly_from_json(js.at("c"));
        cert.push_back(std::move(step));
    }
    return cert;
}

}  // namespace detail

// Everything a verifier needs to replay the claim, in one document.
inline json certificate_document(const JobSpec& job, const detail::PreparedJob& p,
                                 const OperatorSearch& search) {
    json doc;
    doc["format"] = "twistpf-certificate";
    doc["version"] = 1;
    doc["graph"] = detail::graph_to_json(p.gf);
    doc["kinematics"] = detail::kinematics_to_json(p.gf.table);
    doc["substitutions"] = json::array();
    for (const auto& [name, expr] : job.sets)
        doc["substitutions"].push_back(json{{"symbol", name}, {"value", expr}});
    doc["twist"] = json{{"delta", job.delta},
                        {"nu", p.twist.nu},
                        {"mu", p.twist.mu},
                        {"t", job.t_name}};
    doc["edge_variables"] = p.edge_names;
    doc["symanzik"] = json{{"U", p.sym.U.render(p.edge_names)}, {"F", p.sym.F.render(p.edge_names)}};
    json jop;
    jop["order"] = search.op.order();
    jop["coefficients"] = json::array();
    for (const auto& c : search.op.coeffs) jop["coefficients"].push_back(c.to_string());
    doc["operator"] = std::move(jop);
    doc["certificate"] = detail::certificate_to_json(search.certificate);
    json dims = json::object();
    for (const auto& [a, d] : search.complement_dims) dims[std::to_string(a)] = d;
    doc["search"] = json{{"complement_dims", dims}, {"ranks", search.ranks}};
    return doc;
}

struct LoadedCertificate {
    JobSpec job;  // reconstructed job (graph inline, not a path)
    GraphFile gf;
    SymanzikPair sym;
    TwistSpec twist;
    Symbol t;
    DiffOperator op;
    ReductionCertificate certificate;
};

inline LoadedCertificate load_certificate(const json& doc) {
    if (doc.at("format").get<std::string>() != "twistpf-certificate")
        throw std::invalid_argument("not a certificate document");
    LoadedCertificate out;

    const json& jg = doc.at("graph");
    std::map<std::string, int> vindex;
    for (const auto& v : jg.at("vertices")) {
        vindex[v.get<std::string>()] = static_cast<int>(out.gf.graph.vertices.size());
        out.gf.graph.vertices.push_back(v.get<std::string>());
    }
    for (const auto& e : jg.at("edges")) {
        FeynmanGraph::Edge edge;
        edge.name = e.at("name").get<std::string>();
        edge.a = vindex.at(e.at("from").get<std::string>());
        edge.b = vindex.at(e.at("to").get<std::string>());
        edge.mass = parse_field(e.at("mass").get<std::string>());
        out.gf.graph.edges.push_back(std::move(edge));
    }
    for (const auto& l : jg.at("legs"))
        out.gf.graph.legs.push_back(
            {l.at("momentum").get<std::string>(), vindex.at(l.at("vertex").get<std::string>())});
    for (const auto& kv : doc.at("kinematics"))
        out.gf.table.set(kv.at("pair")[0].get<std::string>(), kv.at("pair")[1].get<std::string>(),
                         parse_field(kv.at("value").get<std::string>()));

    const json& jt = doc.at("twist");
    out.job.delta = jt.at("delta").get<int>();
    out.job.nu = jt.at("nu").get<std::vector<int>>();
    out.job.mu = jt.at("mu").get<std::vector<int>>();
    out.job.t_name = jt.at("t").get<std::string>();
    out.t = sym(out.job.t_name);

    std::map<Symbol, ParamField> bindings;
    for (const auto& s : doc.at("substitutions")) {
        out.job.sets.emplace_back(s.at("symbol").get<std::string>(), s.at("value").get<std::string>());
        bindings.emplace(sym(s.at("symbol").get<std::string>()),
                         parse_field(s.at("value").get<std::string>()));
    }

    out.sym = symanzik(out.gf.graph, out.gf.table);
    if (!bindings.empty()) {
        out.sym.U = out.sym.U.substitute_params(bindings);
        out.sym.V = out.sym.V.substitute_params(bindings);
        out.sym.F = out.sym.F.substitute_params(bindings);
    }
    out.twist = make_twist(out.job.delta, out.job.nu, out.job.mu, out.gf.graph.loops());

    const json& jop = doc.at("operator");
    out.op.t = out.t;
    for (const auto& c : jop.at("coefficients")) out.op.coeffs.push_back(parse_poly(c.get<std::string>()));
    if (out.op.order() != jop.at("order").get<int>())
        throw std::invalid_argument("operator order does not match its coefficient list");
    out.certificate = detail::certificate_from_json(doc.at("certificate"));
    return out;
}

// --- command dispatch -------------------------------------------------------

inline int run(const JobSpec& job, std::ostream& out, std::ostream& err) {
    try {
        if (job.command == Command::verify) {
            std::ifstream in(job.certificate_path);
            if (!in) throw std::invalid_argument("cannot open certificate '" + job.certificate_path + "'");
            json doc = json::parse(in);
            LoadedCertificate lc = load_certificate(doc);
            ReductionContext ctx = make_context(lc.sym.U, lc.sym.F, lc.twist);
            VerifyReport rep = verify_operator(ctx, lc.t, lc.op, lc.certificate);
            if (job.structured) {
                json jr;
                jr["ok"] = rep.ok;
                jr["exactness"] = rep.exactness_ok;
                jr["structure"] = rep.structure_ok;
                jr["scalars"] = rep.scalars_ok;
                jr["failed_step"] = rep.failed_step;
                jr["message"] = rep.message;
                out << jr.dump(2) << "\n";
            } else {
                out << (rep.ok ? "certificate: OK" : "certificate: FAILED") << "\n";
                if (!rep.message.empty()) out << rep.message << "\n";
            }
            return rep.ok ? 0 : 1;
        }

        detail::PreparedJob p = detail::prepare(job, err);

        if (job.command == Command::polys) {
            auto trees = spanning_trees(p.gf.graph);
            auto forests = spanning_2forests(p.gf.graph);
            if (job.structured) {
                json j;
                j["graph"] = detail::graph_to_json(p.gf);
                j["loops"] = p.gf.graph.loops();
                j["spanning_trees"] = trees.size();
                j["spanning_2forests"] = forests.size();
                j["edge_variables"] = p.edge_names;
                j["U"] = p.sym.U.render(p.edge_names);
                j["V"] = p.sym.V.render(p.edge_names);
                j["F"] = p.sym.F.render(p.edge_names);
                out << j.dump(2) << "\n";
            } else {
                out << "graph: " << p.gf.graph.num_vertices() << " vertices, " << p.gf.graph.num_edges()
                    << " edges, " << p.gf.graph.loops() << " loop(s)\n";
                out << "spanning trees: " << trees.size() << "\n";
                out << "spanning 2-forests: " << forests.size() << "\n";
                out << "U = " << p.sym.U.render(p.edge_names) << "\n";
                out << "V = " << p.sym.V.render(p.edge_names) << "\n";
                out << "F = " << p.sym.F.render(p.edge_names) << "\n";
            }
            return 0;
        }

        // operator / singular
        ReductionContext ctx = make_context(p.sym.U, p.sym.F, p.twist);
        OperatorSearchOptions opts;
        opts.max_order = job.max_order;
        opts.threads = job.threads;
        OperatorSearch search = minimal_operator(ctx, p.t, opts);
        if (!search.found) {
            err << "error: no operator up to order " << job.max_order
                << " (order bound exceeded); residue dimensions:";
            for (const auto& [a, d] : search.complement_dims) err << " level" << a << "=" << d;
            err << "\n";
            return 2;
        }
        VerifyReport rep = verify_operator(ctx, p.t, search.op, search.certificate);
        if (!rep.ok) {
            err << "internal error: certificate failed verification: " << rep.message << "\n";
            return 1;
        }
        if (!job.emit_certificate.empty()) {
            std::ofstream cf(job.emit_certificate);
            if (!cf) throw std::invalid_argument("cannot write certificate '" + job.emit_certificate + "'");
            cf << certificate_document(job, p, search).dump(2) << "\n";
        }

        if (job.command == Command::op) {
            if (job.structured) {
                json j;
                j["order"] = search.op.order();
                j["t"] = job.t_name;
                j["operator"] = render(search.op);
                j["coefficients"] = json::array();
                for (const auto& c : search.op.coeffs) j["coefficients"].push_back(c.to_string());
                j["certificate_steps"] = search.certificate.size();
                j["verified"] = true;
                json dims = json::object();
                for (const auto& [a, d] : search.complement_dims) dims[std::to_string(a)] = d;
                j["complement_dims"] = dims;
                out << j.dump(2) << "\n";
            } else {
                out << "order: " << search.op.order() << "\n";
                out << "operator: " << render(search.op) << "\n";
                out << "certificate: verified (" << search.certificate.size() << " steps)\n";
            }
            return 0;
        }

        // singular
        SingularReport sr = singular_locus(search.op);
        if (job.structured) {
            json j;
            j["order"] = search.op.order();
            j["leading_coefficient"] = search.op.leading().to_string();
            j["factors"] = json::array();
            for (const auto& f : sr.factors)
                j["factors"].push_back(json{{"factor", f.factor.to_string()},
                                            {"multiplicity", f.multiplicity},
                                            {"eps_dependent", f.eps_dependent}});
            j["unit_poly"] = sr.unit_poly.to_string();
            j["unit_scalar"] = rat_to_string(sr.unit_scalar);
            out << j.dump(2) << "\n";
        } else {
            out << "operator order: " << search.op.order() << "\n";
            out << "leading coefficient: " << search.op.leading().to_string() << "\n";
            out << "singular locus (square-free factors):\n";
            for (const auto& f : sr.factors)
                out << "  (" << f.factor.to_string() << ")^" << f.multiplicity
                    << (f.eps_dependent ? "  [depends on regulators]" : "  [regulator-independent]")
                    << "\n";
            out << "unit: " << rat_to_string(sr.unit_scalar)
                << (sr.unit_poly.is_one() ? "" : " * (" + sr.unit_poly.to_string() + ")") << "\n";
        }
        return 0;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << "\n";
        return 1;
    }
}

}  // namespace twistpf
