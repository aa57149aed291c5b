#pragma once

// JSON persistence for compiled trees and evidence cases, a CSV export of
// the per-finding error table, and storage accounting.
//
// Tree file ("cpnet-tree-v1"): nodes, cliques, and edges with their belief
// tables, plus the approximation report when one has been applied.  A table
// is stored as {"scope", "shape", "repr", "values"}; dense values are the
// row-major array, sparse values alternate linear index and value.  Doubles
// round-trip exactly (shortest-representation formatting on both sides).

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cpnet/engine.hpp"
#include "cpnet/errors.hpp"
#include "cpnet/junction_tree.hpp"
#include "cpnet/num_text.hpp"
#include "cpnet/table.hpp"

namespace cpnet {

namespace detail {

using ordered_json = nlohmann::ordered_json;

inline ordered_json table_to_json(const BeliefTable& t) {
    ordered_json j;
    j["scope"] = t.scope();
    j["shape"] = t.shape();
    j["repr"] = t.is_sparse() ? "sparse" : "dense";
    ordered_json values = ordered_json::array();
    if (t.is_sparse()) {
        for (const auto& [idx, v] : t.sparse_entries()) {
            values.push_back(idx);
            values.push_back(v);
        }
    } else {
        for (double v : t.dense_values()) values.push_back(v);
    }
    j["values"] = std::move(values);
    return j;
}

inline BeliefTable table_from_json(const ordered_json& j) {
    if (!j.is_object() || !j.contains("scope") || !j.contains("shape") ||
        !j.contains("repr") || !j.contains("values"))
        throw ParseError("tree: table requires scope, shape, repr, values");
    std::vector<int> scope = j["scope"].get<std::vector<int>>();
    std::vector<std::int64_t> shape = j["shape"].get<std::vector<std::int64_t>>();
    const std::string repr = j["repr"].get<std::string>();
    const auto& values = j["values"];
    if (!values.is_array()) throw ParseError("tree: table values must be an array");
    if (repr == "dense")
        return BeliefTable::dense(std::move(scope), std::move(shape),
                                  values.get<std::vector<double>>());
    if (repr != "sparse") throw ParseError("tree: table repr must be dense or sparse");
    if (values.size() % 2 != 0)
        throw ParseError("tree: sparse values must alternate index and value");
    std::vector<BeliefTable::Entry> entries;
    entries.reserve(values.size() / 2);
    for (std::size_t i = 0; i < values.size(); i += 2)
        entries.emplace_back(values[i].get<std::int64_t>(), values[i + 1].get<double>());
    return BeliefTable::sparse(std::move(scope), std::move(shape), std::move(entries));
}

} // namespace detail

inline std::string serialize_tree(const JunctionTree& jt) {
    using detail::ordered_json;
    ordered_json doc;
    doc["format"] = "cpnet-tree-v1";
    doc["network"] = jt.network_name;
    doc["heuristic"] = heuristic_name(jt.heuristic);
    doc["status"] = jt.status == TreeStatus::consistent ? "consistent" : "inconsistent";
    doc["normalized"] = jt.normalized;
    doc["total_mass"] = jt.total_mass;
    ordered_json nodes = ordered_json::array();
    for (const auto& n : jt.nodes) nodes.push_back({{"id", n.id}, {"states", n.states}});
    doc["nodes"] = std::move(nodes);
    ordered_json cliques = ordered_json::array();
    for (const auto& c : jt.cliques)
        cliques.push_back({{"nodes", c.nodes}, {"table", detail::table_to_json(c.table)}});
    doc["cliques"] = std::move(cliques);
    ordered_json edges = ordered_json::array();
    for (const auto& e : jt.edges)
        edges.push_back({{"a", e.a},
                         {"b", e.b},
                         {"separator", e.separator},
                         {"table", detail::table_to_json(e.table)}});
    doc["edges"] = std::move(edges);
    if (jt.approx) {
        const ApproximationReport& rep = *jt.approx;
        ordered_json ja;
        ja["epsilon"] = rep.epsilon;
        ja["method"] = rep.method;
        ja["global_error"] = rep.global_error;
        ordered_json recs = ordered_json::array();
        for (const auto& r : rep.cliques)
            recs.push_back({{"delta", r.delta},
                            {"removed_mass", r.removed_mass},
                            {"pre_sum", r.pre_sum}});
        ja["cliques"] = std::move(recs);
        ja["finding_error"] = rep.finding_error;
        doc["approximation"] = std::move(ja);
    }
    return doc.dump() + "\n";
}

inline JunctionTree parse_tree(const std::string& text) {
    using detail::ordered_json;
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("tree: ") + e.what(), e.byte);
    }
    if (!doc.is_object() || doc.value("format", std::string{}) != "cpnet-tree-v1")
        throw ParseError("tree: expected a cpnet-tree-v1 document");
    for (const char* key : {"nodes", "cliques", "edges"})
        if (!doc.contains(key) || !doc[key].is_array())
            throw ParseError(std::string("tree: missing \"") + key + "\" array");
    JunctionTree jt;
    jt.network_name = doc.value("network", std::string{});
    try {
        jt.heuristic = heuristic_from_name(doc.value("heuristic", std::string{}));
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string("tree: ") + e.what());
    }
    const std::string status = doc.value("status", std::string{});
    if (status != "consistent" && status != "inconsistent")
        throw ParseError("tree: status must be consistent or inconsistent");
    jt.status = status == "consistent" ? TreeStatus::consistent : TreeStatus::inconsistent;
    jt.normalized = doc.value("normalized", false);
    jt.total_mass = doc.value("total_mass", 0.0);
    for (const auto& jn : doc["nodes"]) {
        if (!jn.is_object() || !jn.contains("id") || !jn.contains("states"))
            throw ParseError("tree: node entries require id and states");
        NodeMeta n;
        n.id = jn["id"].get<std::string>();
        n.states = jn["states"].get<std::vector<std::string>>();
        jt.nodes.push_back(std::move(n));
    }
    for (const auto& jc : doc["cliques"]) {
        if (!jc.is_object() || !jc.contains("nodes") || !jc.contains("table"))
            throw ParseError("tree: clique entries require nodes and table");
        Clique c;
        c.nodes = jc["nodes"].get<std::vector<int>>();
        c.table = detail::table_from_json(jc["table"]);
        jt.cliques.push_back(std::move(c));
    }
    for (const auto& je : doc["edges"]) {
        if (!je.is_object() || !je.contains("a") || !je.contains("b") ||
            !je.contains("separator") || !je.contains("table"))
            throw ParseError("tree: edge entries require a, b, separator, table");
        TreeEdge e;
        e.a = je["a"].get<int>();
        e.b = je["b"].get<int>();
        e.separator = je["separator"].get<std::vector<int>>();
        e.table = detail::table_from_json(je["table"]);
        if (e.a < 0 || e.b < 0 || e.a >= static_cast<int>(jt.cliques.size()) ||
            e.b >= static_cast<int>(jt.cliques.size()))
            throw ParseError("tree: edge endpoints out of range");
        jt.edges.push_back(std::move(e));
    }
    if (doc.contains("approximation")) {
        const auto& ja = doc["approximation"];
        if (!ja.is_object()) throw ParseError("tree: approximation must be an object");
        ApproximationReport rep;
        rep.epsilon = ja.value("epsilon", 0.0);
        rep.method = ja.value("method", std::string{});
        rep.global_error = ja.value("global_error", 0.0);
        if (ja.contains("cliques"))
            for (const auto& jr : ja["cliques"]) {
                CliqueApproxRecord r;
                r.delta = jr.value("delta", 0.0);
                r.removed_mass = jr.value("removed_mass", 0.0);
                r.pre_sum = jr.value("pre_sum", 0.0);
                rep.cliques.push_back(r);
            }
        if (ja.contains("finding_error"))
            rep.finding_error = ja["finding_error"].get<std::vector<std::vector<double>>>();
        jt.approx = std::move(rep);
    }
    jt.rebuild_incident();
    return jt;
}

// ---------------------------------------------------------------------------
// Case files: {"findings": [{"node": "<id>", "states": ["<state>", ...]}]}

inline std::string serialize_case(const std::vector<NodeMeta>& nodes, const Case& c) {
    using detail::ordered_json;
    ordered_json doc;
    ordered_json arr = ordered_json::array();
    for (const auto& f : c.findings) {
        const NodeMeta& n = nodes[static_cast<std::size_t>(f.node)];
        std::vector<std::string> states;
        states.reserve(f.states.size());
        for (int s : f.states) states.push_back(n.states[static_cast<std::size_t>(s)]);
        arr.push_back({{"node", n.id}, {"states", states}});
    }
    doc["findings"] = std::move(arr);
    return doc.dump() + "\n";
}

inline Case parse_case(const std::string& text, const std::vector<NodeMeta>& nodes) {
    using detail::ordered_json;
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("case: ") + e.what(), e.byte);
    }
    if (!doc.is_object() || !doc.contains("findings") || !doc["findings"].is_array())
        throw ParseError("case: expected an object with a \"findings\" array");
    auto node_index = [&](const std::string& id) {
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].id == id) return static_cast<int>(i);
        throw ParseError("case: unknown node \"" + id + "\"");
    };
    Case c;
    for (const auto& jf : doc["findings"]) {
        if (!jf.is_object() || !jf.contains("node") || !jf.contains("states"))
            throw ParseError("case: finding entries require node and states");
        Finding f;
        f.node = node_index(jf["node"].get<std::string>());
        const NodeMeta& n = nodes[static_cast<std::size_t>(f.node)];
        for (const auto& js : jf["states"]) {
            const std::string name = js.get<std::string>();
            int s = -1;
            for (std::size_t k = 0; k < n.states.size(); ++k)
                if (n.states[k] == name) s = static_cast<int>(k);
            if (s < 0)
                throw ParseError("case: unknown state \"" + name + "\" of node \"" + n.id + "\"");
            f.states.push_back(s);
        }
        c.findings.push_back(std::move(f));
    }
    return c;
}

// ---------------------------------------------------------------------------
// Per-finding error CSV (one row per node state)

inline std::string finding_error_csv(const JunctionTree& jt) {
    if (!jt.approx) throw InvalidArgument("tree carries no approximation report");
    std::string out = "node,state,error\n";
    const auto& fe = jt.approx->finding_error;
    for (std::size_t i = 0; i < jt.nodes.size(); ++i)
        for (std::size_t s = 0; s < jt.nodes[i].states.size(); ++s) {
            out += jt.nodes[i].id;
            out += ',';
            out += jt.nodes[i].states[s];
            out += ',';
            out += format_double(fe[i][s]);
            out += '\n';
        }
    return out;
}

// ---------------------------------------------------------------------------
// Storage accounting: the payload is what the values arrays serialize —
// 8 bytes per stored number (dense tables store size values, sparse tables
// an index and a value per nonzero).

inline std::int64_t payload_bytes(const BeliefTable& t) { return 8 * t.stored_value_count(); }

inline std::int64_t tree_payload_bytes(const JunctionTree& jt) {
    std::int64_t total = 0;
    for (const auto& c : jt.cliques) total += payload_bytes(c.table);
    for (const auto& e : jt.edges) total += payload_bytes(e.table);
    return total;
}

inline std::int64_t tree_dense_bytes(const JunctionTree& jt) {
    std::int64_t total = 0;
    for (const auto& c : jt.cliques) total += 8 * c.table.size();
    for (const auto& e : jt.edges) total += 8 * e.table.size();
    return total;
}

} // namespace cpnet
