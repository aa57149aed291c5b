// Command-line front end: compile networks to junction trees, approximate
// them, query posteriors with worst-case error bounds, report tree
// statistics, generate synthetic networks, and run the benchmark harness.
//
// Exit statuses: 0 success, 2 validation failure, 3 excluded case,
// 4 I/O or parse failure.

#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cpnet/approx.hpp"
#include "cpnet/bench.hpp"
#include "cpnet/compiler.hpp"
#include "cpnet/engine.hpp"
#include "cpnet/errors.hpp"
#include "cpnet/network.hpp"
#include "cpnet/num_text.hpp"
#include "cpnet/oracle.hpp"
#include "cpnet/serialize.hpp"
#include "cpnet/synthetic.hpp"

namespace {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("cannot read " + path);
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("cannot write " + path);
}

void emit(const std::optional<std::string>& path, const std::string& text) {
    if (path)
        write_file(*path, text);
    else
        std::cout << text;
}

std::vector<double> parse_epsilon_list(const std::string& arg) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(arg);
    while (std::getline(in, item, ',')) {
        if (item.empty()) throw cpnet::InvalidArgument("empty epsilon in list");
        out.push_back(cpnet::parse_double(item));
    }
    if (out.empty()) throw cpnet::InvalidArgument("at least one epsilon is required");
    return out;
}

cpnet::ApproxMethod parse_method(const std::string& name) {
    if (name == "halving") return cpnet::ApproxMethod::halving;
    if (name == "sort") return cpnet::ApproxMethod::sort_exact;
    throw cpnet::InvalidArgument("unknown method: " + name + " (expected halving or sort)");
}

int resolve_node(const std::vector<cpnet::NodeMeta>& nodes, const std::string& id) {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].id == id) return static_cast<int>(i);
    throw cpnet::InvalidArgument("unknown node: " + id);
}

cpnet::NetworkSpec load_network(const std::string& path) {
    cpnet::NetworkSpec net = cpnet::parse_network(read_file(path));
    cpnet::ValidationReport report = cpnet::validate_network(net);
    if (!report.valid()) {
        for (const auto& v : report.violations)
            std::cerr << path << ": " << v.message << "\n";
        throw cpnet::InvalidArgument("network validation failed");
    }
    return net;
}

cpnet::JunctionTree load_tree(const std::string& path) {
    return cpnet::parse_tree(read_file(path));
}

cpnet::Case gather_case(const cpnet::JunctionTree& jt,
                        const std::optional<std::string>& case_file,
                        const std::vector<std::string>& evidence) {
    cpnet::Case c;
    if (case_file) c = cpnet::parse_case(read_file(*case_file), jt.nodes);
    for (const auto& e : evidence) {
        auto pos = e.find('=');
        if (pos == std::string::npos || pos == 0 || pos + 1 == e.size())
            throw cpnet::InvalidArgument("evidence must look like node=state: " + e);
        int node = resolve_node(jt.nodes, e.substr(0, pos));
        const auto& states = jt.nodes[static_cast<std::size_t>(node)].states;
        const std::string state_name = e.substr(pos + 1);
        int state = -1;
        for (std::size_t s = 0; s < states.size(); ++s)
            if (states[s] == state_name) state = static_cast<int>(s);
        if (state < 0)
            throw cpnet::InvalidArgument("unknown state " + state_name + " of node " +
                                         e.substr(0, pos));
        c.findings.push_back({node, {state}});
    }
    return c;
}

std::string stats_text(const cpnet::TreeStats& st, const std::string& format) {
    if (format == "json") {
        nlohmann::ordered_json j;
        j["clique_count"] = st.clique_count;
        nlohmann::ordered_json hist;
        for (const auto& [size, count] : st.size_histogram)
            hist[std::to_string(size)] = count;
        j["size_histogram"] = std::move(hist);
        j["total_state_space"] = st.total_state_space;
        j["max_clique_state_space"] = st.max_clique_state_space;
        j["zero_fraction"] = st.zero_fraction;
        return j.dump() + "\n";
    }
    std::string hist;
    for (const auto& [size, count] : st.size_histogram) {
        if (!hist.empty()) hist += ';';
        hist += std::to_string(size) + ":" + std::to_string(count);
    }
    std::string out = "metric,value\n";
    out += "clique_count," + std::to_string(st.clique_count) + "\n";
    out += "size_histogram," + hist + "\n";
    out += "total_state_space," + std::to_string(st.total_state_space) + "\n";
    out += "max_clique_state_space," + std::to_string(st.max_clique_state_space) + "\n";
    out += "zero_fraction," + cpnet::format_double(st.zero_fraction) + "\n";
    return out;
}

// ---------------------------------------------------------------------------

struct CompileArgs {
    std::string network_path;
    std::string heuristic = "max-card";
    std::optional<std::string> start_node;
    std::optional<std::string> output;
    std::string format = "csv";
};

int cmd_compile(const CompileArgs& a) {
    cpnet::NetworkSpec net = load_network(a.network_path);
    cpnet::Heuristic h = cpnet::heuristic_from_name(a.heuristic);
    int start = 0;
    if (a.start_node) {
        start = net.node_index(*a.start_node);
        if (start < 0) throw cpnet::InvalidArgument("unknown node: " + *a.start_node);
    }
    cpnet::JunctionTree jt = cpnet::compile_network(net, h, start);
    if (a.output) write_file(*a.output, cpnet::serialize_tree(jt));
    std::cout << stats_text(cpnet::tree_stats(jt), a.format);
    return 0;
}

struct ApproximateArgs {
    std::string tree_path;
    std::string epsilons;
    std::string method = "halving";
    std::optional<std::string> output;
    std::string format = "csv";
};

int cmd_approximate(const ApproximateArgs& a) {
    cpnet::JunctionTree jt = load_tree(a.tree_path);
    if (jt.approx)
        throw cpnet::InvalidArgument(
            "tree is already approximated; start again from the exact tree");
    std::vector<double> eps = parse_epsilon_list(a.epsilons);
    cpnet::ApproxMethod method = parse_method(a.method);
    if (eps.size() > 1 && a.output)
        throw cpnet::InvalidArgument("a single epsilon is required when writing a tree");

    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    std::string csv = "epsilon,method,e,removed_mass,payload_bytes\n";
    for (double epsilon : eps) {
        cpnet::ApproxRun run = cpnet::approximate(jt, {.epsilon = epsilon, .method = method});
        double removed = 0.0;
        for (const auto& r : run.report.cliques) removed += r.removed_mass;
        std::int64_t payload = cpnet::tree_payload_bytes(run.tree);
        csv += cpnet::format_double(epsilon) + ',' + run.report.method + ',' +
               cpnet::format_double(run.report.global_error) + ',' +
               cpnet::format_double(removed) + ',' + std::to_string(payload) + '\n';
        rows.push_back({{"epsilon", epsilon},
                        {"method", run.report.method},
                        {"e", run.report.global_error},
                        {"removed_mass", removed},
                        {"payload_bytes", payload}});
        if (a.output) {
            write_file(*a.output, cpnet::serialize_tree(run.tree));
            write_file(*a.output + ".errors.csv", cpnet::finding_error_csv(run.tree));
        }
    }
    std::cout << (a.format == "json" ? rows.dump() + "\n" : csv);
    return 0;
}

struct QueryArgs {
    std::string tree_path;
    std::vector<std::string> evidence;
    std::optional<std::string> case_file;
    std::optional<std::string> node;
    std::string format = "csv";
};

int cmd_query(const QueryArgs& a) {
    cpnet::JunctionTree jt = load_tree(a.tree_path);
    cpnet::Case c = gather_case(jt, a.case_file, a.evidence);
    cpnet::CaseResult r = cpnet::run_case(jt, c);
    if (r.detail.excluded)
        throw cpnet::ExcludedCaseError("zero normalization constant: the case is excluded");

    cpnet::ApproximationReport rep;
    if (jt.approx) {
        rep = *jt.approx;
    } else {
        rep.global_error = 0.0;
        for (const auto& n : jt.nodes)
            rep.finding_error.emplace_back(n.states.size(), 0.0);
    }
    cpnet::BoundReport bound = cpnet::worst_case_bound(rep, c.findings, r.detail.mu);

    std::vector<int> targets;
    if (a.node) {
        targets.push_back(resolve_node(jt.nodes, *a.node));
    } else {
        for (std::size_t i = 0; i < jt.nodes.size(); ++i)
            targets.push_back(static_cast<int>(i));
    }

    if (a.format == "json") {
        nlohmann::ordered_json j;
        j["mu_case"] = r.detail.mu;
        j["coarse_bound"] = bound.coarse;
        j["refined_bound"] = bound.refined;
        nlohmann::ordered_json posts;
        for (int t : targets) {
            const auto& n = jt.nodes[static_cast<std::size_t>(t)];
            std::vector<double> p = cpnet::query_marginal(r.tree, t);
            nlohmann::ordered_json jp;
            for (std::size_t s = 0; s < n.states.size(); ++s) jp[n.states[s]] = p[s];
            posts[n.id] = std::move(jp);
        }
        j["posteriors"] = std::move(posts);
        std::cout << j.dump() << "\n";
    } else {
        std::string out = "node,state,posterior,mu_case,coarse_bound,refined_bound\n";
        std::string tail = ',' + cpnet::format_double(r.detail.mu) + ',' +
                           cpnet::format_double(bound.coarse) + ',' +
                           cpnet::format_double(bound.refined) + '\n';
        for (int t : targets) {
            const auto& n = jt.nodes[static_cast<std::size_t>(t)];
            std::vector<double> p = cpnet::query_marginal(r.tree, t);
            for (std::size_t s = 0; s < n.states.size(); ++s)
                out += n.id + ',' + n.states[s] + ',' + cpnet::format_double(p[s]) + tail;
        }
        std::cout << out;
    }
    return 0;
}

struct StatsArgs {
    std::string tree_path;
    std::string format = "csv";
};

int cmd_stats(const StatsArgs& a) {
    cpnet::JunctionTree jt = load_tree(a.tree_path);
    std::cout << stats_text(cpnet::tree_stats(jt), a.format);
    return 0;
}

struct GenerateArgs {
    cpnet::SyntheticConfig cfg;
    std::optional<std::string> output;
};

int cmd_generate(const GenerateArgs& a) {
    cpnet::NetworkSpec net = cpnet::generate_synthetic(a.cfg);
    emit(a.output, cpnet::serialize_network(net));
    return 0;
}

struct BenchArgs {
    std::optional<std::string> network_path;
    bool synthetic = false;
    cpnet::SyntheticConfig gen;
    std::string epsilons;
    std::string method = "halving";
    std::string heuristic = "max-card";
    std::optional<std::string> start_node;
    int cases = 5;
    int findings_per_case = 2;
    std::string observable; // comma-separated node ids
    int time_reps = 0;
    std::uint64_t seed = 1;
    std::optional<std::string> output;
};

int cmd_bench(const BenchArgs& a) {
    if (a.synthetic == a.network_path.has_value())
        throw cpnet::InvalidArgument("bench needs a network file or --synthetic, not both");
    cpnet::NetworkSpec net;
    if (a.synthetic) {
        cpnet::SyntheticConfig gen = a.gen;
        gen.seed = a.seed;
        net = cpnet::generate_synthetic(gen);
    } else {
        net = load_network(*a.network_path);
    }
    cpnet::BenchConfig bc;
    if (!a.epsilons.empty()) bc.epsilons = parse_epsilon_list(a.epsilons);
    bc.method = parse_method(a.method);
    bc.heuristic = cpnet::heuristic_from_name(a.heuristic);
    if (a.start_node) {
        bc.max_card_start = net.node_index(*a.start_node);
        if (bc.max_card_start < 0)
            throw cpnet::InvalidArgument("unknown node: " + *a.start_node);
    }
    bc.cases = a.cases;
    bc.findings_per_case = a.findings_per_case;
    if (!a.observable.empty()) {
        std::string item;
        std::istringstream in(a.observable);
        while (std::getline(in, item, ',')) {
            int idx = net.node_index(item);
            if (idx < 0) throw cpnet::InvalidArgument("unknown node: " + item);
            bc.observable.push_back(idx);
        }
    }
    bc.time_reps = a.time_reps;
    bc.seed = a.seed;
    cpnet::BenchResult result = cpnet::run_bench(net, bc);
    emit(a.output, cpnet::bench_csv(result));
    return 0;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"junction-tree inference with annihilation-based approximation"};
    app.require_subcommand(1);

    CompileArgs ca;
    CLI::App* compile = app.add_subcommand("compile", "compile a network into a junction tree");
    compile->add_option("network", ca.network_path, "network JSON file")->required();
    compile->add_option("--heuristic", ca.heuristic, "max-card, min-size, or min-weight");
    compile->add_option("--start-node", ca.start_node, "start node for max-card");
    compile->add_option("--output", ca.output, "tree file to write");
    compile->add_option("--format", ca.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    ApproximateArgs aa;
    CLI::App* approx = app.add_subcommand("approximate", "annihilate small belief entries");
    approx->add_option("tree", aa.tree_path, "compiled tree file")->required();
    approx->add_option("--epsilon", aa.epsilons, "epsilon or comma list")->required();
    approx->add_option("--method", aa.method, "halving or sort");
    approx->add_option("--output", aa.output, "approximated tree file to write");
    approx->add_option("--format", aa.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    QueryArgs qa;
    CLI::App* query = app.add_subcommand("query", "posterior marginals with error bounds");
    query->add_option("tree", qa.tree_path, "compiled tree file")->required();
    query->add_option("--evidence", qa.evidence, "finding as node=state (repeatable)");
    query->add_option("--case-file", qa.case_file, "case JSON file");
    query->add_option("--node", qa.node, "hypothesis node (default: all nodes)");
    query->add_option("--format", qa.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    StatsArgs sa;
    CLI::App* stats = app.add_subcommand("stats", "report junction-tree statistics");
    stats->add_option("tree", sa.tree_path, "compiled tree file")->required();
    stats->add_option("--format", sa.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    GenerateArgs ga;
    CLI::App* gen = app.add_subcommand("generate", "generate a synthetic network");
    gen->add_option("--nodes", ga.cfg.nodes, "node count");
    gen->add_option("--max-parents", ga.cfg.max_parents, "parent cap per node");
    gen->add_option("--min-states", ga.cfg.min_states, "minimum states per node");
    gen->add_option("--max-states", ga.cfg.max_states, "maximum states per node");
    gen->add_option("--alpha", ga.cfg.alpha, "Dirichlet concentration");
    gen->add_option("--zero-fraction", ga.cfg.zero_fraction, "share of exact zeros per row");
    gen->add_option("--seed", ga.cfg.seed, "random seed");
    gen->add_option("--output", ga.output, "network file to write (default stdout)");

    BenchArgs ba;
    CLI::App* bench = app.add_subcommand("bench", "storage/time benchmark over an epsilon sweep");
    bench->add_option("network", ba.network_path, "network JSON file");
    bench->add_flag("--synthetic", ba.synthetic, "generate the network instead");
    bench->add_option("--nodes", ba.gen.nodes, "synthetic node count");
    bench->add_option("--max-parents", ba.gen.max_parents, "synthetic parent cap");
    bench->add_option("--min-states", ba.gen.min_states, "synthetic minimum states");
    bench->add_option("--max-states", ba.gen.max_states, "synthetic maximum states");
    bench->add_option("--alpha", ba.gen.alpha, "synthetic Dirichlet concentration");
    bench->add_option("--zero-fraction", ba.gen.zero_fraction, "synthetic zero share");
    bench->add_option("--epsilon", ba.epsilons, "epsilon comma list (0 always included)");
    bench->add_option("--method", ba.method, "halving or sort");
    bench->add_option("--heuristic", ba.heuristic, "max-card, min-size, or min-weight");
    bench->add_option("--start-node", ba.start_node, "start node for max-card");
    bench->add_option("--cases", ba.cases, "random cases per epsilon");
    bench->add_option("--findings-per-case", ba.findings_per_case, "findings per case");
    bench->add_option("--observable", ba.observable, "comma list of finding nodes");
    bench->add_option("--time-reps", ba.time_reps,
                      "timing repetitions per case (0 = no timing columns)");
    bench->add_option("--seed", ba.seed, "random seed");
    bench->add_option("--output", ba.output, "CSV file to write (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (compile->parsed()) return cmd_compile(ca);
    if (approx->parsed()) return cmd_approximate(aa);
    if (query->parsed()) return cmd_query(qa);
    if (stats->parsed()) return cmd_stats(sa);
    if (gen->parsed()) return cmd_generate(ga);
    if (bench->parsed()) return cmd_bench(ba);
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const cpnet::ExcludedCaseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const cpnet::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
