/*
 * Copyright 2026 The latentid authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "latentid/latentid.hpp"
#include "latentid/reports.hpp"

// Command-line front door.  Exit codes are stable contracts:
//   0  success (analyze: identifiability certified)
//   2  input error (parse failure, cycle, bad flags)
//   3  analyze: not identifiable (edge bound violated or rank deficient)
// All randomness is seeded; reruns with the same inputs and flags are
// byte-identical.

namespace {

using namespace latentid;

Dag load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open graph file '" + path + "'");
    return read_graph(in);
}

RatMatrix load_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open matrix file '" + path + "'");
    return read_matrix(in);
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw parse_error(std::string("bad JSON in '") + path + "': " + e.what());
    }
}

void print_edge_list(std::ostream& out, const std::vector<Edge>& edges) {
    if (edges.empty()) {
        out << "(none)";
        return;
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (i) out << ' ';
        out << edges[i].first << '-' << edges[i].second;
    }
}

int cmd_analyze(const std::string& graph_file, const std::vector<int>& excluded, bool as_json,
                const std::string& dump_jacobian, const std::string& dump_witness,
                const DecideConfig& cfg) {
    const Dag g = load_graph(graph_file);
    const std::vector<int> excl = normalize_excluded(g, excluded);

    const bool suff = sufficient_odd_cycle(g, excl);
    const NecessaryReport nec = necessary_condition(g, excl);
    const WermuthReport wermuth = wermuth_report(g);
    const Verdict verdict = decide_identifiability(g, excl, cfg);
    const UGraph comp = complement(g);
    const UGraph con = concentration_graph(g);
    const UGraph cov = latent_covariance_graph(g);

    if (!dump_jacobian.empty()) {
        ParamPoint p = verdict.witness
                           ? *verdict.witness
                           : random_param_point(g, ParamKind::concentration,
                                                derive_seed(verdict.seed, 0), cfg.bound, excl);
        std::ofstream out(dump_jacobian);
        if (!out) throw parse_error("cannot write '" + dump_jacobian + "'");
        write_jacobian(out, split_concentration_jacobian(g, p));
    }
    if (!dump_witness.empty()) {
        std::ofstream out(dump_witness);
        if (!out) throw parse_error("cannot write '" + dump_witness + "'");
        json j;
        j["seed"] = verdict.seed;
        j["witness"] = verdict.witness ? to_json(*verdict.witness) : json(nullptr);
        out << j.dump(2) << '\n';
    }

    if (as_json) {
        json j;
        j["graph"] = {{"m", g.m()}, {"edges", edges_to_json(g.edges())}};
        j["excluded"] = excl;
        j["edge_bound_ok"] = verdict.status != VerdictStatus::EdgeBoundViolated;
        j["sufficient_odd_cycle"] = suff;
        j["wermuth"] = {{"holds", wermuth.holds()},
                        {"clause_cov", wermuth.clause_cov},
                        {"clause_con", wermuth.clause_con}};
        j["necessary"] = to_json(nec);
        j["jacobian"] = to_json(verdict);
        j["derived_graphs"] = {{"complement", edges_to_json(comp.edges())},
                               {"concentration", edges_to_json(con.edges())},
                               {"latent_covariance", edges_to_json(cov.edges())}};
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "graph: m=" << g.m() << " |E|=" << g.edge_count() << '\n';
        std::cout << "complement:        ";
        print_edge_list(std::cout, comp.edges());
        std::cout << '\n';
        std::cout << "concentration:     ";
        print_edge_list(std::cout, con.edges());
        std::cout << '\n';
        std::cout << "latent covariance: ";
        print_edge_list(std::cout, cov.edges());
        std::cout << '\n';
        std::cout << "sufficient (odd cycles in complement): " << (suff ? "true" : "false")
                  << '\n';
        std::cout << "wermuth: " << (wermuth.holds() ? "true" : "false")
                  << " (cov clause " << (wermuth.clause_cov ? "true" : "false") << ", con clause "
                  << (wermuth.clause_con ? "true" : "false") << ")\n";
        std::cout << "necessary: " << (nec.holds ? "holds" : "fails") << " |E_con|=" << nec.e_con
                  << " d_con=" << nec.d_con << " |E_cov|=" << nec.cov_edges
                  << " d_cov=" << nec.d_cov << " failed_clause=" << to_string(nec.failed_clause)
                  << '\n';
        std::cout << "jacobian: " << to_string(verdict.status) << " rank=" << verdict.rank_observed
                  << "/" << verdict.columns << " trials=" << verdict.trials
                  << " seed=" << verdict.seed << '\n';
    }
    return verdict.status == VerdictStatus::IdentifiableCertified ? 0 : 3;
}

int cmd_enumerate(int m, const RunConfig& cfg) {
    const ClassifyResult result = classify_all(m, cfg);
    const std::string dir = cfg.output_dir.empty() ? "." : cfg.output_dir;

    {
        std::ofstream out(dir + "/table1.json");
        if (!out) throw parse_error("cannot write table1.json in '" + dir + "'");
        out << to_json(result.report).dump(2) << '\n';
    }
    {
        std::ofstream out(dir + "/graphs_m" + std::to_string(m) + ".csv");
        if (!out) throw parse_error("cannot write graphs CSV in '" + dir + "'");
        write_rows_csv(out, result.rows);
    }
    {
        std::ofstream out(dir + "/cache_m" + std::to_string(m) + ".json");
        if (!out) throw parse_error("cannot write cache JSON in '" + dir + "'");
        out << cache_to_json(m, build_cache(result, false)).dump(2) << '\n';
    }
    std::cout << summary_line(result.report) << '\n';
    if (!result.report.extension_disagreements.empty()) {
        std::cout << "extension disagreements:";
        for (const CanonicalKey& k : result.report.extension_disagreements)
            std::cout << ' ' << k.hex();
        std::cout << '\n';
    }
    return 0;
}

int cmd_equiv(const std::string& file1, const std::string& file2) {
    const Dag g1 = load_graph(file1);
    const Dag g2 = load_graph(file2);
    json j;
    j["markov_equivalent"] = markov_equivalent(g1, g2);
    std::cout << j.dump(2) << '\n';
    return 0;
}

int cmd_extend(const std::string& graph_file, const std::string& cache_file,
               const DecideConfig& cfg) {
    const Dag g = load_graph(graph_file);
    const VerdictCache cache = cache_from_json(load_json(cache_file));
    const std::optional<ExtensionCertificate> cert = subgraph_extension(g, cache);
    json j;
    if (cert) {
        j = to_json(*cert);
        j["found"] = true;
        // Never trust an extension chain that the Jacobian contradicts.
        const Verdict verdict = decide_identifiability(g, {}, cfg);
        j["corroborated"] = verdict.status == VerdictStatus::IdentifiableCertified;
        if (verdict.status != VerdictStatus::IdentifiableCertified) {
            std::cout << j.dump(2) << '\n';
            std::cerr << "inconsistency: extension certificate found for a graph the Jacobian "
                         "test reports as "
                      << to_string(verdict.status) << '\n';
            return 4;
        }
    } else {
        j["found"] = false;
    }
    std::cout << j.dump(2) << '\n';
    return 0;
}

int cmd_spearman(const std::string& matrix_file) {
    const RatMatrix u = load_matrix(matrix_file);
    if (!u.is_symmetric()) throw parse_error("matrix is not symmetric");
    if (u.rows() < 3) throw parse_error("matrix must be at least 3x3");
    const bool sp = is_spearman(u);
    const bool cosp = is_cospearman(u);
    json j;
    j["is_spearman"] = sp;
    j["is_cospearman"] = cosp;
    if (sp) j["decomposition"] = to_json(spearman_decompose(u), "spearman");
    else if (cosp) j["decomposition"] = to_json(cospearman_decompose(u), "cospearman");
    else j["decomposition"] = nullptr;
    std::cout << j.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generic finite identifiability of Gaussian one-latent-source DAG models"};
    app.require_subcommand(1);

    DecideConfig decide_cfg;
    RunConfig run_cfg;

    // analyze
    std::string graph_file, dump_jacobian, dump_witness;
    std::vector<int> excluded;
    bool as_json = false;
    CLI::App* analyze = app.add_subcommand("analyze", "criteria + Jacobian verdict for one graph");
    analyze->add_option("graph", graph_file, "graph file")->required();
    analyze->add_option("--excluded", excluded, "nodes with loading pinned to 0")->delimiter(',');
    analyze->add_flag("--json", as_json, "machine-readable output");
    analyze->add_option("--dump-jacobian", dump_jacobian, "write the Jacobian matrix here");
    analyze->add_option("--dump-witness", dump_witness, "write the certifying point here");
    analyze->add_option("--seed", decide_cfg.seed, "root seed");
    analyze->add_option("--bound", decide_cfg.bound, "sampling bound")->check(CLI::Range(2L, 1000000000L));
    analyze->add_option("--trials", decide_cfg.trials, "deficiency trials")->check(CLI::PositiveNumber);

    // enumerate
    int m = 4;
    CLI::App* enumerate = app.add_subcommand("enumerate", "classify all unlabeled DAGs on m nodes");
    enumerate->add_option("m", m, "node count (3..6)")->required()->check(CLI::Range(3, 6));
    enumerate->add_option("--seed", run_cfg.seed, "root seed");
    enumerate->add_option("--bound", run_cfg.bound, "sampling bound")->check(CLI::Range(2L, 1000000000L));
    enumerate->add_option("--trials", run_cfg.trials, "deficiency trials")->check(CLI::PositiveNumber);
    enumerate->add_option("--workers", run_cfg.workers, "worker threads (0 = auto)");
    enumerate->add_option("--output-dir", run_cfg.output_dir, "where to write the reports");

    // equiv
    std::string equiv_file1, equiv_file2;
    CLI::App* equiv = app.add_subcommand("equiv", "Markov equivalence of two graphs");
    equiv->add_option("graph1", equiv_file1, "first graph file")->required();
    equiv->add_option("graph2", equiv_file2, "second graph file")->required();

    // extend
    std::string extend_graph, extend_cache;
    CLI::App* extend = app.add_subcommand("extend", "subgraph-extension certificate search");
    extend->add_option("graph", extend_graph, "graph file")->required();
    extend->add_option("cache", extend_cache, "verdict cache JSON")->required();
    extend->add_option("--seed", decide_cfg.seed, "root seed");

    // spearman
    std::string matrix_file;
    CLI::App* spearman = app.add_subcommand("spearman", "Spearman/coSpearman membership + decomposition");
    spearman->add_option("matrix", matrix_file, "matrix file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (analyze->parsed())
            return cmd_analyze(graph_file, excluded, as_json, dump_jacobian, dump_witness,
                               decide_cfg);
        if (enumerate->parsed()) return cmd_enumerate(m, run_cfg);
        if (equiv->parsed()) return cmd_equiv(equiv_file1, equiv_file2);
        if (extend->parsed()) return cmd_extend(extend_graph, extend_cache, decide_cfg);
        if (spearman->parsed()) return cmd_spearman(matrix_file);
    } catch (const latentid::error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
