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

#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "latentid/criteria.hpp"
#include "latentid/enumerate.hpp"
#include "latentid/jacobian.hpp"
#include "latentid/params.hpp"
#include "latentid/spearman.hpp"

// JSON serialization for the machine interfaces: verdict caches, the
// classification report, parameter-point witnesses, and the per-command
// CLI outputs.  Rationals are serialized as "p/q" strings; JSON numbers
// cannot carry them.

namespace latentid {

using json = nlohmann::json;

inline json to_json(const std::vector<Rat>& v) {
    json arr = json::array();
    for (const Rat& x : v) arr.push_back(to_string(x));
    return arr;
}

inline json edges_to_json(const std::vector<Edge>& edges) {
    json arr = json::array();
    for (const Edge& e : edges) arr.push_back(json::array({e.first, e.second}));
    return arr;
}

inline json to_json(const ParamPoint& p) {
    json j;
    j["kind"] = p.kind == ParamKind::covariance ? "covariance" : "concentration";
    j["edges"] = edges_to_json(p.edges);
    j["edge_coeffs"] = to_json(p.edge_coeffs);
    j["diag"] = to_json(p.diag);
    j["loading"] = to_json(p.loading);
    j["excluded"] = p.excluded;
    return j;
}

inline json to_json(const Verdict& v) {
    json j;
    j["status"] = to_string(v.status);
    j["rank_observed"] = v.rank_observed;
    j["columns"] = v.columns;
    j["trials"] = v.trials;
    j["seed"] = v.seed;
    return j;
}

inline json to_json(const NecessaryReport& rep) {
    json j;
    j["holds"] = rep.holds;
    j["e_con"] = rep.e_con;
    j["d_con"] = rep.d_con;
    j["cov_edges"] = rep.cov_edges;
    j["d_cov"] = rep.d_cov;
    j["failed_clause"] = to_string(rep.failed_clause);
    return j;
}

inline json to_json(const Table1Report& rep) {
    json j;
    j["m"] = rep.m;
    j["total"] = rep.total;
    j["jacobian_identifiable"] = rep.jacobian_identifiable;
    j["suff_thm"] = rep.suff_thm;
    j["wermuth"] = rep.wermuth;
    j["nec_violated"] = rep.nec_violated;
    j["jacobian_nonidentifiable"] = rep.jacobian_nonidentifiable;
    j["gap"] = rep.gap;
    j["extension_certified_in_gap"] = rep.extension_certified_in_gap;
    j["markov_extension_certified_in_gap"] = rep.markov_extension_certified_in_gap;
    json probable = json::array();
    for (const CanonicalKey& k : rep.probable_only) probable.push_back(k.hex());
    j["probable_only"] = probable;
    json markov_only = json::array();
    for (const CanonicalKey& k : rep.extension_markov_only) markov_only.push_back(k.hex());
    j["extension_markov_only"] = markov_only;
    json disagreements = json::array();
    for (const CanonicalKey& k : rep.extension_disagreements) disagreements.push_back(k.hex());
    j["extension_disagreements"] = disagreements;
    return j;
}

inline json cache_to_json(int m, const VerdictCache& cache) {
    json entries = json::object();
    for (const auto& [key, entry] : cache) {
        json e;
        e["status"] = entry.identifiable ? "IdentifiableCertified" : "NotIdentifiableProbable";
        e["provenance"] = entry.provenance;
        e["suff"] = entry.suff;
        entries[key.hex()] = e;
    }
    json j;
    j["m"] = m;
    j["entries"] = entries;
    return j;
}

inline VerdictCache cache_from_json(const json& j) {
    VerdictCache cache;
    if (!j.contains("entries") || !j["entries"].is_object())
        throw parse_error("cache file lacks an 'entries' object");
    for (const auto& [hex, e] : j["entries"].items()) {
        const std::optional<CanonicalKey> key = CanonicalKey::from_hex(hex);
        if (!key) throw parse_error("bad canonical key '" + hex + "' in cache");
        CacheEntry entry;
        const std::string status = e.value("status", "");
        entry.identifiable = status == "IdentifiableCertified";
        entry.provenance = e.value("provenance", "");
        entry.suff = e.value("suff", false);
        entry.certified =
            entry.identifiable &&
            (entry.provenance == "criteria" || entry.provenance == "jacobian");
        cache.emplace(*key, entry);
    }
    return cache;
}

inline json to_json(const ExtensionCertificate& cert) {
    json chain = json::array();
    for (const auto& [node, role] : cert.chain) {
        json step;
        step["node"] = node;
        step["role"] = to_string(role);
        chain.push_back(step);
    }
    json j;
    j["chain"] = chain;
    j["base_graph_key"] = cert.base_graph_key.hex();
    return j;
}

inline json to_json(const SpearmanDecomposition& dec, const std::string& kind) {
    json j;
    j["kind"] = kind;
    j["diag_part"] = to_json(dec.diag_part);
    j["loading_sq"] = to_json(dec.loading_sq);
    j["loading_signs"] = dec.loading_signs;
    return j;
}

}  // namespace latentid
