#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "pcstar/bayes_net.hpp"
#include "pcstar/graph.hpp"

namespace pcstar::io {

struct IoError : Error {
    using Error::Error;
};

/// Writes to a sibling temp file, then renames over the target.
inline void write_atomic(const std::filesystem::path& path, const std::string& contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
        out << contents;
        out.flush();
        if (!out) throw IoError("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot rename onto '" + path.string() + "'");
    }
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---- networks -------------------------------------------------------------

inline nlohmann::json variables_to_json(const std::vector<Variable>& vars) {
    auto arr = nlohmann::json::array();
    for (const auto& v : vars) arr.push_back({{"name", v.name}, {"arity", v.arity}});
    return arr;
}

inline std::vector<Variable> variables_from_json(const nlohmann::json& j) {
    std::vector<Variable> vars;
    for (const auto& item : j) {
        vars.push_back({static_cast<int>(vars.size()), item.at("name").get<std::string>(), item.at("arity").get<int>()});
    }
    validate_variables(vars);
    return vars;
}

inline nlohmann::json dag_to_json(const Dag& dag) {
    auto edges = nlohmann::json::array();
    for (auto [a, b] : dag.edges()) edges.push_back({a, b});
    return {{"variables", variables_to_json(dag.variables())}, {"edges", edges}};
}

inline Dag dag_from_json(const nlohmann::json& j) {
    Dag dag(variables_from_json(j.at("variables")));
    for (const auto& e : j.at("edges")) dag.add_edge(e.at(0).get<int>(), e.at(1).get<int>());
    return dag;
}

inline nlohmann::json network_to_json(const BayesNet& bn) {
    auto j = dag_to_json(bn.dag());
    auto cpts = nlohmann::json::array();
    for (std::size_t v = 0; v < bn.size(); ++v) {
        const auto& c = bn.cpt(static_cast<int>(v));
        auto cols = nlohmann::json::array();
        for (std::size_t k = 0; k < c.columns(); ++k) {
            const auto col = c.column(k);
            cols.push_back(std::vector<double>(col.begin(), col.end()));
        }
        cpts.push_back({{"node", c.node()}, {"parents", c.parents()}, {"columns", cols}});
    }
    j["cpts"] = cpts;
    return j;
}

/// Probability columns must sum to 1 within 1e-6 (hand-written decimals).
inline BayesNet network_from_json(const nlohmann::json& j) {
    BayesNet bn(dag_from_json(j));
    const auto& cpts = j.at("cpts");
    if (cpts.size() != bn.size()) throw Error("expected one CPT per node");
    std::vector<bool> seen(bn.size(), false);
    for (const auto& item : cpts) {
        const int node = item.at("node").get<int>();
        if (node < 0 || static_cast<std::size_t>(node) >= bn.size() || seen[static_cast<std::size_t>(node)]) {
            throw Error("bad or repeated CPT node id");
        }
        seen[static_cast<std::size_t>(node)] = true;
        auto& c = bn.cpt(node);
        if (item.at("parents").get<std::vector<int>>() != c.parents()) {
            throw Error("CPT parents of node " + std::to_string(node) + " do not match the edge list");
        }
        const auto& cols = item.at("columns");
        if (cols.size() != c.columns()) throw Error("wrong column count for node " + std::to_string(node));
        for (std::size_t k = 0; k < c.columns(); ++k) {
            const auto vals = cols.at(k).get<std::vector<double>>();
            auto col = c.column(k);
            if (vals.size() != col.size()) throw Error("wrong column length for node " + std::to_string(node));
            std::copy(vals.begin(), vals.end(), col.begin());
        }
    }
    bn.validate(1e-6);
    return bn;
}

inline void write_network(const std::filesystem::path& path, const BayesNet& bn) {
    write_atomic(path, network_to_json(bn).dump(2) + "\n");
}

inline BayesNet read_network(const std::filesystem::path& path) {
    try {
        return network_from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed network file '" + path.string() + "': " + e.what());
    }
}

// ---- datasets -------------------------------------------------------------

inline std::string dataset_to_csv(const Dataset& data) {
    std::string out;
    const auto& vars = data.variables();
    for (std::size_t v = 0; v < vars.size(); ++v) {
        if (v) out += ',';
        out += vars[v].name;
    }
    out += '\n';
    for (std::size_t r = 0; r < data.rows(); ++r) {
        const auto row = data.row(r);
        for (std::size_t v = 0; v < row.size(); ++v) {
            if (v) out += ',';
            out += std::to_string(row[v]);
        }
        out += '\n';
    }
    return out;
}

namespace detail {
inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    for (auto& s : out) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        s = b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    }
    return out;
}
}  // namespace detail

/// Parses CSV text. Without explicit arities, each variable's arity is
/// max(2, largest observed state + 1).
inline Dataset dataset_from_csv(const std::string& text, const std::optional<std::vector<int>>& arities = std::nullopt) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw Error("dataset is missing its header row");
    const auto names = detail::split_csv_line(line);
    std::vector<int> cells;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != names.size()) throw Error("row " + std::to_string(lineno) + " has the wrong number of fields");
        for (const auto& f : fields) {
            std::size_t used = 0;
            int v = 0;
            try {
                v = std::stoi(f, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != f.size() || f.empty()) throw Error("row " + std::to_string(lineno) + ": '" + f + "' is not a state index");
            cells.push_back(v);
        }
    }
    std::vector<Variable> vars;
    for (std::size_t v = 0; v < names.size(); ++v) {
        int arity = 2;
        if (arities) {
            arity = arities->at(v);
        } else {
            for (std::size_t i = v; i < cells.size(); i += names.size()) arity = std::max(arity, cells[i] + 1);
        }
        vars.push_back({static_cast<int>(v), names[v], arity});
    }
    Dataset data(std::move(vars));
    data.reserve(cells.size() / std::max<std::size_t>(names.size(), 1));
    for (std::size_t i = 0; i + names.size() <= cells.size(); i += names.size()) {
        data.add_row(std::span<const int>(cells.data() + i, names.size()));
    }
    return data;
}

inline void write_dataset(const std::filesystem::path& path, const Dataset& data) { write_atomic(path, dataset_to_csv(data)); }

inline Dataset read_dataset(const std::filesystem::path& path, const std::optional<std::vector<int>>& arities = std::nullopt) {
    return dataset_from_csv(read_file(path), arities);
}

// ---- patterns -------------------------------------------------------------

inline nlohmann::json pattern_to_json(const Pattern& p) {
    auto directed = nlohmann::json::array();
    for (auto [a, b] : p.directed_edges()) directed.push_back({a, b});
    auto undirected = nlohmann::json::array();
    for (auto [a, b] : p.undirected_edges()) undirected.push_back({a, b});
    return {{"variables", variables_to_json(p.variables())}, {"directed", directed}, {"undirected", undirected}};
}

inline Pattern pattern_from_json(const nlohmann::json& j) {
    Pattern p(variables_from_json(j.at("variables")));
    for (const auto& e : j.at("directed")) p.add_directed(e.at(0).get<int>(), e.at(1).get<int>());
    for (const auto& e : j.at("undirected")) p.add_undirected(e.at(0).get<int>(), e.at(1).get<int>());
    return p;
}

inline std::string quote_dot(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

inline std::string pattern_to_dot(const Pattern& p) {
    const auto& vars = p.variables();
    std::string out = "digraph pattern {\n";
    for (const auto& v : vars) out += "  " + quote_dot(v.name) + ";\n";
    for (auto [a, b] : p.directed_edges()) {
        out += "  " + quote_dot(vars[static_cast<std::size_t>(a)].name) + " -> " + quote_dot(vars[static_cast<std::size_t>(b)].name) + ";\n";
    }
    for (auto [a, b] : p.undirected_edges()) {
        out += "  " + quote_dot(vars[static_cast<std::size_t>(a)].name) + " -> " + quote_dot(vars[static_cast<std::size_t>(b)].name) +
               " [dir=none];\n";
    }
    return out + "}\n";
}

inline std::string dag_to_dot(const Dag& dag) { return pattern_to_dot(as_pattern(dag)); }

}  // namespace pcstar::io
