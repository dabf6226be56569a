#pragma once

#include <fstream>
#include <json.hpp>
#include <string>

#include "locc/classify.hpp"

namespace locc {

namespace detail {

inline Json complex_to_json(const Complex& z) {
    return Json::array({z.real(), z.imag()});
}

inline Complex complex_from_json(const Json& j) {
    return Complex(j.at(0).get<double>(), j.at(1).get<double>());
}

inline Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (long i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (long j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

inline Matrix matrix_from_json(const Json& j) {
    long rows = static_cast<long>(j.size());
    long cols = rows ? static_cast<long>(j.at(0).size()) : 0;
    Matrix m(rows, cols);
    for (long i = 0; i < rows; ++i)
        for (long k = 0; k < cols; ++k) m(i, k) = complex_from_json(j.at(i).at(k));
    return m;
}

}  // namespace detail

// --------------------------------------------------------------------------
// State sets

inline Json state_set_to_json(const StateSet& s) {
    Json j;
    j["name"] = s.name;
    j["dims"] = s.sig.dims;
    j["parties"] = s.sig.parties;
    if (!s.sig.factor_names.empty()) j["factor_names"] = s.sig.factor_names;
    Json states = Json::array();
    for (const auto& psi : s.states) {
        Json st;
        st["label"] = psi.label;
        Json amps = Json::array();
        for (long k = 0; k < psi.amplitudes.size(); ++k)
            amps.push_back(detail::complex_to_json(psi.amplitudes(k)));
        st["amplitudes"] = amps;
        states.push_back(st);
    }
    j["states"] = states;
    if (s.factorization) {
        Json f;
        for (const auto& [party, dims] : s.factorization->splits) f["splits"][party] = dims;
        for (const auto& [party, names] : s.factorization->names) f["names"][party] = names;
        j["factorization"] = f;
    }
    return j;
}

inline StateSet state_set_from_json(const Json& j) {
    std::vector<int> dims = j.at("dims").get<std::vector<int>>();
    std::vector<std::string> parties = j.at("parties").get<std::vector<std::string>>();
    std::vector<std::string> names;
    if (j.contains("factor_names"))
        names = j.at("factor_names").get<std::vector<std::string>>();
    DimensionSignature sig(dims, parties, names);
    std::vector<MultipartiteState> states;
    for (const auto& st : j.at("states")) {
        const auto& amps = st.at("amplitudes");
        Vector v(static_cast<long>(amps.size()));
        for (long k = 0; k < v.size(); ++k) v(k) = detail::complex_from_json(amps.at(k));
        states.emplace_back(sig, v, st.value("label", ""));
    }
    StateSet s(sig, states, j.value("name", ""));
    if (j.contains("factorization")) {
        FactorizationSpec f;
        const auto& fj = j.at("factorization");
        if (fj.contains("splits"))
            for (const auto& [party, d] : fj.at("splits").items())
                f.splits[party] = d.get<std::vector<int>>();
        if (fj.contains("names"))
            for (const auto& [party, n] : fj.at("names").items())
                f.names[party] = n.get<std::vector<std::string>>();
        s.factorization = f;
    }
    return s;
}

// --------------------------------------------------------------------------
// Measurements: diagonal projectors as index sets, anything else as matrices

inline Json measurement_to_json(const LocalMeasurement& m) {
    Json j;
    j["party"] = m.party;
    j["local_dim"] = m.local_dim;
    Json outcomes = Json::array();
    for (std::size_t k = 0; k < m.outcome_count(); ++k) {
        Json o;
        o["label"] = m.outcome_labels[k];
        const Matrix& op = m.operators[k];
        bool diagonal_projector = true;
        std::vector<int> indices;
        for (long i = 0; i < op.rows() && diagonal_projector; ++i)
            for (long l = 0; l < op.cols() && diagonal_projector; ++l) {
                if (i == l && std::abs(op(i, l) - Complex(1.0)) < 1e-15) indices.push_back(i);
                else if (std::abs(op(i, l)) >= 1e-15) diagonal_projector = false;
            }
        if (diagonal_projector)
            o["index_set"] = indices;
        else
            o["matrix"] = detail::matrix_to_json(op);
        outcomes.push_back(o);
    }
    j["outcomes"] = outcomes;
    return j;
}

inline LocalMeasurement measurement_from_json(const Json& j) {
    LocalMeasurement m;
    m.party = j.at("party").get<std::string>();
    m.local_dim = j.at("local_dim").get<int>();
    for (const auto& o : j.at("outcomes")) {
        m.outcome_labels.push_back(o.value("label", ""));
        if (o.contains("index_set")) {
            Matrix p = Matrix::Zero(m.local_dim, m.local_dim);
            for (int i : o.at("index_set").get<std::vector<int>>()) p(i, i) = 1.0;
            m.operators.push_back(p);
        } else {
            m.operators.push_back(detail::matrix_from_json(o.at("matrix")));
        }
    }
    m.validate();
    return m;
}

// --------------------------------------------------------------------------
// Protocol trees

inline Json protocol_node_to_json(const ProtocolNode& n) {
    if (n.terminal) return Json{{"terminal", true}};
    if (n.declare) return Json{{"declare", *n.declare}};
    Json j;
    j["measurement"] = measurement_to_json(*n.measurement);
    Json children = Json::array();
    for (const auto& c : n.children) children.push_back(protocol_node_to_json(c));
    j["children"] = children;
    return j;
}

inline ProtocolNode protocol_node_from_json(const Json& j) {
    if (j.value("terminal", false)) return terminal_leaf();
    if (j.contains("declare")) return declare_leaf(j.at("declare").get<std::string>());
    ProtocolNode n;
    n.measurement = measurement_from_json(j.at("measurement"));
    for (const auto& c : j.at("children")) n.children.push_back(protocol_node_from_json(c));
    return n;
}

inline Json protocol_to_json(const ProtocolTree& t) { return protocol_node_to_json(t.root); }

inline ProtocolTree protocol_from_json(const Json& j) {
    ProtocolTree t;
    t.root = protocol_node_from_json(j);
    t.root.validate();
    return t;
}

// --------------------------------------------------------------------------
// Verdicts

inline Json verdict_to_json(const Verdict& v, double tol, const SearchBudget& budget) {
    Json j;
    j["status"] = to_string(v.status);
    j["certificate"] = v.certificate;
    if (v.protocol) j["protocol"] = protocol_to_json(*v.protocol);
    j["tolerance"] = tol;
    j["budget"] = {{"restarts", budget.restarts},
                   {"iters", budget.iters},
                   {"max_rounds", budget.max_rounds}};
    j["seed"] = budget.seed;
    return j;
}

// --------------------------------------------------------------------------
// Files

inline Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NotFoundError("cannot open " + path);
    Json j;
    in >> j;
    return j;
}

inline void save_json(const Json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << j.dump(2) << "\n";
}

}  // namespace locc
