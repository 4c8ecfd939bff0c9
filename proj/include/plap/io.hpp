#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "plap/compare.hpp"
#include "plap/core.hpp"
#include "plap/errors.hpp"
#include "plap/field.hpp"
#include "plap/problem.hpp"
#include "plap/verify.hpp"

namespace plap {

using nlohmann::json;

// -------------------------- field specs --------------------------

inline json field_to_json(const ScalarField& f) {
    json j;
    switch (f.kind()) {
        case ScalarField::Kind::constant:
            j["kind"] = "const";
            j["value"] = f.constant_value();
            break;
        case ScalarField::Kind::expression:
            j["kind"] = "expr";
            j["expr"] = f.expr_source();
            if (!f.deriv_source().empty()) j["derivative"] = f.deriv_source();
            break;
        case ScalarField::Kind::piecewise: {
            j["kind"] = "piecewise";
            json pieces = json::array();
            for (const auto& pc : f.pieces()) {
                json pj;
                pj["from"] = pc.lo;
                pj["to"] = pc.hi;
                pj["expr"] = pc.value_src;
                if (!pc.deriv_src.empty()) pj["derivative"] = pc.deriv_src;
                pieces.push_back(pj);
            }
            j["pieces"] = pieces;
            break;
        }
        case ScalarField::Kind::table:
            j["kind"] = "table";
            j["x"] = f.table_x();
            j["y"] = f.table_y();
            break;
        case ScalarField::Kind::native:
            throw BadInput("field_to_json: closed-form native field '" + f.label() +
                           "' has no JSON form; emit a table instead");
    }
    return j;
}

inline ScalarField field_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw BadInput("fieldspec: expected an object with a 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "const") return ScalarField::constant(j.at("value").get<double>());
    if (kind == "expr")
        return ScalarField::expression(j.at("expr").get<std::string>(),
                                       j.value("derivative", std::string{}));
    if (kind == "piecewise") {
        std::vector<ScalarField::Piece> pieces;
        for (const auto& pj : j.at("pieces")) {
            ScalarField::Piece pc;
            pc.lo = pj.at("from").get<double>();
            pc.hi = pj.at("to").get<double>();
            pc.value_src = pj.at("expr").get<std::string>();
            pc.value = parse_expression(pc.value_src);
            if (pj.contains("derivative")) {
                pc.deriv_src = pj.at("derivative").get<std::string>();
                pc.deriv = parse_expression(pc.deriv_src);
            }
            pieces.push_back(pc);
        }
        return ScalarField::piecewise(std::move(pieces));
    }
    if (kind == "table")
        return ScalarField::table(j.at("x").get<std::vector<double>>(),
                                  j.at("y").get<std::vector<double>>());
    throw BadInput("fieldspec: unknown kind '" + kind + "'");
}

// -------------------------- problem instances --------------------------

inline json reaction_to_json(const ReactionField& phi) {
    json j;
    switch (phi.kind()) {
        case ReactionField::Kind::zero: j["kind"] = "zero"; break;
        case ReactionField::Kind::linear:
            j["kind"] = "linear";
            j["lambda"] = phi.lambda();
            break;
        case ReactionField::Kind::power:
            j["kind"] = "power";
            j["lambda"] = phi.lambda();
            break;
        case ReactionField::Kind::custom:
            throw BadInput("reaction_to_json: custom reactions have no JSON form");
    }
    return j;
}

inline ReactionField reaction_from_json(const json& j, double p) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero") return ReactionField::zero();
    if (kind == "linear") return ReactionField::linear(j.at("lambda").get<double>());
    if (kind == "power") return ReactionField::power(j.at("lambda").get<double>(), p);
    throw BadInput("reaction: unknown kind '" + kind + "'");
}

inline json instance_to_json(const ProblemInstance& inst) {
    json j;
    j["p"] = inst.p.value();
    j["b"] = field_to_json(inst.b);
    j["phi"] = reaction_to_json(inst.phi);
    j["f"] = field_to_json(inst.f);
    j["bc"] = {inst.bc_left, inst.bc_right};
    return j;
}

inline ProblemInstance instance_from_json(const json& j) {
    ProblemInstance inst;
    inst.p = Exponent(j.at("p").get<double>());
    inst.b = j.contains("b") ? field_from_json(j.at("b")) : ScalarField::constant(0.0);
    inst.phi = j.contains("phi") ? reaction_from_json(j.at("phi"), inst.p.value())
                                 : ReactionField::zero();
    inst.f = j.contains("f") ? field_from_json(j.at("f")) : ScalarField::constant(0.0);
    if (j.contains("bc")) {
        const auto bc = j.at("bc").get<std::vector<double>>();
        if (bc.size() != 2) throw BadInput("instance: bc must be [left, right]");
        inst.bc_left = bc[0];
        inst.bc_right = bc[1];
    }
    inst.validate();
    return inst;
}

inline ProblemInstance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BadInput("cannot open instance file: " + path);
    json j;
    in >> j;
    return instance_from_json(j);
}

inline ScalarField load_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BadInput("cannot open field file: " + path);
    json j;
    in >> j;
    // Accept either a bare fieldspec or an instance-like {"f": fieldspec}.
    if (j.contains("kind")) return field_from_json(j);
    if (j.contains("f")) return field_from_json(j.at("f"));
    throw BadInput("field file must hold a fieldspec or an object with key 'f': " + path);
}

// -------------------------- policies, verdicts, reports --------------------------

inline json policy_to_json(const NumericPolicy& p) {
    return json{{"grid_n", p.grid_n},
                {"tol_solve", p.tol_solve},
                {"tol_contact", p.tol_contact},
                {"tol_residual", p.tol_residual},
                {"quadrature_order", p.quadrature_order}};
}

inline NumericPolicy policy_from_json(const json& j) {
    NumericPolicy p;
    p.grid_n = j.value("grid_n", p.grid_n);
    p.tol_solve = j.value("tol_solve", p.tol_solve);
    p.tol_contact = j.value("tol_contact", p.tol_contact);
    p.tol_residual = j.value("tol_residual", p.tol_residual);
    p.quadrature_order = j.value("quadrature_order", p.quadrature_order);
    p.validate();
    return p;
}

inline json intervals_to_json(const std::vector<Interval>& iv) {
    json arr = json::array();
    for (const auto& i : iv) arr.push_back({i.lo, i.hi});
    return arr;
}

inline json verdict_to_json(const ComparisonVerdict& v) {
    json contacts = json::array();
    for (const auto& c : v.contact_points)
        contacts.push_back(
            {{"x0", c.x0}, {"u", c.u_val}, {"du_u", c.du_u}, {"du_v", c.du_v}});
    return json{{"wcp_holds", v.wcp_holds},
                {"min_gap", v.min_gap},
                {"P1", intervals_to_json(v.P1_intervals)},
                {"P0", intervals_to_json(v.P0_intervals)},
                {"contact_points", contacts},
                {"boundary",
                 {{"du_u_left", v.du_u_left},
                  {"du_v_left", v.du_v_left},
                  {"du_u_right", v.du_u_right},
                  {"du_v_right", v.du_v_right}}},
                {"hopf_ordering_holds", v.hopf_ordering_holds},
                {"dichotomy", to_string(v.dichotomy)},
                {"contact_tol_abs", v.contact_tol_abs},
                {"policy", policy_to_json(v.tolerances_used)}};
}

inline json theta_report_to_json(const ThetaCounterexampleReport& r) {
    return json{{"family", "theta"},
                {"degenerate", r.degenerate},
                {"source_gap_ok", r.source_gap_ok},
                {"source_gap_min", r.source_gap_min},
                {"source_probes", r.source_probes},
                {"wcp_ok", r.wcp_ok},
                {"solution_gap_min", r.solution_gap_min},
                {"gap_at_zero", r.gap_at_zero},
                {"scp_fails_at_zero", r.scp_fails_at_zero},
                {"pass", r.pass}};
}

inline json plateau_report_to_json(const PlateauCounterexampleReport& r) {
    return json{{"family", "girg"},
                {"x_s", r.x_s},
                {"b0", r.b0},
                {"residual_u", r.residual_u},
                {"residual_v", r.residual_v},
                {"residual_tol", r.residual_tol},
                {"residuals_ok", r.residuals_ok},
                {"sources_ordered", r.sources_ordered},
                {"contact_set_ok", r.contact_set_ok},
                {"p1_left_end", r.p1_left_end},
                {"contact_du_u", r.contact_du_u},
                {"contact_du_v", r.contact_du_v},
                {"contact_derivatives_ok", r.contact_derivatives_ok},
                {"alt1_ok", r.alt1_ok},
                {"structure", to_string(r.structure)},
                {"structure_ok", r.structure_ok},
                {"pass", r.pass}};
}

inline void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw BadInput("cannot open output file: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace plap
