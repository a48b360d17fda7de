#ifndef FRAMEOPT_PROBLEM_IO_HPP
#define FRAMEOPT_PROBLEM_IO_HPP

#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "frameopt/design.hpp"
#include "frameopt/error.hpp"
#include "frameopt/model.hpp"
#include "frameopt/problem.hpp"

// JSON problem documents (schema_version 1). A document fully describes a
// Problem: model, design space, objective, constraints and optimizer config.
// Serialization uses ordered maps so a given Problem always produces the
// same bytes.

namespace frameopt {

using ProblemDocument = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

namespace io_detail {

using Json = nlohmann::ordered_json;

inline Json vec3(const Eigen::Vector3d& v) { return Json::array({v.x(), v.y(), v.z()}); }

inline Eigen::Vector3d to_vec3(const Json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 3)
        throw ConfigError("problem document: '" + what + "' must be an array of 3 numbers");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

// Accessor that rejects missing keys and surfaces where the problem is.
inline const Json& field(const Json& j, const std::string& key, const std::string& ctx) {
    auto it = j.find(key);
    if (it == j.end())
        throw ConfigError("problem document: missing '" + key + "' in " + ctx);
    return *it;
}

template <typename T>
T get(const Json& j, const std::string& key, const std::string& ctx) {
    try {
        return field(j, key, ctx).get<T>();
    } catch (const Json::exception& e) {
        throw ConfigError("problem document: bad '" + key + "' in " + ctx + ": " + e.what());
    }
}

template <typename T>
T get_or(const Json& j, const std::string& key, const T& fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    try {
        return it->get<T>();
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("problem document: bad '") + key + "': " + e.what());
    }
}

inline BindTarget parse_target(const std::string& s) {
    for (BindTarget t : {BindTarget::NodeX, BindTarget::NodeY, BindTarget::NodeZ,
                         BindTarget::Roll, BindTarget::Length, BindTarget::Area,
                         BindTarget::Iyy, BindTarget::Izz, BindTarget::Torsion})
        if (s == bind_target_name(t)) return t;
    throw ConfigError("problem document: unknown continuous target '" + s + "'");
}

inline SectionAttr parse_attr(const std::string& s) {
    for (SectionAttr a : {SectionAttr::Area, SectionAttr::Iyy, SectionAttr::Izz,
                          SectionAttr::Torsion, SectionAttr::Cy, SectionAttr::Cz})
        if (s == section_attr_name(a)) return a;
    throw ConfigError("problem document: unknown section attribute '" + s + "'");
}

inline const char* constraint_kind_name(Constraint::Kind k) {
    switch (k) {
        case Constraint::Kind::Stress: return "stress";
        case Constraint::Kind::Displacement: return "displacement";
        case Constraint::Kind::MinFrequency: return "min_frequency";
        case Constraint::Kind::Outward: return "outward";
    }
    return "?";
}

inline Constraint::Kind parse_constraint_kind(const std::string& s) {
    for (Constraint::Kind k : {Constraint::Kind::Stress, Constraint::Kind::Displacement,
                               Constraint::Kind::MinFrequency, Constraint::Kind::Outward})
        if (s == constraint_kind_name(k)) return k;
    throw ConfigError("problem document: unknown constraint kind '" + s + "'");
}

inline ObjectiveKind parse_objective(const std::string& s) {
    for (ObjectiveKind k : {ObjectiveKind::Mass, ObjectiveKind::Compliance,
                            ObjectiveKind::StrainEnergy, ObjectiveKind::Zero})
        if (s == objective_name(k)) return k;
    throw ConfigError("problem document: unknown objective '" + s + "'");
}

} // namespace io_detail

inline ProblemDocument problem_to_json(const Problem& p) {
    using io_detail::Json;
    using io_detail::vec3;

    Json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["name"] = p.name;

    Json model;
    Json nodes = Json::array();
    for (const Node& n : p.model.nodes) nodes.push_back(vec3(n.pos));
    model["nodes"] = std::move(nodes);

    Json materials = Json::array();
    for (const Material& m : p.model.materials) {
        Json j;
        j["name"] = m.name;
        j["youngs_modulus"] = m.youngs_modulus;
        j["poisson_ratio"] = m.poisson_ratio;
        j["density"] = m.density;
        j["yield_stress"] = m.yield_stress;
        materials.push_back(std::move(j));
    }
    model["materials"] = std::move(materials);

    Json sections = Json::array();
    for (const CrossSection& s : p.model.sections) {
        Json j;
        j["name"] = s.name;
        j["area"] = s.area;
        j["iyy"] = s.iyy;
        j["izz"] = s.izz;
        j["torsion"] = s.torsion_constant;
        j["cy"] = s.cy;
        j["cz"] = s.cz;
        sections.push_back(std::move(j));
    }
    model["sections"] = std::move(sections);

    Json elements = Json::array();
    for (const Element& e : p.model.elements) {
        Json j;
        j["kind"] = e.kind == ElementKind::Truss ? "truss" : "beam";
        j["nodes"] = Json::array({e.node_a, e.node_b});
        j["material"] = e.material;
        j["section"] = e.section;
        if (e.roll != 0.0) j["roll"] = e.roll;
        elements.push_back(std::move(j));
    }
    model["elements"] = std::move(elements);

    Json supports = Json::array();
    for (const Support& s : p.model.supports) {
        Json j;
        j["node"] = s.node;
        Json fixed = Json::array();
        for (bool b : s.fixed) fixed.push_back(b ? 1 : 0);
        j["fixed"] = std::move(fixed);
        bool any = false;
        for (double v : s.prescribed) any = any || v != 0.0;
        if (any) {
            Json pre = Json::array();
            for (double v : s.prescribed) pre.push_back(v);
            j["prescribed"] = std::move(pre);
        }
        supports.push_back(std::move(j));
    }
    model["supports"] = std::move(supports);

    Json cases = Json::array();
    for (const LoadCase& lc : p.model.load_cases) {
        Json j;
        j["name"] = lc.name;
        if (lc.gravity != Eigen::Vector3d::Zero()) j["gravity"] = vec3(lc.gravity);
        if (!lc.point_loads.empty()) {
            Json pls = Json::array();
            for (const PointLoad& pl : lc.point_loads) {
                Json jj;
                jj["node"] = pl.node;
                jj["force"] = vec3(pl.force);
                if (pl.moment != Eigen::Vector3d::Zero()) jj["moment"] = vec3(pl.moment);
                pls.push_back(std::move(jj));
            }
            j["point_loads"] = std::move(pls);
        }
        if (!lc.distributed.empty()) {
            Json dls = Json::array();
            for (const DistributedLoad& dl : lc.distributed) {
                Json jj;
                jj["element"] = dl.element;
                jj["force_per_length"] = vec3(dl.force_per_length);
                dls.push_back(std::move(jj));
            }
            j["distributed"] = std::move(dls);
        }
        cases.push_back(std::move(j));
    }
    model["load_cases"] = std::move(cases);
    doc["model"] = std::move(model);

    Json design;
    Json cont = Json::array();
    for (const ContinuousVar& v : p.space.continuous) {
        Json j;
        j["name"] = v.name;
        j["target"] = bind_target_name(v.target);
        if (bind_target_is_nodal(v.target)) {
            j["node"] = v.node;
        } else {
            j["elements"] = v.elements;
        }
        j["lower"] = v.lower;
        j["upper"] = v.upper;
        if (!std::isnan(v.initial)) j["initial"] = v.initial;
        cont.push_back(std::move(j));
    }
    design["continuous"] = std::move(cont);

    Json cats = Json::array();
    for (const CategoricalVar& v : p.space.categorical) {
        Json j;
        j["name"] = v.name;
        j["elements"] = v.elements;
        Json attrs = Json::array();
        for (SectionAttr a : v.attrs) attrs.push_back(section_attr_name(a));
        j["attrs"] = std::move(attrs);
        Json rows = Json::array();
        for (int r = 0; r < v.choices.rows(); ++r) {
            Json row = Json::array();
            for (int c = 0; c < v.choices.cols(); ++c) row.push_back(v.choices(r, c));
            rows.push_back(std::move(row));
        }
        j["choices"] = std::move(rows);
        if (!v.labels.empty()) j["labels"] = v.labels;
        cats.push_back(std::move(j));
    }
    design["categorical"] = std::move(cats);
    doc["design"] = std::move(design);

    doc["objective"] = objective_name(p.objective);

    Json cons = Json::array();
    for (const Constraint& c : p.constraints) {
        Json j;
        j["kind"] = io_detail::constraint_kind_name(c.kind);
        switch (c.kind) {
            case Constraint::Kind::Stress:
                j["element"] = c.element;
                j["load_case"] = c.load_case;
                j["limit"] = c.limit;
                break;
            case Constraint::Kind::Displacement:
                j["node"] = c.node;
                j["axis"] = c.axis;
                j["load_case"] = c.load_case;
                j["limit"] = c.limit;
                break;
            case Constraint::Kind::MinFrequency:
                j["limit"] = c.limit;
                break;
            case Constraint::Kind::Outward:
                j["node"] = c.node;
                j["axis"] = c.axis;
                j["load_case"] = c.load_case;
                j["ref"] = c.ref;
                break;
        }
        cons.push_back(std::move(j));
    }
    doc["constraints"] = std::move(cons);

    Json opt;
    opt["step_size"] = p.opt.step_size;
    opt["max_iterations"] = p.opt.max_iterations;
    opt["penalty_factor"] = p.opt.penalty_factor;
    Json anneal;
    anneal["initial"] = p.opt.anneal.initial_temp;
    anneal["decay"] = p.opt.anneal.decay;
    anneal["min"] = p.opt.anneal.min_temp;
    opt["anneal"] = std::move(anneal);
    opt["bilevel_outer"] = p.opt.bilevel_outer;
    opt["bilevel_inner"] = p.opt.bilevel_inner;
    opt["samples"] = p.opt.samples;
    opt["convergence_tol"] = p.opt.convergence_tol;
    opt["jacobian_temperature_scaling"] = p.opt.jacobian_temperature_scaling;
    doc["optimizer"] = std::move(opt);

    return doc;
}

inline Problem problem_from_json(const ProblemDocument& doc) {
    using io_detail::field;
    using io_detail::get;
    using io_detail::get_or;
    using io_detail::Json;
    using io_detail::to_vec3;

    if (!doc.is_object()) throw ConfigError("problem document: root must be an object");
    const int version = get<int>(doc, "schema_version", "root");
    if (version != kSchemaVersion)
        throw ConfigError("problem document: unsupported schema_version " +
                          std::to_string(version));

    Problem p;
    p.name = get_or<std::string>(doc, "name", "unnamed");

    const Json& jm = field(doc, "model", "root");

    int id = 0;
    for (const Json& jn : field(jm, "nodes", "model")) {
        Node n;
        n.id = ++id;
        n.pos = to_vec3(jn, "node");
        p.model.nodes.push_back(n);
    }

    for (const Json& jmat : field(jm, "materials", "model")) {
        Material m;
        m.name = get<std::string>(jmat, "name", "material");
        m.youngs_modulus = get<double>(jmat, "youngs_modulus", "material");
        m.poisson_ratio = get_or<double>(jmat, "poisson_ratio", 0.3);
        m.density = get_or<double>(jmat, "density", 0.0);
        m.yield_stress = get_or<double>(jmat, "yield_stress", 0.0);
        p.model.materials.push_back(m);
    }

    for (const Json& js : field(jm, "sections", "model")) {
        CrossSection s;
        s.name = get<std::string>(js, "name", "section");
        s.area = get<double>(js, "area", "section");
        s.iyy = get<double>(js, "iyy", "section");
        s.izz = get<double>(js, "izz", "section");
        s.torsion_constant = get<double>(js, "torsion", "section");
        s.cy = get<double>(js, "cy", "section");
        s.cz = get<double>(js, "cz", "section");
        p.model.sections.push_back(s);
    }

    id = 0;
    for (const Json& je : field(jm, "elements", "model")) {
        Element e;
        e.id = ++id;
        const std::string kind = get<std::string>(je, "kind", "element");
        if (kind == "truss") e.kind = ElementKind::Truss;
        else if (kind == "beam") e.kind = ElementKind::Beam;
        else throw ConfigError("problem document: unknown element kind '" + kind + "'");
        const Json& jn = field(je, "nodes", "element");
        if (!jn.is_array() || jn.size() != 2)
            throw ConfigError("problem document: element 'nodes' must hold 2 node ids");
        e.node_a = jn[0].get<int>();
        e.node_b = jn[1].get<int>();
        e.material = get<int>(je, "material", "element");
        e.section = get<int>(je, "section", "element");
        e.roll = get_or<double>(je, "roll", 0.0);
        p.model.elements.push_back(e);
    }

    for (const Json& js : field(jm, "supports", "model")) {
        Support s;
        s.node = get<int>(js, "node", "support");
        const Json& jf = field(js, "fixed", "support");
        if (!jf.is_array() || jf.size() != 6)
            throw ConfigError("problem document: support 'fixed' must hold 6 flags");
        for (int c = 0; c < 6; ++c) s.fixed[c] = jf[c].get<int>() != 0;
        if (js.contains("prescribed")) {
            const Json& jp = js["prescribed"];
            if (!jp.is_array() || jp.size() != 6)
                throw ConfigError("problem document: support 'prescribed' must hold 6 values");
            for (int c = 0; c < 6; ++c) s.prescribed[c] = jp[c].get<double>();
        }
        p.model.supports.push_back(s);
    }

    for (const Json& jc : field(jm, "load_cases", "model")) {
        LoadCase lc;
        lc.name = get_or<std::string>(jc, "name", "");
        if (jc.contains("gravity")) lc.gravity = to_vec3(jc["gravity"], "gravity");
        if (jc.contains("point_loads"))
            for (const Json& jl : jc["point_loads"]) {
                PointLoad pl;
                pl.node = get<int>(jl, "node", "point load");
                pl.force = to_vec3(field(jl, "force", "point load"), "force");
                if (jl.contains("moment")) pl.moment = to_vec3(jl["moment"], "moment");
                lc.point_loads.push_back(pl);
            }
        if (jc.contains("distributed"))
            for (const Json& jl : jc["distributed"]) {
                DistributedLoad dl;
                dl.element = get<int>(jl, "element", "distributed load");
                dl.force_per_length =
                    to_vec3(field(jl, "force_per_length", "distributed load"), "force_per_length");
                lc.distributed.push_back(dl);
            }
        p.model.load_cases.push_back(std::move(lc));
    }

    const Json& jd = field(doc, "design", "root");
    for (const Json& jv : field(jd, "continuous", "design")) {
        ContinuousVar v;
        v.name = get<std::string>(jv, "name", "continuous variable");
        v.target = io_detail::parse_target(get<std::string>(jv, "target", "continuous variable"));
        if (bind_target_is_nodal(v.target)) {
            v.node = get<int>(jv, "node", "continuous variable");
        } else {
            v.elements = get<std::vector<int>>(jv, "elements", "continuous variable");
        }
        v.lower = get<double>(jv, "lower", "continuous variable");
        v.upper = get<double>(jv, "upper", "continuous variable");
        if (jv.contains("initial")) v.initial = jv["initial"].get<double>();
        p.space.continuous.push_back(std::move(v));
    }
    for (const Json& jv : field(jd, "categorical", "design")) {
        CategoricalVar v;
        v.name = get<std::string>(jv, "name", "categorical variable");
        v.elements = get<std::vector<int>>(jv, "elements", "categorical variable");
        for (const Json& ja : field(jv, "attrs", "categorical variable"))
            v.attrs.push_back(io_detail::parse_attr(ja.get<std::string>()));
        const Json& jrows = field(jv, "choices", "categorical variable");
        if (!jrows.is_array() || jrows.size() != v.attrs.size())
            throw ConfigError("problem document: categorical '" + v.name +
                              "': 'choices' must hold one row per attribute");
        Eigen::Index cols = -1;
        for (const Json& jr : jrows) {
            if (!jr.is_array())
                throw ConfigError("problem document: categorical '" + v.name +
                                  "': choice rows must be arrays");
            if (cols < 0) cols = static_cast<Eigen::Index>(jr.size());
            else if (cols != static_cast<Eigen::Index>(jr.size()))
                throw ConfigError("problem document: categorical '" + v.name +
                                  "': ragged choice matrix");
        }
        v.choices.resize(static_cast<Eigen::Index>(v.attrs.size()), cols);
        for (Eigen::Index r = 0; r < v.choices.rows(); ++r)
            for (Eigen::Index c = 0; c < cols; ++c)
                v.choices(r, c) = jrows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]
                                      .get<double>();
        if (jv.contains("labels")) v.labels = jv["labels"].get<std::vector<std::string>>();
        p.space.categorical.push_back(std::move(v));
    }

    p.objective = io_detail::parse_objective(get<std::string>(doc, "objective", "root"));

    for (const Json& jc : field(doc, "constraints", "root")) {
        Constraint c;
        c.kind = io_detail::parse_constraint_kind(get<std::string>(jc, "kind", "constraint"));
        switch (c.kind) {
            case Constraint::Kind::Stress:
                c.element = get<int>(jc, "element", "stress constraint");
                c.load_case = get<int>(jc, "load_case", "stress constraint");
                c.limit = get<double>(jc, "limit", "stress constraint");
                break;
            case Constraint::Kind::Displacement:
                c.node = get<int>(jc, "node", "displacement constraint");
                c.axis = get<int>(jc, "axis", "displacement constraint");
                c.load_case = get<int>(jc, "load_case", "displacement constraint");
                c.limit = get<double>(jc, "limit", "displacement constraint");
                break;
            case Constraint::Kind::MinFrequency:
                c.limit = get<double>(jc, "limit", "frequency constraint");
                break;
            case Constraint::Kind::Outward:
                c.node = get<int>(jc, "node", "outward constraint");
                c.axis = get<int>(jc, "axis", "outward constraint");
                c.load_case = get<int>(jc, "load_case", "outward constraint");
                c.ref = get<double>(jc, "ref", "outward constraint");
                break;
        }
        p.constraints.push_back(c);
    }

    if (doc.contains("optimizer")) {
        const Json& jo = doc["optimizer"];
        OptimizerConfig& o = p.opt;
        o.step_size = get_or<double>(jo, "step_size", o.step_size);
        o.max_iterations = get_or<int>(jo, "max_iterations", o.max_iterations);
        o.penalty_factor = get_or<double>(jo, "penalty_factor", o.penalty_factor);
        if (jo.contains("anneal")) {
            const Json& ja = jo["anneal"];
            o.anneal.initial_temp = get_or<double>(ja, "initial", o.anneal.initial_temp);
            o.anneal.decay = get_or<double>(ja, "decay", o.anneal.decay);
            o.anneal.min_temp = get_or<double>(ja, "min", o.anneal.min_temp);
        }
        o.bilevel_outer = get_or<int>(jo, "bilevel_outer", o.bilevel_outer);
        o.bilevel_inner = get_or<int>(jo, "bilevel_inner", o.bilevel_inner);
        o.samples = get_or<int>(jo, "samples", o.samples);
        o.convergence_tol = get_or<double>(jo, "convergence_tol", o.convergence_tol);
        o.jacobian_temperature_scaling =
            get_or<bool>(jo, "jacobian_temperature_scaling", o.jacobian_temperature_scaling);
    }

    p.validate();
    return p;
}

inline Problem load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open problem file '" + path + "'");
    ProblemDocument doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("problem file '" + path + "': invalid JSON: " + e.what());
    }
    return problem_from_json(doc);
}

inline void save_problem(const Problem& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write problem file '" + path + "'");
    out << problem_to_json(p).dump(2) << '\n';
    if (!out) throw IoError("failed writing problem file '" + path + "'");
}

} // namespace frameopt

#endif
