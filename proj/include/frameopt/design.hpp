#ifndef FRAMEOPT_DESIGN_HPP
#define FRAMEOPT_DESIGN_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "frameopt/error.hpp"
#include "frameopt/model.hpp"

// Design parameterization: continuous variables bind a scalar to model
// quantities (a node coordinate, or a shared property of a set of elements);
// categorical variables select one column of an attribute matrix and write
// the chosen attribute values onto a set of elements.

namespace frameopt {

enum class BindTarget { NodeX, NodeY, NodeZ, Roll, Length, Area, Iyy, Izz, Torsion };

inline const char* bind_target_name(BindTarget t) {
    switch (t) {
        case BindTarget::NodeX: return "node_x";
        case BindTarget::NodeY: return "node_y";
        case BindTarget::NodeZ: return "node_z";
        case BindTarget::Roll: return "roll";
        case BindTarget::Length: return "length";
        case BindTarget::Area: return "area";
        case BindTarget::Iyy: return "iyy";
        case BindTarget::Izz: return "izz";
        case BindTarget::Torsion: return "torsion";
    }
    return "?";
}

inline bool bind_target_is_nodal(BindTarget t) {
    return t == BindTarget::NodeX || t == BindTarget::NodeY || t == BindTarget::NodeZ;
}

struct ContinuousVar {
    std::string name;
    BindTarget target = BindTarget::Area;
    int node = 0;               // node id (nodal targets only)
    std::vector<int> elements;  // element ids (element targets only)
    double lower = 0.0;
    double upper = 1.0;
    // Absolute starting value; NaN (the default) means the bound midpoint.
    double initial = std::numeric_limits<double>::quiet_NaN();
};

// Section attributes a categorical choice can set.
enum class SectionAttr { Area, Iyy, Izz, Torsion, Cy, Cz };

inline const char* section_attr_name(SectionAttr a) {
    switch (a) {
        case SectionAttr::Area: return "area";
        case SectionAttr::Iyy: return "iyy";
        case SectionAttr::Izz: return "izz";
        case SectionAttr::Torsion: return "torsion";
        case SectionAttr::Cy: return "cy";
        case SectionAttr::Cz: return "cz";
    }
    return "?";
}

struct CategoricalVar {
    std::string name;
    std::vector<int> elements;       // element ids receiving the chosen attributes
    std::vector<SectionAttr> attrs;  // one per row of `choices`
    Eigen::MatrixXd choices;         // attrs.size() x n_choices
    std::vector<std::string> labels; // optional, per choice

    int n_choices() const { return static_cast<int>(choices.cols()); }

    // Attribute column for choice j.
    Eigen::VectorXd attr_values(int j) const { return choices.col(j); }

    // Relaxed attribute values: choices * weights.
    Eigen::VectorXd blend(const Eigen::VectorXd& weights) const { return choices * weights; }
};

struct DesignSpace {
    std::vector<ContinuousVar> continuous;
    std::vector<CategoricalVar> categorical;

    int n_continuous() const { return static_cast<int>(continuous.size()); }
    int n_categorical() const { return static_cast<int>(categorical.size()); }

    Eigen::VectorXd lower_bounds() const {
        Eigen::VectorXd lb(n_continuous());
        for (int i = 0; i < n_continuous(); ++i) lb(i) = continuous[i].lower;
        return lb;
    }
    Eigen::VectorXd upper_bounds() const {
        Eigen::VectorXd ub(n_continuous());
        for (int i = 0; i < n_continuous(); ++i) ub(i) = continuous[i].upper;
        return ub;
    }
    Eigen::VectorXd initial_values() const {
        Eigen::VectorXd x(n_continuous());
        for (int i = 0; i < n_continuous(); ++i) {
            const ContinuousVar& v = continuous[i];
            x(i) = std::isnan(v.initial) ? 0.5 * (v.lower + v.upper)
                                         : std::min(std::max(v.initial, v.lower), v.upper);
        }
        return x;
    }

    void validate(const FrameModel& m) const {
        // Each bound quantity must have exactly one owner, otherwise the
        // later write silently wins and gradients would disagree.
        std::map<std::pair<int, int>, std::string> owner;  // (entity id, slot) -> var
        auto claim = [&owner](int id, int slot, const std::string& name) {
            auto [it, fresh] = owner.emplace(std::make_pair(id, slot), name);
            if (!fresh)
                throw ConfigError("variables '" + it->second + "' and '" + name +
                                  "' bind the same quantity");
        };
        for (const ContinuousVar& v : continuous) {
            if (!(v.lower < v.upper))
                throw ConfigError("variable '" + v.name + "': lower bound must be below upper bound");
            if (bind_target_is_nodal(v.target)) {
                m.node_index(v.node);
                if (!v.elements.empty())
                    throw ConfigError("variable '" + v.name + "': nodal target takes no element list");
                claim(v.node, 100 + static_cast<int>(v.target), v.name);
            } else {
                if (v.elements.empty())
                    throw ConfigError("variable '" + v.name + "': element target needs elements");
                for (int id : v.elements) {
                    m.element_index(id);
                    claim(id, static_cast<int>(v.target), v.name);
                }
            }
            if (v.target == BindTarget::Length && v.lower <= 0.0)
                throw ConfigError("variable '" + v.name + "': length must stay positive");
            if ((v.target == BindTarget::Area || v.target == BindTarget::Iyy ||
                 v.target == BindTarget::Izz || v.target == BindTarget::Torsion) &&
                v.lower <= 0.0)
                throw ConfigError("variable '" + v.name + "': section property must stay positive");
        }
        for (const CategoricalVar& c : categorical) {
            if (c.elements.empty())
                throw ConfigError("choice '" + c.name + "': needs elements");
            for (int id : c.elements) m.element_index(id);
            if (c.attrs.empty()) throw ConfigError("choice '" + c.name + "': needs attributes");
            if (c.choices.rows() != static_cast<Eigen::Index>(c.attrs.size()))
                throw ConfigError("choice '" + c.name + "': attribute matrix row count mismatch");
            if (c.choices.cols() < 2)
                throw ConfigError("choice '" + c.name + "': needs at least two options");
            if (!c.labels.empty() && c.labels.size() != static_cast<std::size_t>(c.choices.cols()))
                throw ConfigError("choice '" + c.name + "': label count mismatch");
            if ((c.choices.array() <= 0.0).any())
                throw ConfigError("choice '" + c.name + "': attribute values must be positive");
            for (SectionAttr attr : c.attrs) {
                // Share slot codes with the continuous element targets so a
                // categorical area clashes with a continuous area variable.
                int slot = 0;
                switch (attr) {
                    case SectionAttr::Area: slot = static_cast<int>(BindTarget::Area); break;
                    case SectionAttr::Iyy: slot = static_cast<int>(BindTarget::Iyy); break;
                    case SectionAttr::Izz: slot = static_cast<int>(BindTarget::Izz); break;
                    case SectionAttr::Torsion: slot = static_cast<int>(BindTarget::Torsion); break;
                    case SectionAttr::Cy: slot = 20; break;
                    case SectionAttr::Cz: slot = 21; break;
                }
                for (int id : c.elements) claim(id, slot, c.name);
            }
        }
    }
};

inline void set_element_attr(ElementState& es, SectionAttr a, double v) {
    switch (a) {
        case SectionAttr::Area: es.area = v; break;
        case SectionAttr::Iyy: es.iyy = v; break;
        case SectionAttr::Izz: es.izz = v; break;
        case SectionAttr::Torsion: es.torsion = v; break;
        case SectionAttr::Cy: es.cy = v; break;
        case SectionAttr::Cz: es.cz = v; break;
    }
}

inline double get_element_attr(const ElementState& es, SectionAttr a) {
    switch (a) {
        case SectionAttr::Area: return es.area;
        case SectionAttr::Iyy: return es.iyy;
        case SectionAttr::Izz: return es.izz;
        case SectionAttr::Torsion: return es.torsion;
        case SectionAttr::Cy: return es.cy;
        case SectionAttr::Cz: return es.cz;
    }
    return 0.0;
}

inline void apply_continuous_var(const FrameModel& m, ModelState& s, const ContinuousVar& v,
                                 double value) {
    switch (v.target) {
        case BindTarget::NodeX: s.pos[m.node_index(v.node)](0) = value; return;
        case BindTarget::NodeY: s.pos[m.node_index(v.node)](1) = value; return;
        case BindTarget::NodeZ: s.pos[m.node_index(v.node)](2) = value; return;
        default: break;
    }
    for (int id : v.elements) {
        ElementState& es = s.elem[m.element_index(id)];
        switch (v.target) {
            case BindTarget::Roll: es.roll = value; break;
            case BindTarget::Length: es.length = value; break;
            case BindTarget::Area: es.area = value; break;
            case BindTarget::Iyy: es.iyy = value; break;
            case BindTarget::Izz: es.izz = value; break;
            case BindTarget::Torsion: es.torsion = value; break;
            default: break;
        }
    }
}

inline void apply_categorical_var(const FrameModel& m, ModelState& s, const CategoricalVar& c,
                                  const Eigen::VectorXd& attr_values) {
    if (attr_values.size() != static_cast<Eigen::Index>(c.attrs.size()))
        throw ConfigError("choice '" + c.name + "': attribute vector size mismatch");
    for (int id : c.elements) {
        ElementState& es = s.elem[m.element_index(id)];
        for (std::size_t r = 0; r < c.attrs.size(); ++r)
            set_element_attr(es, c.attrs[r], attr_values(static_cast<Eigen::Index>(r)));
    }
}

// Build the model state for given continuous values (absolute units) and one
// attribute vector per categorical variable. Categorical attributes are
// applied first so a continuous variable targeting the same element property
// acts as the final override.
inline ModelState apply_design(const FrameModel& m, const DesignSpace& space,
                               const Eigen::VectorXd& x,
                               const std::vector<Eigen::VectorXd>& attrs) {
    if (x.size() != space.n_continuous())
        throw ConfigError("continuous value count does not match design space");
    if (attrs.size() != static_cast<std::size_t>(space.n_categorical()))
        throw ConfigError("categorical value count does not match design space");
    ModelState s = base_state(m);
    for (int mcat = 0; mcat < space.n_categorical(); ++mcat)
        apply_categorical_var(m, s, space.categorical[mcat], attrs[mcat]);
    for (int i = 0; i < space.n_continuous(); ++i)
        apply_continuous_var(m, s, space.continuous[i], x(i));
    return s;
}

} // namespace frameopt

#endif
