#ifndef FRAMEOPT_MODEL_HPP
#define FRAMEOPT_MODEL_HPP

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "frameopt/error.hpp"

// Immutable structural model: nodes, materials, cross sections, truss/beam
// elements, supports and load cases. Design variables never mutate a
// FrameModel; they act through a ModelState overlay built per evaluation.

namespace frameopt {

struct Material {
    std::string name;
    double youngs_modulus = 0.0;
    double poisson_ratio = 0.3;
    double density = 0.0;
    double yield_stress = 0.0;

    double shear_modulus() const { return youngs_modulus / (2.0 * (1.0 + poisson_ratio)); }
};

// cy / cz are the extreme fiber distances along the local y / z axes used in
// stress recovery.
struct CrossSection {
    std::string name;
    double area = 0.0;
    double iyy = 0.0;
    double izz = 0.0;
    double torsion_constant = 0.0;
    double cy = 0.0;
    double cz = 0.0;
};

struct Node {
    int id = 0;
    Eigen::Vector3d pos = Eigen::Vector3d::Zero();
};

enum class ElementKind { Truss, Beam };

struct Element {
    int id = 0;
    ElementKind kind = ElementKind::Truss;
    int node_a = 0; // node ids (1-based)
    int node_b = 0;
    int material = 0; // index into FrameModel::materials
    int section = 0;  // index into FrameModel::sections
    double roll = 0.0;
};

struct Support {
    int node = 0;                      // node id
    std::array<bool, 6> fixed{};       // ux,uy,uz,rx,ry,rz
    std::array<double, 6> prescribed{}; // imposed value where fixed
};

struct PointLoad {
    int node = 0;
    Eigen::Vector3d force = Eigen::Vector3d::Zero();
    Eigen::Vector3d moment = Eigen::Vector3d::Zero();
};

struct DistributedLoad {
    int element = 0;                                 // element id
    Eigen::Vector3d force_per_length = Eigen::Vector3d::Zero(); // global frame
};

struct LoadCase {
    std::string name;
    std::vector<PointLoad> point_loads;
    std::vector<DistributedLoad> distributed;
    Eigen::Vector3d gravity = Eigen::Vector3d::Zero();
};

struct FrameModel {
    std::string name;
    std::vector<Node> nodes;
    std::vector<Material> materials;
    std::vector<CrossSection> sections;
    std::vector<Element> elements;
    std::vector<Support> supports;
    std::vector<LoadCase> load_cases;

    int node_index(int id) const {
        if (id < 1 || id > static_cast<int>(nodes.size()))
            throw ModelError("unknown node id " + std::to_string(id));
        return id - 1;
    }
    int element_index(int id) const {
        if (id < 1 || id > static_cast<int>(elements.size()))
            throw ModelError("unknown element id " + std::to_string(id));
        return id - 1;
    }

    void validate() const;
};

// Effective per-element properties after design variables are applied.
struct ElementState {
    double area = 0.0, iyy = 0.0, izz = 0.0, torsion = 0.0, cy = 0.0, cz = 0.0;
    double roll = 0.0;
    double length = -1.0; // <= 0: use the geometric node distance
};

struct ModelState {
    std::vector<Eigen::Vector3d> pos; // per node, same order as FrameModel::nodes
    std::vector<ElementState> elem;   // per element
};

inline ModelState base_state(const FrameModel& m) {
    ModelState s;
    s.pos.reserve(m.nodes.size());
    for (const Node& n : m.nodes) s.pos.push_back(n.pos);
    s.elem.reserve(m.elements.size());
    for (const Element& e : m.elements) {
        const CrossSection& cs = m.sections[e.section];
        ElementState es;
        es.area = cs.area;
        es.iyy = cs.iyy;
        es.izz = cs.izz;
        es.torsion = cs.torsion_constant;
        es.cy = cs.cy;
        es.cz = cs.cz;
        es.roll = e.roll;
        es.length = -1.0;
        s.elem.push_back(es);
    }
    return s;
}

inline double natural_length(const ModelState& s, const Element& e, const FrameModel& m) {
    return (s.pos[m.node_index(e.node_b)] - s.pos[m.node_index(e.node_a)]).norm();
}

inline void FrameModel::validate() const {
    if (nodes.empty()) throw ModelError("model has no nodes");
    if (elements.empty()) throw ModelError("model has no elements");
    if (materials.empty()) throw ModelError("model has no materials");
    if (sections.empty()) throw ModelError("model has no sections");
    if (load_cases.empty()) throw ModelError("model has no load cases");

    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].id != static_cast<int>(i) + 1)
            throw ModelError("node ids must be contiguous from 1");
    for (std::size_t i = 0; i < elements.size(); ++i)
        if (elements[i].id != static_cast<int>(i) + 1)
            throw ModelError("element ids must be contiguous from 1");

    for (const Material& mat : materials) {
        if (!(mat.youngs_modulus > 0.0))
            throw ModelError("material '" + mat.name + "': Young's modulus must be positive");
        if (!(mat.density >= 0.0))
            throw ModelError("material '" + mat.name + "': density must be non-negative");
        if (!(mat.poisson_ratio > -1.0 && mat.poisson_ratio < 0.5))
            throw ModelError("material '" + mat.name + "': Poisson ratio outside (-1, 0.5)");
    }
    for (const CrossSection& cs : sections) {
        if (!(cs.area > 0.0 && cs.iyy > 0.0 && cs.izz > 0.0 && cs.torsion_constant > 0.0 &&
              cs.cy > 0.0 && cs.cz > 0.0))
            throw ModelError("section '" + cs.name + "': attributes must be strictly positive");
    }

    std::vector<int> touched(nodes.size(), 0);
    for (const Element& e : elements) {
        if (e.node_a == e.node_b)
            throw ModelError("element " + std::to_string(e.id) + " connects a node to itself");
        const int a = node_index(e.node_a), b = node_index(e.node_b);
        touched[a]++;
        touched[b]++;
        if (e.material < 0 || e.material >= static_cast<int>(materials.size()))
            throw ModelError("element " + std::to_string(e.id) + ": bad material reference");
        if (e.section < 0 || e.section >= static_cast<int>(sections.size()))
            throw ModelError("element " + std::to_string(e.id) + ": bad section reference");
        if ((nodes[b].pos - nodes[a].pos).norm() < 1e-12)
            throw ModelError("element " + std::to_string(e.id) + " has zero length");
    }
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (touched[i] == 0)
            throw ModelError("node " + std::to_string(i + 1) + " is not connected to any element");

    std::vector<bool> supported(nodes.size(), false);
    for (const Support& s : supports) {
        const int n = node_index(s.node);
        if (supported[n]) throw ModelError("duplicate support on node " + std::to_string(s.node));
        supported[n] = true;
        for (int c = 0; c < 6; ++c)
            if (!s.fixed[c] && s.prescribed[c] != 0.0)
                throw ModelError("support on node " + std::to_string(s.node) +
                                 " prescribes a value on a free component");
    }

    for (const LoadCase& lc : load_cases) {
        for (const PointLoad& pl : lc.point_loads) node_index(pl.node);
        for (const DistributedLoad& dl : lc.distributed) element_index(dl.element);
    }
}

} // namespace frameopt

#endif
