#ifndef FRAMEOPT_BUILTINS_HPP
#define FRAMEOPT_BUILTINS_HPP

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "frameopt/error.hpp"
#include "frameopt/model.hpp"
#include "frameopt/problem.hpp"
#include "frameopt/section.hpp"

// Built-in benchmark problems:
//   - truss72: the classic 72-bar space truss sizing benchmark (imperial units)
//   - lattice: a face-centered cubic-cell beam lattice stretched along Z with
//     non-shrinkage constraints on its mid-plane boundary nodes
//   - bridge: a Pratt-style truss-framed deck bridge under floor load + gravity
// Each generator is a pure function of its arguments.

namespace frameopt {

namespace builtins_detail {

// 64-entry discrete area catalog (in^2) used by the 72-bar benchmark.
inline const std::vector<double>& truss72_catalog() {
    static const std::vector<double> areas = {
        0.111, 0.141, 0.196, 0.250, 0.307, 0.391, 0.442, 0.563, 0.602, 0.766, 0.785,
        0.994, 1.000, 1.228, 1.266, 1.457, 1.563, 1.620, 1.800, 1.990, 2.130, 2.380,
        2.620, 2.630, 2.880, 2.930, 3.090, 3.130, 3.380, 3.470, 3.550, 3.630, 3.840,
        3.870, 3.880, 4.180, 4.220, 4.490, 4.590, 4.800, 4.970, 5.120, 5.740, 7.220,
        7.970, 8.530, 9.300, 10.85, 11.50, 13.50, 13.90, 14.20, 15.50, 16.00, 16.90,
        18.80, 19.90, 22.00, 22.90, 24.50, 26.50, 28.00, 30.00, 33.50};
    return areas;
}

inline std::string num_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

} // namespace builtins_detail

// The classic 72-bar space truss: 120x120 in plan, four 60 in stories, nodes
// 1-4 on top, supports at the base. Mass minimization over 16 symmetry groups
// with a 64-entry discrete area catalog; stress and top-node displacement
// limits under two load cases.
inline Problem generate_truss72() {
    Problem p;
    p.name = "truss72";
    FrameModel& m = p.model;
    m.name = p.name;

    const double plan = 120.0;   // in
    const double story = 60.0;   // in
    const int stories = 4;

    // Ring r (top to bottom): nodes 4r+1..4r+4 at z = 240 - 60 r.
    const double corners[4][2] = {{0.0, 0.0}, {plan, 0.0}, {plan, plan}, {0.0, plan}};
    for (int r = 0; r <= stories; ++r)
        for (int c = 0; c < 4; ++c) {
            Node n;
            n.id = 4 * r + c + 1;
            n.pos = {corners[c][0], corners[c][1], story * (stories - r)};
            m.nodes.push_back(n);
        }

    Material alu;
    alu.name = "aluminum";
    alu.youngs_modulus = 1e7;  // psi
    alu.poisson_ratio = 0.33;
    alu.density = 0.1;         // lb/in^3
    alu.yield_stress = 25000;  // psi
    m.materials.push_back(alu);

    CrossSection base;
    base.name = "bar";
    base.area = builtins_detail::truss72_catalog().front();
    base.iyy = base.izz = base.torsion_constant = 1.0;  // unused by truss members
    base.cy = base.cz = 1.0;
    m.sections.push_back(base);

    auto add_bar = [&m](int a, int b) {
        Element e;
        e.id = static_cast<int>(m.elements.size()) + 1;
        e.kind = ElementKind::Truss;
        e.node_a = a;
        e.node_b = b;
        m.elements.push_back(e);
    };

    // Each story contributes 18 members split into the four classic groups:
    // verticals, face diagonals, top-ring horizontals, top-ring plan
    // diagonals.
    for (int s = 0; s < stories; ++s) {
        auto top = [s](int c) { return 4 * s + c + 1; };
        auto bot = [s](int c) { return 4 * (s + 1) + c + 1; };
        for (int c = 0; c < 4; ++c) add_bar(top(c), bot(c));
        for (int c = 0; c < 4; ++c) {
            const int d = (c + 1) % 4;
            add_bar(top(c), bot(d));
            add_bar(top(d), bot(c));
        }
        for (int c = 0; c < 4; ++c) add_bar(top(c), top((c + 1) % 4));
        add_bar(top(0), top(2));
        add_bar(top(1), top(3));
    }

    for (int c = 0; c < 4; ++c) {
        Support s;
        s.node = 4 * stories + c + 1;
        s.fixed = {true, true, true, false, false, false};
        m.supports.push_back(s);
    }

    {
        // Classic Fox-Schmit corner load. The benchmark's published optima put
        // the X/Y drift of node 1 exactly at the 0.25 in limit under this load;
        // dropping the vertical component would leave them ~30% infeasible.
        LoadCase lc;
        lc.name = "lateral";
        PointLoad pl;
        pl.node = 1;
        pl.force = {5000.0, 5000.0, -5000.0};
        lc.point_loads.push_back(pl);
        m.load_cases.push_back(lc);
    }
    {
        LoadCase lc;
        lc.name = "vertical";
        for (int n = 1; n <= 4; ++n) {
            PointLoad pl;
            pl.node = n;
            pl.force = {0.0, 0.0, -5000.0};
            lc.point_loads.push_back(pl);
        }
        m.load_cases.push_back(lc);
    }

    // 16 symmetry groups: per story (top to bottom) verticals, diagonals,
    // horizontals, plan diagonals.
    const std::vector<double>& catalog = builtins_detail::truss72_catalog();
    Eigen::MatrixXd choices(1, static_cast<Eigen::Index>(catalog.size()));
    std::vector<std::string> labels;
    for (std::size_t j = 0; j < catalog.size(); ++j) {
        choices(0, static_cast<Eigen::Index>(j)) = catalog[j];
        labels.push_back(builtins_detail::num_label(catalog[j]));
    }
    const int group_sizes[4] = {4, 8, 4, 2};
    int next_id = 1;
    for (int s = 0; s < stories; ++s)
        for (int gpart = 0; gpart < 4; ++gpart) {
            CategoricalVar v;
            const int g = 4 * s + gpart + 1;
            v.name = (g < 10 ? "group_0" : "group_") + std::to_string(g);
            for (int k = 0; k < group_sizes[gpart]; ++k) v.elements.push_back(next_id++);
            v.attrs = {SectionAttr::Area};
            v.choices = choices;
            v.labels = labels;
            p.space.categorical.push_back(std::move(v));
        }

    p.objective = ObjectiveKind::Mass;

    for (int lc = 0; lc < 2; ++lc)
        for (int e = 1; e <= 18 * stories; ++e) {
            Constraint c;
            c.kind = Constraint::Kind::Stress;
            c.element = e;
            c.load_case = lc;
            c.limit = 25000.0;
            p.constraints.push_back(c);
        }
    for (int lc = 0; lc < 2; ++lc)
        for (int n = 1; n <= 4; ++n)
            for (int axis = 0; axis < 2; ++axis) {
                Constraint c;
                c.kind = Constraint::Kind::Displacement;
                c.node = n;
                c.axis = axis;
                c.load_case = lc;
                c.limit = 0.25;
                p.constraints.push_back(c);
            }

    p.validate();
    return p;
}

// Beam lattice of cubic cells with face-center nodes. Every cell edge is a
// beam; every face adds four corner-to-center diagonal beams. The grip planes
// (top/bottom) are clamped and pulled apart along Z; mid-plane boundary nodes
// must not move inward. Members are grouped along-X / along-Y / along-Z /
// diagonal, each choosing among four circular sections; interior nodes may
// relocate.
inline Problem generate_lattice(int cells_x, int cells_y, int cells_z) {
    if (cells_x < 1 || cells_y < 1 || cells_z < 1)
        throw ConfigError("generate_lattice: cell counts must be at least 1");

    Problem p;
    p.name = "lattice_" + std::to_string(cells_x) + "x" + std::to_string(cells_y) + "x" +
             std::to_string(cells_z);
    FrameModel& m = p.model;
    m.name = p.name;

    const double cell = 0.1;  // m
    const double hx = 0.5 * cell * cells_x, hy = 0.5 * cell * cells_y,
                 hz = 0.5 * cell * cells_z;
    const double stretch = 0.05 * (2.0 * hz);  // 5% nominal strain
    const double tol = 1e-9;

    auto add_node = [&m](double x, double y, double z) {
        Node n;
        n.id = static_cast<int>(m.nodes.size()) + 1;
        n.pos = {x, y, z};
        m.nodes.push_back(n);
        return n.id;
    };

    // Corner grid nodes.
    std::vector<int> grid(static_cast<std::size_t>((cells_x + 1) * (cells_y + 1) * (cells_z + 1)));
    auto gidx = [cells_x, cells_y](int ix, int iy, int iz) {
        return (iz * (cells_y + 1) + iy) * (cells_x + 1) + ix;
    };
    for (int iz = 0; iz <= cells_z; ++iz)
        for (int iy = 0; iy <= cells_y; ++iy)
            for (int ix = 0; ix <= cells_x; ++ix)
                grid[static_cast<std::size_t>(gidx(ix, iy, iz))] =
                    add_node(cell * ix - hx, cell * iy - hy, cell * iz - hz);

    Material steel;
    steel.name = "steel";
    steel.youngs_modulus = 210e9;
    steel.poisson_ratio = 0.3;
    steel.density = 7850.0;
    steel.yield_stress = 360e6;
    m.materials.push_back(steel);

    const double radii[4] = {0.003, 0.005, 0.008, 0.012};
    for (int j = 0; j < 4; ++j)
        m.sections.push_back(section_circle("CS" + std::to_string(j + 1), radii[j]));

    std::vector<int> group_of;  // parallel to elements: 0=x,1=y,2=z,3=diagonal
    auto add_beam = [&m, &group_of](int a, int b, int group) {
        Element e;
        e.id = static_cast<int>(m.elements.size()) + 1;
        e.kind = ElementKind::Beam;
        e.node_a = a;
        e.node_b = b;
        m.elements.push_back(e);
        group_of.push_back(group);
    };

    for (int iz = 0; iz <= cells_z; ++iz)
        for (int iy = 0; iy <= cells_y; ++iy)
            for (int ix = 0; ix < cells_x; ++ix)
                add_beam(grid[gidx(ix, iy, iz)], grid[gidx(ix + 1, iy, iz)], 0);
    for (int iz = 0; iz <= cells_z; ++iz)
        for (int iy = 0; iy < cells_y; ++iy)
            for (int ix = 0; ix <= cells_x; ++ix)
                add_beam(grid[gidx(ix, iy, iz)], grid[gidx(ix, iy + 1, iz)], 1);
    for (int iz = 0; iz < cells_z; ++iz)
        for (int iy = 0; iy <= cells_y; ++iy)
            for (int ix = 0; ix <= cells_x; ++ix)
                add_beam(grid[gidx(ix, iy, iz)], grid[gidx(ix, iy, iz + 1)], 2);

    // Face-center nodes with their four diagonals. Faces normal to X, Y, Z.
    for (int ix = 0; ix <= cells_x; ++ix)
        for (int iy = 0; iy < cells_y; ++iy)
            for (int iz = 0; iz < cells_z; ++iz) {
                const int c = add_node(cell * ix - hx, cell * (iy + 0.5) - hy,
                                       cell * (iz + 0.5) - hz);
                add_beam(grid[gidx(ix, iy, iz)], c, 3);
                add_beam(grid[gidx(ix, iy + 1, iz)], c, 3);
                add_beam(grid[gidx(ix, iy, iz + 1)], c, 3);
                add_beam(grid[gidx(ix, iy + 1, iz + 1)], c, 3);
            }
    for (int iy = 0; iy <= cells_y; ++iy)
        for (int ix = 0; ix < cells_x; ++ix)
            for (int iz = 0; iz < cells_z; ++iz) {
                const int c = add_node(cell * (ix + 0.5) - hx, cell * iy - hy,
                                       cell * (iz + 0.5) - hz);
                add_beam(grid[gidx(ix, iy, iz)], c, 3);
                add_beam(grid[gidx(ix + 1, iy, iz)], c, 3);
                add_beam(grid[gidx(ix, iy, iz + 1)], c, 3);
                add_beam(grid[gidx(ix + 1, iy, iz + 1)], c, 3);
            }
    for (int iz = 0; iz <= cells_z; ++iz)
        for (int ix = 0; ix < cells_x; ++ix)
            for (int iy = 0; iy < cells_y; ++iy) {
                const int c = add_node(cell * (ix + 0.5) - hx, cell * (iy + 0.5) - hy,
                                       cell * iz - hz);
                add_beam(grid[gidx(ix, iy, iz)], c, 3);
                add_beam(grid[gidx(ix + 1, iy, iz)], c, 3);
                add_beam(grid[gidx(ix, iy + 1, iz)], c, 3);
                add_beam(grid[gidx(ix + 1, iy + 1, iz)], c, 3);
            }

    // Grips: clamp the top and bottom planes and pull them apart along Z.
    for (const Node& n : m.nodes) {
        const bool top = std::abs(n.pos.z() - hz) < tol;
        const bool bottom = std::abs(n.pos.z() + hz) < tol;
        if (!top && !bottom) continue;
        Support s;
        s.node = n.id;
        s.fixed = {true, true, true, true, true, true};
        s.prescribed[2] = top ? 0.5 * stretch : -0.5 * stretch;
        m.supports.push_back(s);
    }

    {
        LoadCase lc;
        lc.name = "stretch";
        m.load_cases.push_back(lc);
    }

    p.objective = ObjectiveKind::Zero;

    // Non-shrinkage: mid-plane nodes on the lateral boundary must not move
    // toward the stretch axis.
    for (const Node& n : m.nodes) {
        if (std::abs(n.pos.z()) > tol) continue;
        const bool on_x = std::abs(std::abs(n.pos.x()) - hx) < tol;
        const bool on_y = std::abs(std::abs(n.pos.y()) - hy) < tol;
        if (!on_x && !on_y) continue;
        for (int axis = 0; axis < 2; ++axis) {
            Constraint c;
            c.kind = Constraint::Kind::Outward;
            c.node = n.id;
            c.axis = axis;
            c.load_case = 0;
            c.ref = n.pos(axis);
            p.constraints.push_back(c);
        }
    }

    const char* group_names[4] = {"sec_x", "sec_y", "sec_z", "sec_diag"};
    Eigen::MatrixXd choices(6, 4);
    std::vector<std::string> labels;
    for (int j = 0; j < 4; ++j) {
        const CrossSection& cs = m.sections[static_cast<std::size_t>(j)];
        choices.col(j) << cs.area, cs.iyy, cs.izz, cs.torsion_constant, cs.cy, cs.cz;
        labels.push_back(cs.name);
    }
    for (int g = 0; g < 4; ++g) {
        CategoricalVar v;
        v.name = group_names[g];
        for (std::size_t e = 0; e < m.elements.size(); ++e)
            if (group_of[e] == g) v.elements.push_back(static_cast<int>(e) + 1);
        v.attrs = {SectionAttr::Area,    SectionAttr::Iyy, SectionAttr::Izz,
                   SectionAttr::Torsion, SectionAttr::Cy,  SectionAttr::Cz};
        v.choices = choices;
        v.labels = labels;
        p.space.categorical.push_back(std::move(v));
    }

    // Interior nodes (not touching any boundary plane) may move.
    const double wiggle = 0.4 * cell;
    for (const Node& n : m.nodes) {
        const bool boundary = std::abs(std::abs(n.pos.x()) - hx) < tol ||
                              std::abs(std::abs(n.pos.y()) - hy) < tol ||
                              std::abs(std::abs(n.pos.z()) - hz) < tol;
        if (boundary) continue;
        const BindTarget targets[3] = {BindTarget::NodeX, BindTarget::NodeY, BindTarget::NodeZ};
        const char* axis_names[3] = {"x", "y", "z"};
        for (int a = 0; a < 3; ++a) {
            ContinuousVar v;
            v.name = std::string("n") + std::to_string(n.id) + "_" + axis_names[a];
            v.target = targets[a];
            v.node = n.id;
            v.lower = n.pos(a) - wiggle;
            v.upper = n.pos(a) + wiggle;
            p.space.continuous.push_back(std::move(v));
        }
    }

    p.opt.step_size = 0.05;
    p.validate();
    return p;
}

// Pratt-style truss-framed deck bridge. Two parallel planar trusses joined by
// transverse floor beams and top struts; floor members carry a uniform line
// load plus gravity; end nodes are clamped. Strain energy minimization under
// per-element stress limits and a minimum-frequency bound. Every member picks
// one of five catalog sections; orientation of every member and length of
// every off-floor member are continuous variables.
inline Problem generate_bridge(int panels) {
    if (panels < 2) throw ConfigError("generate_bridge: need at least 2 panels");

    Problem p;
    p.name = "bridge_" + std::to_string(panels);
    FrameModel& m = p.model;
    m.name = p.name;

    const double d = 1.0;  // panel length, m
    const double w = 1.0;  // deck width
    const double h = 1.0;  // truss height
    const int np = panels;

    auto add_node = [&m](double x, double y, double z) {
        Node n;
        n.id = static_cast<int>(m.nodes.size()) + 1;
        n.pos = {x, y, z};
        m.nodes.push_back(n);
        return n.id;
    };

    // bot[i][side], top[i][side]; supports first so they are nodes 1-4.
    std::vector<std::array<int, 2>> bot(static_cast<std::size_t>(np + 1));
    std::vector<std::array<int, 2>> top(static_cast<std::size_t>(np + 1), {0, 0});
    bot[0][0] = add_node(0.0, 0.0, 0.0);
    bot[0][1] = add_node(0.0, w, 0.0);
    bot[static_cast<std::size_t>(np)][0] = add_node(d * np, 0.0, 0.0);
    bot[static_cast<std::size_t>(np)][1] = add_node(d * np, w, 0.0);
    for (int i = 1; i < np; ++i) {
        bot[static_cast<std::size_t>(i)][0] = add_node(d * i, 0.0, 0.0);
        bot[static_cast<std::size_t>(i)][1] = add_node(d * i, w, 0.0);
    }
    for (int i = 1; i < np; ++i) {
        top[static_cast<std::size_t>(i)][0] = add_node(d * i, 0.0, h);
        top[static_cast<std::size_t>(i)][1] = add_node(d * i, w, h);
    }

    Material steel;
    steel.name = "steel";
    steel.youngs_modulus = 210e9;
    steel.poisson_ratio = 0.3;
    steel.density = 7850.0;
    steel.yield_stress = 360e6;
    m.materials.push_back(steel);

    m.sections.push_back(section_circle("circle", 0.040));
    m.sections.push_back(section_rect("rect", 0.080, 0.100));
    m.sections.push_back(section_box("box", 0.125, 0.075, 0.005));
    m.sections.push_back(section_ibeam("ibeam", 0.200, 0.150, 0.010));
    m.sections.push_back(section_channel("channel", 0.150, 0.080, 0.007));

    std::vector<int> floor_ids;
    auto add_beam = [&m](int a, int b) {
        Element e;
        e.id = static_cast<int>(m.elements.size()) + 1;
        e.kind = ElementKind::Beam;
        e.node_a = a;
        e.node_b = b;
        m.elements.push_back(e);
        return e.id;
    };

    for (int side = 0; side < 2; ++side) {
        for (int i = 0; i < np; ++i)
            floor_ids.push_back(add_beam(bot[static_cast<std::size_t>(i)][side],
                                         bot[static_cast<std::size_t>(i + 1)][side]));
        add_beam(bot[0][side], top[1][side]);
        add_beam(bot[static_cast<std::size_t>(np)][side],
                 top[static_cast<std::size_t>(np - 1)][side]);
        for (int i = 1; i < np - 1; ++i)
            add_beam(top[static_cast<std::size_t>(i)][side],
                     top[static_cast<std::size_t>(i + 1)][side]);
        for (int i = 1; i < np; ++i)
            add_beam(top[static_cast<std::size_t>(i)][side],
                     bot[static_cast<std::size_t>(i)][side]);
        // Pratt diagonals lean toward midspan.
        for (int i = 1; i < np - 1; ++i) {
            if (2 * i + 1 <= np)
                add_beam(top[static_cast<std::size_t>(i)][side],
                         bot[static_cast<std::size_t>(i + 1)][side]);
            else
                add_beam(top[static_cast<std::size_t>(i + 1)][side],
                         bot[static_cast<std::size_t>(i)][side]);
        }
    }
    for (int i = 0; i <= np; ++i)
        floor_ids.push_back(add_beam(bot[static_cast<std::size_t>(i)][0],
                                     bot[static_cast<std::size_t>(i)][1]));
    for (int i = 1; i < np; ++i)
        add_beam(top[static_cast<std::size_t>(i)][0], top[static_cast<std::size_t>(i)][1]);

    for (int n = 1; n <= 4; ++n) {
        Support s;
        s.node = n;
        s.fixed = {true, true, true, true, true, true};
        m.supports.push_back(s);
    }

    {
        LoadCase lc;
        lc.name = "service";
        lc.gravity = {0.0, 0.0, -9.81};
        for (int e : floor_ids) {
            DistributedLoad dl;
            dl.element = e;
            dl.force_per_length = {0.0, 0.0, -1000.0};
            lc.distributed.push_back(dl);
        }
        m.load_cases.push_back(lc);
    }

    p.objective = ObjectiveKind::StrainEnergy;

    const int n_elems = static_cast<int>(m.elements.size());
    for (int e = 1; e <= n_elems; ++e) {
        Constraint c;
        c.kind = Constraint::Kind::Stress;
        c.element = e;
        c.load_case = 0;
        c.limit = steel.yield_stress;
        p.constraints.push_back(c);
    }
    {
        Constraint c;
        c.kind = Constraint::Kind::MinFrequency;
        c.limit = 50.0;
        p.constraints.push_back(c);
    }

    Eigen::MatrixXd choices(6, 5);
    std::vector<std::string> labels;
    for (int j = 0; j < 5; ++j) {
        const CrossSection& cs = m.sections[static_cast<std::size_t>(j)];
        choices.col(j) << cs.area, cs.iyy, cs.izz, cs.torsion_constant, cs.cy, cs.cz;
        labels.push_back(cs.name);
    }
    std::vector<bool> is_floor(static_cast<std::size_t>(n_elems) + 1, false);
    for (int e : floor_ids) is_floor[static_cast<std::size_t>(e)] = true;
    for (int e = 1; e <= n_elems; ++e) {
        CategoricalVar v;
        v.name = "sec_e" + std::to_string(e);
        v.elements = {e};
        v.attrs = {SectionAttr::Area,    SectionAttr::Iyy, SectionAttr::Izz,
                   SectionAttr::Torsion, SectionAttr::Cy,  SectionAttr::Cz};
        v.choices = choices;
        v.labels = labels;
        p.space.categorical.push_back(std::move(v));
    }
    for (int e = 1; e <= n_elems; ++e) {
        ContinuousVar v;
        v.name = "roll_e" + std::to_string(e);
        v.target = BindTarget::Roll;
        v.elements = {e};
        v.lower = -M_PI / 2.0;
        v.upper = M_PI / 2.0;
        p.space.continuous.push_back(std::move(v));
    }
    for (int e = 1; e <= n_elems; ++e) {
        if (is_floor[static_cast<std::size_t>(e)]) continue;
        const Element& el = m.elements[static_cast<std::size_t>(e) - 1];
        const double len =
            (m.nodes[static_cast<std::size_t>(el.node_b) - 1].pos -
             m.nodes[static_cast<std::size_t>(el.node_a) - 1].pos)
                .norm();
        ContinuousVar v;
        v.name = "len_e" + std::to_string(e);
        v.target = BindTarget::Length;
        v.elements = {e};
        v.lower = 0.7 * len;
        v.upper = 1.3 * len;
        p.space.continuous.push_back(std::move(v));
    }

    p.validate();
    return p;
}

// "builtin:truss72" | "builtin:lattice:X,Y,Z" | "builtin:bridge:P".
inline bool is_builtin_spec(const std::string& spec) { return spec.rfind("builtin:", 0) == 0; }

inline Problem make_builtin(const std::string& spec) {
    if (!is_builtin_spec(spec)) throw ConfigError("not a builtin problem spec: '" + spec + "'");
    const std::string rest = spec.substr(8);
    if (rest == "truss72") return generate_truss72();
    auto parse_ints = [&spec](const std::string& s, std::size_t want) {
        std::vector<int> out;
        std::size_t pos = 0;
        while (pos <= s.size()) {
            const std::size_t comma = std::min(s.find(',', pos), s.size());
            try {
                std::size_t used = 0;
                const std::string tok = s.substr(pos, comma - pos);
                out.push_back(std::stoi(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw ConfigError("bad builtin problem spec '" + spec + "'");
            }
            pos = comma + 1;
            if (comma == s.size()) break;
        }
        if (out.size() != want) throw ConfigError("bad builtin problem spec '" + spec + "'");
        return out;
    };
    if (rest.rfind("lattice:", 0) == 0) {
        const std::vector<int> v = parse_ints(rest.substr(8), 3);
        return generate_lattice(v[0], v[1], v[2]);
    }
    if (rest.rfind("bridge:", 0) == 0) {
        const std::vector<int> v = parse_ints(rest.substr(7), 1);
        return generate_bridge(v[0]);
    }
    throw ConfigError("unknown builtin problem '" + spec + "'");
}

} // namespace frameopt

#endif
