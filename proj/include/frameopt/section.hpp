#ifndef FRAMEOPT_SECTION_HPP
#define FRAMEOPT_SECTION_HPP

#include <algorithm>
#include <cmath>

#include "frameopt/error.hpp"
#include "frameopt/model.hpp"

// Closed-form section properties for the shapes used by the built-in
// problem generators. Convention: h extends along the local z axis, w along
// the local y axis, so Iyy = bending about local y (fibers at z = +-h/2).

namespace frameopt {

inline CrossSection section_circle(const std::string& name, double r) {
    if (!(r > 0.0)) throw DomainError("section_circle: radius must be positive");
    CrossSection s;
    s.name = name;
    s.area = M_PI * r * r;
    s.iyy = s.izz = M_PI * std::pow(r, 4) / 4.0;
    s.torsion_constant = M_PI * std::pow(r, 4) / 2.0;
    s.cy = s.cz = r;
    return s;
}

inline CrossSection section_rect(const std::string& name, double h, double w) {
    if (!(h > 0.0 && w > 0.0)) throw DomainError("section_rect: sides must be positive");
    CrossSection s;
    s.name = name;
    s.area = h * w;
    s.iyy = w * h * h * h / 12.0;
    s.izz = h * w * w * w / 12.0;
    const double a = std::max(h, w), b = std::min(h, w);
    s.torsion_constant =
        a * b * b * b * (1.0 / 3.0 - 0.21 * (b / a) * (1.0 - std::pow(b, 4) / (12.0 * std::pow(a, 4))));
    s.cy = w / 2.0;
    s.cz = h / 2.0;
    return s;
}

inline CrossSection section_box(const std::string& name, double h, double w, double t) {
    if (!(t > 0.0 && h > 2.0 * t && w > 2.0 * t))
        throw DomainError("section_box: need h, w > 2t > 0");
    CrossSection s;
    s.name = name;
    const double hi = h - 2.0 * t, wi = w - 2.0 * t;
    s.area = h * w - hi * wi;
    s.iyy = (w * h * h * h - wi * hi * hi * hi) / 12.0;
    s.izz = (h * w * w * w - hi * wi * wi * wi) / 12.0;
    // Thin-walled closed section: J = 4 A_m^2 t / p_m with the mid-line loop.
    const double hm = h - t, wm = w - t;
    s.torsion_constant = 4.0 * (hm * wm) * (hm * wm) * t / (2.0 * (hm + wm));
    s.cy = w / 2.0;
    s.cz = h / 2.0;
    return s;
}

inline CrossSection section_ibeam(const std::string& name, double h, double w, double t) {
    if (!(t > 0.0 && h > 2.0 * t && w > t))
        throw DomainError("section_ibeam: need h > 2t, w > t, t > 0");
    CrossSection s;
    s.name = name;
    const double hw = h - 2.0 * t; // web height
    s.area = 2.0 * w * t + hw * t;
    s.iyy = (w * h * h * h - (w - t) * hw * hw * hw) / 12.0;
    s.izz = (2.0 * t * w * w * w + hw * t * t * t) / 12.0;
    s.torsion_constant = (2.0 * w + hw) * t * t * t / 3.0;
    s.cy = w / 2.0;
    s.cz = h / 2.0;
    return s;
}

inline CrossSection section_channel(const std::string& name, double h, double w, double t) {
    if (!(t > 0.0 && h > 2.0 * t && w > t))
        throw DomainError("section_channel: need h > 2t, w > t, t > 0");
    CrossSection s;
    s.name = name;
    const double wf = w - t; // flange extent beyond the web
    const double a_web = h * t, a_fl = wf * t;
    s.area = a_web + 2.0 * a_fl;
    // Strong axis: web plus two flanges offset to +-(h-t)/2.
    const double zf = (h - t) / 2.0;
    s.iyy = t * h * h * h / 12.0 + 2.0 * (wf * t * t * t / 12.0 + a_fl * zf * zf);
    // Weak axis about the centroid (open side along +y).
    const double ybar = (a_web * (t / 2.0) + 2.0 * a_fl * (t + wf / 2.0)) / s.area;
    s.izz = h * t * t * t / 12.0 + a_web * (ybar - t / 2.0) * (ybar - t / 2.0) +
            2.0 * (t * wf * wf * wf / 12.0 + a_fl * (t + wf / 2.0 - ybar) * (t + wf / 2.0 - ybar));
    s.torsion_constant = (h + 2.0 * wf) * t * t * t / 3.0;
    s.cy = std::max(ybar, w - ybar);
    s.cz = h / 2.0;
    return s;
}

} // namespace frameopt

#endif
