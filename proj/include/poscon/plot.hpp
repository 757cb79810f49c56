#pragma once

// Simplex-projected generator sets of conmat_k for a few k, as CSV or SVG.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "cones.hpp"
#include "controllability.hpp"
#include "errors.hpp"

namespace poscon::plot {

class SvgUnsupportedDim : public InputError {
public:
    explicit SvgUnsupportedDim(std::size_t n)
        : InputError("cli.SvgUnsupportedDim", "SVG output needs n = 3, system has n = " + std::to_string(n)) {}
};

struct Layer {
    std::size_t k = 0;
    std::vector<Vector> points;  // on the unit simplex
    std::vector<std::string> labels;
};

struct PlotData {
    std::size_t n = 0;
    std::vector<Layer> layers;
    std::vector<Vector> v_f;  // projected
    std::vector<std::string> v_f_labels;
};

inline PlotData collect(const SystemSI& sys, const LimitCone& lc, std::vector<std::size_t> ks) {
    if (ks.empty()) throw InputError("cli.Plot", "no k values given");
    for (std::size_t k : ks)
        if (k == 0) throw InputError("cli.Plot", "k must be >= 1");
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    PlotData d;
    d.n = sys.dim();
    for (std::size_t k : ks) {
        const GeneratorCone c = conmat(sys, k);
        d.layers.push_back({k, project_simplex(c), c.labels()});
    }
    d.v_f = project_simplex(lc.v_f);
    d.v_f_labels = lc.v_f.labels();
    return d;
}

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

/// Columns: k, generator_index, coord_1..coord_n, label. v_f rows close each k block.
inline std::string to_csv(const PlotData& d) {
    std::string out = "k,generator_index";
    for (std::size_t i = 1; i <= d.n; ++i) out += ",coord_" + std::to_string(i);
    out += ",label\n";
    for (const Layer& l : d.layers) {
        auto row = [&](std::size_t idx, const Vector& p, const std::string& label) {
            out += std::to_string(l.k) + "," + std::to_string(idx);
            for (double v : p) out += "," + format_number(v);
            out += "," + csv_field(label) + "\n";
        };
        for (std::size_t j = 0; j < l.points.size(); ++j) row(j, l.points[j], l.labels[j]);
        for (std::size_t j = 0; j < d.v_f.size(); ++j) row(l.points.size() + j, d.v_f[j], d.v_f_labels[j]);
    }
    return out;
}

using Point2 = std::array<double, 2>;

inline double cross(const Point2& o, const Point2& a, const Point2& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

/// Gift wrapping; counter-clockwise, collinear boundary points dropped.
inline std::vector<Point2> convex_hull(std::vector<Point2> pts, double eps = 1e-12) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [&](const Point2& a, const Point2& b) {
                              return std::abs(a[0] - b[0]) <= eps && std::abs(a[1] - b[1]) <= eps;
                          }),
              pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Point2> hull;
    std::size_t start = 0;  // lexicographically smallest, always on the hull
    std::size_t cur = start;
    do {
        hull.push_back(pts[cur]);
        std::size_t next = (cur + 1) % pts.size();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i == cur) continue;
            const double c = cross(pts[cur], pts[next], pts[i]);
            auto d2 = [&](const Point2& p) {
                return (p[0] - pts[cur][0]) * (p[0] - pts[cur][0]) + (p[1] - pts[cur][1]) * (p[1] - pts[cur][1]);
            };
            if (c < -eps || (std::abs(c) <= eps && d2(pts[i]) > d2(pts[next]))) next = i;
        }
        cur = next;
    } while (cur != start && hull.size() <= pts.size());
    return hull;
}

/// q inside (or within tol of) the counter-clockwise hull.
inline bool inside_hull(const std::vector<Point2>& hull, const Point2& q, double tol) {
    if (hull.empty()) return false;
    if (hull.size() == 1) return std::hypot(q[0] - hull[0][0], q[1] - hull[0][1]) <= tol;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Point2& a = hull[i];
        const Point2& b = hull[(i + 1) % hull.size()];
        const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
        if (cross(a, b, q) < -tol * len) return false;
        if (hull.size() == 2) {
            // segment: also bound along its direction
            const double t = ((q[0] - a[0]) * (b[0] - a[0]) + (q[1] - a[1]) * (b[1] - a[1])) / (len * len);
            return std::abs(cross(a, b, q)) <= tol * len && t >= -tol && t <= 1 + tol;
        }
    }
    return true;
}

// Triangle corners for e1, e2, e3 in a 600 x 600 viewBox.
inline Point2 barycentric(const Vector& p) {
    const Point2 c1{50.0, 550.0}, c2{550.0, 550.0}, c3{300.0, 550.0 - 500.0 * std::sqrt(3.0) / 2.0};
    return {p[0] * c1[0] + p[1] * c2[0] + p[2] * c3[0], p[0] * c1[1] + p[1] * c2[1] + p[2] * c3[1]};
}

/// Planar coordinates on the simplex, for hull tests; needs n = 3.
inline std::vector<Point2> planar(const std::vector<Vector>& pts) {
    std::vector<Point2> out;
    for (const Vector& p : pts) out.push_back(barycentric(p));
    return out;
}

inline std::string to_svg(const PlotData& d) {
    if (d.n != 3) throw SvgUnsupportedDim(d.n);
    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#17becf"};
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", v);
        return std::string(buf);
    };
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 600 600\" width=\"600\" height=\"600\">\n";
    const Point2 c1 = barycentric({1, 0, 0}), c2 = barycentric({0, 1, 0}), c3 = barycentric({0, 0, 1});
    s += "  <polygon points=\"" + fmt(c1[0]) + "," + fmt(c1[1]) + " " + fmt(c2[0]) + "," + fmt(c2[1]) + " " +
         fmt(c3[0]) + "," + fmt(c3[1]) + "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    s += "  <text x=\"" + fmt(c1[0] - 20) + "\" y=\"" + fmt(c1[1] + 20) + "\" font-size=\"14\">e1</text>\n";
    s += "  <text x=\"" + fmt(c2[0] + 5) + "\" y=\"" + fmt(c2[1] + 20) + "\" font-size=\"14\">e2</text>\n";
    s += "  <text x=\"" + fmt(c3[0] - 8) + "\" y=\"" + fmt(c3[1] - 8) + "\" font-size=\"14\">e3</text>\n";

    // largest k first so the nested smaller sets stay visible
    for (std::size_t li = d.layers.size(); li-- > 0;) {
        const Layer& l = d.layers[li];
        const char* colour = palette[li % 6];
        const auto hull = convex_hull(planar(l.points));
        s += "  <g id=\"k" + std::to_string(l.k) + "\">\n";
        if (hull.size() >= 2) {
            s += "    <polygon points=\"";
            for (std::size_t i = 0; i < hull.size(); ++i) s += (i ? " " : "") + fmt(hull[i][0]) + "," + fmt(hull[i][1]);
            s += "\" fill=\"" + std::string(colour) + "\" fill-opacity=\"0.25\" stroke=\"" + colour + "\"/>\n";
        }
        for (const Point2& p : planar(l.points))
            s += "    <text x=\"" + fmt(p[0]) + "\" y=\"" + fmt(p[1] + 4) + "\" font-size=\"12\" text-anchor=\"middle\" fill=\"" +
                 colour + "\">*</text>\n";
        s += "  </g>\n";
    }
    for (const Point2& p : planar(d.v_f))
        s += "  <circle cx=\"" + fmt(p[0]) + "\" cy=\"" + fmt(p[1]) + "\" r=\"4\" fill=\"red\"/>\n";
    for (std::size_t li = 0; li < d.layers.size(); ++li)
        s += "  <text x=\"20\" y=\"" + fmt(24.0 + 18.0 * static_cast<double>(li)) + "\" font-size=\"13\" fill=\"" +
             palette[li % 6] + "\">k = " + std::to_string(d.layers[li].k) + "</text>\n";
    s += "</svg>\n";
    return s;
}

}  // namespace poscon::plot
