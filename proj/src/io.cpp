#include "magneto/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace magneto {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string loop_to_csv(const DiscreteLoop& g) {
    std::ostringstream out;
    out << "# T=" << fmt_double(g.T) << " winding=" << g.wind_a << "," << g.wind_b << "\n";
    out << "i,x1,x2\n";
    for (int i = 0; i < g.n(); ++i) {
        out << i << "," << fmt_double(g.x[i].x) << "," << fmt_double(g.x[i].y) << "\n";
    }
    return out.str();
}

DiscreteLoop loop_from_csv_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    double T = 0.0;
    int a = 0, b = 0;
    if (!std::getline(in, line) ||
        std::sscanf(line.c_str(), "# T=%lf winding=%d,%d", &T, &a, &b) != 3) {
        throw DomainError("loop CSV: missing '# T=<period> winding=<a>,<b>' header");
    }
    if (!std::getline(in, line) || line != "i,x1,x2") {
        throw DomainError("loop CSV: missing 'i,x1,x2' column header");
    }
    std::vector<Vec2> verts;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        int idx;
        double x1, x2;
        if (std::sscanf(line.c_str(), "%d,%lf,%lf", &idx, &x1, &x2) != 3) {
            throw DomainError("loop CSV: bad row '" + line + "'");
        }
        verts.push_back({x1, x2});
    }
    return make_loop(std::move(verts), T, a, b);
}

DiscreteLoop load_loop_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open loop file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return loop_from_csv_text(text);
}

std::string trajectory_to_csv(const MetricField& m, const Trajectory& traj) {
    std::ostringstream out;
    out << "t,q1,q2,v1,v2,E\n";
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const TangentState& s = traj.states[i];
        out << fmt_double(traj.times[i]) << "," << fmt_double(s.q.x) << "," << fmt_double(s.q.y)
            << "," << fmt_double(s.v.x) << "," << fmt_double(s.v.y) << ","
            << fmt_double(state_energy(m, s)) << "\n";
    }
    return out.str();
}

std::string scan_to_csv(const std::vector<ScanRow>& rows) {
    std::ostringstream out;
    out << "k,n,c,residual,T,winding_a,winding_b,status\n";
    for (const ScanRow& r : rows) {
        out << fmt_double(r.k) << "," << r.n << "," << fmt_double(r.c) << ","
            << fmt_double(r.residual) << "," << fmt_double(r.T) << "," << r.wind_a << ","
            << r.wind_b << "," << r.status << "\n";
    }
    return out.str();
}

std::string census_to_json(const Census& census) {
    nlohmann::ordered_json root;
    nlohmann::ordered_json by_k = nlohmann::ordered_json::object();
    for (const auto& [k, ids] : census.by_energy) {
        by_k[fmt_double(k)] = ids;
    }
    root["k"] = by_k;
    nlohmann::ordered_json orbits = nlohmann::ordered_json::array();
    for (const OrbitRecord& orb : census.orbits) {
        orbits.push_back({{"id", orb.id},
                          {"hash", orb.hash},
                          {"T", orb.T},
                          {"winding", {orb.wind_a, orb.wind_b}}});
    }
    root["orbits"] = orbits;
    return root.dump(2) + "\n";
}

std::string region_record_json(double k, const GridRegion& region) {
    nlohmann::ordered_json root;
    root["k"] = k;
    root["value"] = region.value;
    root["perimeter"] = region.perimeter;
    root["flux"] = region.flux;
    root["n_boundary_curves"] = region.boundary.size();
    return root.dump(2) + "\n";
}

std::string region_to_pbm(const GridRegion& region) {
    std::ostringstream out;
    out << "P1\n" << region.m << " " << region.m << "\n";
    for (int j = region.m - 1; j >= 0; --j) {  // top row first
        for (int i = 0; i < region.m; ++i) {
            out << (region.cell(i, j) ? '1' : '0');
            out << (i + 1 == region.m ? '\n' : ' ');
        }
    }
    return out.str();
}

namespace {

// Draw the segment from lifted a by delta, wrapping at the unit-cell
// boundaries; emits one SVG path element per visible piece.
void emit_wrapped_segment(std::ostringstream& out, Vec2 a, Vec2 delta, double s,
                          const std::string& color) {
    Vec2 p = reduce_torus(a);
    double remaining = 1.0;  // fraction of the segment still to draw
    for (int guard = 0; guard < 16 && remaining > 1e-12; ++guard) {
        double t_exit = remaining;  // earliest boundary crossing along delta
        for (int axis = 0; axis < 2; ++axis) {
            const double pos = axis == 0 ? p.x : p.y;
            const double d = axis == 0 ? delta.x : delta.y;
            if (d > 1e-15) {
                t_exit = std::min(t_exit, (1.0 - pos) / d);
            } else if (d < -1e-15) {
                t_exit = std::min(t_exit, (0.0 - pos) / d);
            }
        }
        t_exit = std::max(t_exit, 0.0);
        const Vec2 q = p + t_exit * delta;
        out << "<line x1=\"" << p.x * s << "\" y1=\"" << (1.0 - p.y) * s << "\" x2=\""
            << q.x * s << "\" y2=\"" << (1.0 - q.y) * s << "\" stroke=\"" << color
            << "\" stroke-width=\"1.5\"/>\n";
        remaining -= t_exit;
        if (remaining <= 1e-12) break;
        p = reduce_torus(q + 1e-12 * delta);  // step across the boundary
    }
}

}  // namespace

std::string render_svg(const GridRegion* region, const std::vector<SvgCurve>& curves,
                       int size_px) {
    const double s = size_px;
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size_px << "\" height=\""
        << size_px << "\" viewBox=\"0 0 " << size_px << " " << size_px << "\">\n";
    out << "<rect width=\"" << size_px << "\" height=\"" << size_px
        << "\" fill=\"white\" stroke=\"none\"/>\n";

    if (region != nullptr) {
        const int gm = region->m;
        const double cell = s / gm;
        for (int j = 0; j < gm; ++j) {
            int i = 0;
            while (i < gm) {
                if (!region->cell(i, j)) {
                    ++i;
                    continue;
                }
                int i2 = i;
                while (i2 + 1 < gm && region->cell(i2 + 1, j)) ++i2;
                out << "<rect x=\"" << i * cell << "\" y=\"" << (gm - 1 - j) * cell
                    << "\" width=\"" << (i2 - i + 1) * cell << "\" height=\"" << cell
                    << "\" fill=\"#cfe8ff\" stroke=\"none\"/>\n";
                i = i2 + 1;
            }
        }
    }

    for (const SvgCurve& c : curves) {
        const int n = static_cast<int>(c.pts.size());
        for (int i = 0; i < n; ++i) {
            const Vec2 a = c.pts[i];
            const Vec2 b = i + 1 < n ? c.pts[i + 1] : c.pts[0] + c.winding;
            emit_wrapped_segment(out, a, b - a, s, c.color);
        }
    }

    out << "<rect width=\"" << size_px << "\" height=\"" << size_px
        << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
    out << "</svg>\n";
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DomainError("cannot write file: " + path);
    out << content;
}

}  // namespace magneto
