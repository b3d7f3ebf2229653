#include "magneto/taimanov.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>

#include "magneto/maxflow.hpp"

namespace magneto {

bool GridRegion::cell(int i, int j) const {
    const int ii = ((i % m) + m) % m;
    const int jj = ((j % m) + m) % m;
    return mask[static_cast<std::size_t>(jj) * m + ii] != 0;
}

int GridRegion::count() const {
    int c = 0;
    for (std::uint8_t v : mask) c += v != 0;
    return c;
}

namespace {

// Metric length of the edge between cell (i,j) and its neighbor in direction
// dir (0:+x, 1:+y), evaluated at the edge midpoint. The shared edge of (i,j)
// and (i+1,j) is vertical (runs along q2), so its length uses g_22.
double edge_length(const MetricField& m, int grid_m, int i, int j, int dir) {
    const double h = 1.0 / grid_m;
    if (dir == 0) {
        const Vec2 mid{(i + 1.0) * h, (j + 0.5) * h};
        return std::sqrt(m.at(mid).yy) * h;
    }
    const Vec2 mid{(i + 0.5) * h, (j + 1.0) * h};
    return std::sqrt(m.at(mid).xx) * h;
}

double cell_weight(const MetricField& m, const MagneticDensity& f, int grid_m, int i, int j) {
    const double h = 1.0 / grid_m;
    const Vec2 c{(i + 0.5) * h, (j + 0.5) * h};
    return f.at(c) * m.sqrt_det(c) * h * h;
}

}  // namespace

double taimanov_value(const MetricField& m, const MagneticDensity& f, double k,
                      const GridRegion& region) {
    const int gm = region.m;
    double perimeter = 0.0, flux = 0.0;
    for (int j = 0; j < gm; ++j) {
        for (int i = 0; i < gm; ++i) {
            if (!region.cell(i, j)) continue;
            flux += cell_weight(m, f, gm, i, j);
            if (!region.cell(i + 1, j)) perimeter += edge_length(m, gm, i, j, 0);
            if (!region.cell(i - 1, j)) perimeter += edge_length(m, gm, i - 1, j, 0);
            if (!region.cell(i, j + 1)) perimeter += edge_length(m, gm, i, j, 1);
            if (!region.cell(i, j - 1)) perimeter += edge_length(m, gm, i, j - 1, 1);
        }
    }
    return std::sqrt(2.0 * k) * perimeter + flux;
}

GridRegion minimize_taimanov(const MetricField& m, const MagneticDensity& f, double k,
                             int grid_m) {
    if (grid_m < 4) throw DomainError("minimize_taimanov: grid_m must be >= 4");
    const int n_cells = grid_m * grid_m;
    const int source = n_cells, sink = n_cells + 1;
    const double root2k = std::sqrt(2.0 * k);

    MaxFlow mf(n_cells + 2);
    double neg_sum = 0.0;
    for (int j = 0; j < grid_m; ++j) {
        for (int i = 0; i < grid_m; ++i) {
            const int id = j * grid_m + i;
            const double w = cell_weight(m, f, grid_m, i, j);
            if (w < 0.0) {
                mf.add_edge(source, id, -w);
                neg_sum += -w;
            } else if (w > 0.0) {
                mf.add_edge(id, sink, w);
            }
            // torus-wrapped 4-neighborhood; each undirected pair added once
            const int right = j * grid_m + (i + 1) % grid_m;
            const int up = ((j + 1) % grid_m) * grid_m + i;
            const double cx = root2k * edge_length(m, grid_m, i, j, 0);
            const double cy = root2k * edge_length(m, grid_m, i, j, 1);
            mf.add_edge(id, right, cx);
            mf.add_edge(right, id, cx);
            mf.add_edge(id, up, cy);
            mf.add_edge(up, id, cy);
        }
    }

    const double cut = mf.solve(source, sink);
    const std::vector<bool> side = mf.min_cut_source_side(source);

    GridRegion region;
    region.m = grid_m;
    region.mask.assign(static_cast<std::size_t>(n_cells), 0);
    for (int c = 0; c < n_cells; ++c) region.mask[c] = side[c] ? 1 : 0;

    // Recompute value/perimeter/flux from the mask (authoritative); the
    // min-cut identity value = cut - sum max(0,-w) is checked in tests.
    region.value = cut - neg_sum;
    double perimeter = 0.0, flux = 0.0;
    for (int j = 0; j < grid_m; ++j) {
        for (int i = 0; i < grid_m; ++i) {
            if (!region.cell(i, j)) continue;
            flux += cell_weight(m, f, grid_m, i, j);
            if (!region.cell(i + 1, j)) perimeter += edge_length(m, grid_m, i, j, 0);
            if (!region.cell(i - 1, j)) perimeter += edge_length(m, grid_m, i - 1, j, 0);
            if (!region.cell(i, j + 1)) perimeter += edge_length(m, grid_m, i, j, 1);
            if (!region.cell(i, j - 1)) perimeter += edge_length(m, grid_m, i, j - 1, 1);
        }
    }
    region.perimeter = perimeter;
    region.flux = flux;
    region.value = root2k * perimeter + flux;
    region.boundary = trace_boundary(region);
    return region;
}

std::vector<LatticeCurve> trace_boundary(const GridRegion& region) {
    const int gm = region.m;
    // Directed boundary edges keyed by (vertex, direction); direction indices
    // 0:+x 1:+y 2:-x 3:-y. The region stays on the left of each edge.
    const int DX[4] = {1, 0, -1, 0};
    const int DY[4] = {0, 1, 0, -1};
    auto vid = [&](int i, int j) { return (((j % gm) + gm) % gm) * gm + (((i % gm) + gm) % gm); };

    std::vector<std::array<bool, 4>> exists(static_cast<std::size_t>(gm) * gm,
                                            {false, false, false, false});
    for (int j = 0; j < gm; ++j) {
        for (int i = 0; i < gm; ++i) {
            if (!region.cell(i, j)) continue;
            if (!region.cell(i + 1, j)) exists[vid(i + 1, j)][1] = true;      // right side: up
            if (!region.cell(i - 1, j)) exists[vid(i, j + 1)][3] = true;      // left side: down
            if (!region.cell(i, j + 1)) exists[vid(i + 1, j + 1)][2] = true;  // top side: left
            if (!region.cell(i, j - 1)) exists[vid(i, j)][0] = true;          // bottom: right
        }
    }
    std::vector<std::array<bool, 4>> used(static_cast<std::size_t>(gm) * gm,
                                          {false, false, false, false});

    std::vector<LatticeCurve> curves;
    const double h = 1.0 / gm;
    for (int start_v = 0; start_v < gm * gm; ++start_v) {
        for (int start_d = 0; start_d < 4; ++start_d) {
            if (!exists[start_v][start_d] || used[start_v][start_d]) continue;

            LatticeCurve curve;
            int ci = start_v % gm, cj = start_v / gm;
            Vec2 pos{ci * h, cj * h};
            int dir = start_d;
            while (true) {
                curve.pts.push_back(pos);
                used[vid(ci, cj)][dir] = true;
                ci += DX[dir];
                cj += DY[dir];
                pos += Vec2{DX[dir] * h, DY[dir] * h};
                // Prefer left turn, then straight, then right: keeps the
                // region on the left through checkerboard corners. The
                // pairing is structural (all edges considered), so a curve
                // can pass through a crossing it will revisit.
                const int left = (dir + 1) % 4, right = (dir + 3) % 4;
                const auto& avail = exists[vid(ci, cj)];
                int next;
                if (avail[left]) {
                    next = left;
                } else if (avail[dir]) {
                    next = dir;
                } else if (avail[right]) {
                    next = right;
                } else {
                    throw DomainError("boundary tracing: dead end (corrupt mask)");
                }
                if (vid(ci, cj) == start_v && next == start_d) break;  // closed
                if (used[vid(ci, cj)][next]) {
                    throw DomainError("boundary tracing: edge reuse (corrupt mask)");
                }
                dir = next;
            }
            const Vec2 disp = pos - curve.pts.front();
            curve.wind_a = static_cast<int>(std::lround(disp.x));
            curve.wind_b = static_cast<int>(std::lround(disp.y));
            curves.push_back(std::move(curve));
        }
    }
    return curves;
}

double tau_plus_estimate(const MetricField& m, const MagneticDensity& f, double k_lo,
                         double k_hi, double tol_k, int grid_m) {
    if (!(k_lo > 0.0) || !(k_hi > k_lo) || !(tol_k > 0.0)) {
        throw BracketError("tau_plus_estimate: invalid bracket parameters");
    }
    const double v_lo = minimize_taimanov(m, f, k_lo, grid_m).value;
    const double v_hi = minimize_taimanov(m, f, k_hi, grid_m).value;
    if (!(v_lo < 0.0) || v_hi < 0.0) {
        throw BracketError("tau_plus_estimate: bracket does not satisfy min T_{k_lo} < 0 <= min T_{k_hi}");
    }
    double lo = k_lo, hi = k_hi;
    while (hi - lo > tol_k) {
        const double mid = 0.5 * (lo + hi);
        // k -> min T_k is non-decreasing, so the sign change is unique.
        if (minimize_taimanov(m, f, mid, grid_m).value < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::vector<DiscreteLoop> boundary_to_seed(const MetricField& m, const MagneticDensity& f,
                                           double k, const GridRegion& region, int n_vertices) {
    (void)f;
    if (region.boundary.empty()) throw DomainError("boundary_to_seed: region has no boundary");
    std::vector<DiscreteLoop> seeds;
    for (const LatticeCurve& curve : region.boundary) {
        if (curve.pts.size() < 4) {
            std::cerr << "warning: skipping degenerate boundary curve ("
                      << curve.pts.size() << " lattice steps)\n";
            continue;
        }
        DiscreteLoop poly{curve.pts, 1.0, curve.wind_a, curve.wind_b};

        // Laplacian smoothing, 5 passes, on the lifted polygon.
        for (int pass = 0; pass < 5; ++pass) {
            std::vector<Vec2> next(poly.x.size());
            for (int i = 0; i < poly.n(); ++i) {
                next[i] = 0.25 * (poly.vertex(i - 1) + 2.0 * poly.x[i] + poly.vertex(i + 1));
            }
            poly.x = std::move(next);
        }

        DiscreteLoop loop = resample_uniform_arclength(m, poly, n_vertices);
        loop.T = loop_length(m, loop) / std::sqrt(2.0 * k);
        seeds.push_back(std::move(loop));
    }
    return seeds;
}

}  // namespace magneto
