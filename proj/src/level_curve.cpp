#include "congesta/level_curve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <unordered_map>

namespace congesta {

Vec2 LevelCurve::delta(int i) const {
    const int n = size();
    Vec2 d = vertices[(i + 1) % n] - vertices[i];
    if (topology == Topology::torus_strip) {
        if (d.x > period / 2.0) d.x -= period;
        if (d.x < -period / 2.0) d.x += period;
    }
    return d;
}

bool LevelCurve::is_simple() const {
    // lift to the universal cover so torus seams do not fake intersections
    const int n = size();
    std::vector<Vec2> lifted(n);
    lifted[0] = vertices[0];
    for (int i = 1; i < n; ++i) lifted[i] = lifted[i - 1] + delta(i - 1);

    auto orient = [](Vec2 a, Vec2 b, Vec2 c) {
        return cross(b - a, c - a);
    };
    auto segs_intersect = [&](Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
        double o1 = orient(a, b, c), o2 = orient(a, b, d);
        double o3 = orient(c, d, a), o4 = orient(c, d, b);
        return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0));
    };
    for (int i = 0; i < n; ++i) {
        Vec2 a = lifted[i], b = lifted[i] + delta(i);
        for (int j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue; // adjacent through the wrap
            Vec2 c = lifted[j], d = lifted[j] + delta(j);
            if (segs_intersect(a, b, c, d)) return false;
        }
    }
    return true;
}

namespace {

using EdgeId = std::int64_t;

// edge ids: ((j * nx + i) << 1) | kind, kind 0 horizontal (i..i+1), 1 vertical (j..j+1)
EdgeId h_edge(int i, int j, int nx) { return ((static_cast<EdgeId>(j) * nx + i) << 1); }
EdgeId v_edge(int i, int j, int nx, bool wrap_x) {
    if (wrap_x && i == nx - 1) i = 0; // periodic seam: last column is the first
    return ((static_cast<EdgeId>(j) * nx + i) << 1) | 1;
}

struct Stitcher {
    std::map<EdgeId, Vec2> point;
    std::map<EdgeId, std::vector<EdgeId>> adj;

    void add_segment(EdgeId e1, Vec2 p1, EdgeId e2, Vec2 p2) {
        if (e1 == e2) return;
        point.emplace(e1, p1);
        point.emplace(e2, p2);
        adj[e1].push_back(e2);
        adj[e2].push_back(e1);
    }
};

} // namespace

std::vector<LevelCurve> extract_level_curve_components(const EquilibriumState& state, double p) {
    const GridSpec& grid = state.grid();
    if (grid.ny == 1)
        fail(errc::config, "level curve extraction needs a two-dimensional grid");
    if (!(p > 0.0) || !(p < state.P_max()))
        fail(errc::no_curve, "level p = " + std::to_string(p) + " outside (0, P(u_max)) = (0, " +
                                 std::to_string(state.P_max()) + ")");

    const int nx = grid.nx, ny = grid.ny;
    const bool wrap_x = state.spec().topology == Topology::torus_strip;
    const std::vector<double>& pi = state.node_pi();

    auto val = [&](int i, int j) { return pi[static_cast<size_t>(j) * nx + i]; };
    auto node = [&](int i, int j) { return grid.node(i, j); };
    auto cross_pt = [&](int i0, int j0, int i1, int j1) {
        double a = val(i0, j0), b = val(i1, j1);
        double s = (p - a) / (b - a);
        Vec2 A = node(i0, j0), B = node(i1, j1);
        return A + (B - A) * s;
    };

    Stitcher st;
    for (int j = 0; j + 1 < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            int in00 = val(i, j) <= p, in10 = val(i + 1, j) <= p;
            int in11 = val(i + 1, j + 1) <= p, in01 = val(i, j + 1) <= p;
            int c = in00 | (in10 << 1) | (in11 << 2) | (in01 << 3);
            if (c == 0 || c == 15) continue;

            EdgeId B = h_edge(i, j, nx), T = h_edge(i, j + 1, nx);
            EdgeId L = v_edge(i, j, nx, wrap_x), R = v_edge(i + 1, j, nx, wrap_x);
            Vec2 pB, pT, pL, pR;
            if (in00 != in10) pB = cross_pt(i, j, i + 1, j);
            if (in01 != in11) pT = cross_pt(i, j + 1, i + 1, j + 1);
            if (in00 != in01) pL = cross_pt(i, j, i, j + 1);
            if (in10 != in11) pR = cross_pt(i + 1, j, i + 1, j + 1);

            switch (c) {
                case 1: st.add_segment(L, pL, B, pB); break;
                case 2: st.add_segment(B, pB, R, pR); break;
                case 3: st.add_segment(L, pL, R, pR); break;
                case 4: st.add_segment(R, pR, T, pT); break;
                case 6: st.add_segment(B, pB, T, pT); break;
                case 7: st.add_segment(L, pL, T, pT); break;
                case 8: st.add_segment(T, pT, L, pL); break;
                case 9: st.add_segment(B, pB, T, pT); break;
                case 11: st.add_segment(R, pR, T, pT); break;
                case 12: st.add_segment(L, pL, R, pR); break;
                case 13: st.add_segment(B, pB, R, pR); break;
                case 14: st.add_segment(L, pL, B, pB); break;
                case 5: { // saddle: 00 and 11 inside
                    double avg = 0.25 * (val(i, j) + val(i + 1, j) + val(i + 1, j + 1) +
                                         val(i, j + 1));
                    if (avg <= p) {
                        st.add_segment(B, pB, R, pR);
                        st.add_segment(T, pT, L, pL);
                    } else {
                        st.add_segment(L, pL, B, pB);
                        st.add_segment(R, pR, T, pT);
                    }
                    break;
                }
                case 10: { // saddle: 10 and 01 inside
                    double avg = 0.25 * (val(i, j) + val(i + 1, j) + val(i + 1, j + 1) +
                                         val(i, j + 1));
                    if (avg <= p) {
                        st.add_segment(L, pL, B, pB);
                        st.add_segment(R, pR, T, pT);
                    } else {
                        st.add_segment(B, pB, R, pR);
                        st.add_segment(T, pT, L, pL);
                    }
                    break;
                }
                default: break;
            }
        }
    }

    if (st.adj.empty())
        fail(errc::no_curve, "no contour found at level p = " + std::to_string(p));
    for (const auto& [e, links] : st.adj) {
        if (links.size() == 1)
            fail(errc::domain_truncated, "contour at p = " + std::to_string(p) +
                                             " touches the grid bounding box");
        if (links.size() > 2)
            fail(errc::resolution, "non-manifold contour topology at p = " + std::to_string(p));
    }

    // walk closed loops; std::map keeps start selection deterministic
    std::vector<LevelCurve> out;
    std::unordered_map<EdgeId, bool> visited;
    const double h_min = std::min(grid.hx(), grid.hy());
    for (const auto& [start, links0] : st.adj) {
        if (visited[start]) continue;
        std::vector<Vec2> verts;
        EdgeId cur = start, prev = -1;
        do {
            visited[cur] = true;
            verts.push_back(st.point.at(cur));
            const auto& links = st.adj.at(cur);
            EdgeId nxt = (links[0] != prev) ? links[0] : links[1];
            prev = cur;
            cur = nxt;
        } while (cur != start);

        // drop degenerate duplicates from crossings that landed on nodes
        std::vector<Vec2> clean;
        for (Vec2 v : verts) {
            if (clean.empty() || norm(v - clean.back()) > 1e-12 * h_min) clean.push_back(v);
        }
        if (clean.size() > 1 && norm(clean.front() - clean.back()) <= 1e-12 * h_min)
            clean.pop_back();
        if (clean.size() < 16)
            fail(errc::resolution, "contour component has fewer than 16 vertices; refine the grid");

        LevelCurve c;
        c.p = p;
        c.t = state.time();
        c.topology = state.spec().topology;
        c.period = 2.0;
        c.vertices = std::move(clean);

        const int n = c.size();
        c.tau_inv.resize(n);
        c.grad_pi_norm.resize(n);
        c.normal.resize(n);
        for (int i = 0; i < n; ++i) {
            Vec2 v = c.vertices[i];
            c.tau_inv[i] = state.spec().tau_inv(v, state.time());
            Gradient g = state.spec().grad_effective_potential(v, state.time());
            double gn = norm(g.value);
            double w = state.spec().effective_potential(v, state.time());
            double dpdu = state.dPdu(std::clamp(w, 0.0, state.u_max()));
            c.grad_pi_norm[i] = dpdu * gn;
            if (!(c.grad_pi_norm[i] > 0.0))
                fail(errc::degenerate_normal, "vanishing |grad pi| on the extracted curve");
            c.normal[i] = g.value / gn;
        }

        // orient so the tangent agrees with rot90(normal)
        double vote = 0.0;
        for (int i = 0; i < n; ++i) {
            Vec2 d = c.delta(i);
            double l = norm(d);
            if (l > 0) vote += dot(d / l, rot90(c.normal[i]));
        }
        if (vote < 0.0) {
            std::reverse(c.vertices.begin(), c.vertices.end());
            std::reverse(c.tau_inv.begin(), c.tau_inv.end());
            std::reverse(c.grad_pi_norm.begin(), c.grad_pi_norm.end());
            std::reverse(c.normal.begin(), c.normal.end());
        }

        c.arclength.resize(n);
        c.arclength[0] = 0.0;
        for (int i = 1; i < n; ++i) c.arclength[i] = c.arclength[i - 1] + c.seg_len(i - 1);
        c.length = c.arclength[n - 1] + c.seg_len(n - 1);
        out.push_back(std::move(c));
    }
    return out;
}

LevelCurve extract_level_curve(const EquilibriumState& state, double p) {
    std::vector<LevelCurve> comps = extract_level_curve_components(state, p);
    if (comps.size() != 1)
        fail(errc::resolution, "expected a single closed component at p = " + std::to_string(p) +
                                   ", found " + std::to_string(comps.size()));
    return std::move(comps.front());
}

double weighted_level_integral(const LevelCurve& curve, std::span<const double> integrand) {
    if (static_cast<int>(integrand.size()) != curve.size())
        fail(errc::config, "integrand not aligned with curve vertices");
    const int n = curve.size();
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        int j = (i + 1) % n;
        double fi = integrand[i] / curve.grad_pi_norm[i];
        double fj = integrand[j] / curve.grad_pi_norm[j];
        total += 0.5 * (fi + fj) * curve.seg_len(i);
    }
    return total;
}

std::vector<double> coarea_weights(const LevelCurve& curve) {
    const int n = curve.size();
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) {
        double prev = curve.seg_len((i + n - 1) % n);
        double next = curve.seg_len(i);
        w[i] = 0.5 * (prev + next) / curve.grad_pi_norm[i];
    }
    return w;
}

} // namespace congesta
