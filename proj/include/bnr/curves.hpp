#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <functional>

#include "bnr/bnalg.hpp"

namespace bnr {

// ---------------------------------------------------------------------------
// Exact plane geometry. Curves live in the plane punctured at the integer
// lattice ("pegs"); the four tangle ends correspond to the four parity classes
// of pegs, with the special end at (even, even). Loop-form generators are the
// transversal intersections of a curve with the half-integer grid lines:
// vertical lines x = m + 1/2 carry the horizontal idempotent, horizontal
// lines y = n + 1/2 the vertical one.
// ---------------------------------------------------------------------------

using Rat = boost::multiprecision::cpp_rational;

struct Pt {
    Rat x, y;
    bool operator==(Pt const&) const = default;
};
using Poly = std::vector<Pt>;
using Peg = std::array<long long, 2>;

inline long long rfloor(Rat const& r) {
    boost::multiprecision::cpp_int n = numerator(r), d = denominator(r);
    boost::multiprecision::cpp_int q = n / d;
    if (n < 0 && q * d != n) --q;
    return (long long)q;
}
inline long long rceil(Rat const& r) { return -rfloor(-r); }
inline bool is_integer(Rat const& r) { return denominator(r) == 1; }
inline Rat cross(Pt const& o, Pt const& a, Pt const& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}
inline int sgn(Rat const& r) { return r == 0 ? 0 : (r > 0 ? 1 : -1); }

// ---------------------------------------------------------------------------
// Homotopy fingerprints. The vertical integer lines, cut at the pegs, slice
// the punctured plane into simply connected strips; the reduced sequence of
// gap crossings classifies a path up to homotopy rel endpoints. Vertices
// lying exactly on a cut line are treated as pushed infinitesimally west.
// ---------------------------------------------------------------------------

using FP = std::vector<std::array<long long, 3>>;  // (line x, gap floor(y), sign)

namespace curvedetail {

inline void fp_push(FP& f, long long i, long long j, long long s) {
    if (!f.empty() && f.back()[0] == i && f.back()[1] == j && f.back()[2] == -s) {
        f.pop_back();
        return;
    }
    f.push_back({i, j, s});
}

inline FP fingerprint(Poly const& p) {
    FP f;
    for (std::size_t k = 0; k + 1 < p.size(); ++k) {
        Pt const& a = p[k];
        Pt const& b = p[k + 1];
        if (a.x == b.x) continue;
        bool right = b.x > a.x;
        long long lo = right ? rceil(a.x) : rceil(b.x);
        long long hi = (right ? rceil(b.x) : rceil(a.x)) - 1;
        auto emit = [&](long long i) {
            Rat y = a.y + (b.y - a.y) * (Rat(i) - a.x) / (b.x - a.x);
            if (is_integer(y)) throw std::logic_error("curves: path touches a peg");
            fp_push(f, i, rfloor(y), right ? 1 : -1);
        };
        if (right)
            for (long long i = lo; i <= hi; ++i) emit(i);
        else
            for (long long i = hi; i >= lo; --i) emit(i);
    }
    return f;
}

// ---------------------------------------------------------------------------
// Marks and the embedded quiver. Marks are the wall midpoints adjacent to the
// (even, even) pegs, stored in doubled coordinates. Each mark lies on exactly
// one diamond (the S-cycle around an (even, even) peg) and one lens (the
// D-cycle around an adjacent odd peg); steps around these cycles realize the
// algebra letters.
// ---------------------------------------------------------------------------

struct Mark {
    long long x2 = 0, y2 = 0;  // doubled coordinates
    bool operator==(Mark const&) const = default;
    bool on_vert() const { return x2 & 1; }  // on a vertical half-integer line
    Pt pt() const { return {Rat(x2) / 2, Rat(y2) / 2}; }
};

inline long long par2(long long v) { return ((v % 2) + 2) % 2; }

/// Diamond pegs have both coordinates congruent to the mark parity mp.
inline Peg diamond_peg(Mark const& m, long long mp) {
    if (m.on_vert()) {
        long long xl = (m.x2 - 1) / 2;
        return {(par2(xl) == mp) ? xl : xl + 1, m.y2 / 2};
    }
    long long yl = (m.y2 - 1) / 2;
    return {m.x2 / 2, (par2(yl) == mp) ? yl : yl + 1};
}

inline Peg lens_peg(Mark const& m, long long mp) {
    if (m.on_vert()) {
        long long xl = (m.x2 - 1) / 2;
        return {(par2(xl) == mp) ? xl + 1 : xl, m.y2 / 2};
    }
    long long yl = (m.y2 - 1) / 2;
    return {m.x2 / 2, (par2(yl) == mp) ? yl + 1 : yl};
}

/// One step around the diamond of a peg; dir = +1 is counterclockwise.
/// Appends the segment's interior waypoints (none) and the next mark's point
/// to `out`, and returns the next mark.
inline Mark diamond_step(Mark const& m, int dir, Poly& out, long long mp) {
    Peg p = diamond_peg(m, mp);
    std::array<Mark, 4> cyc = {Mark{2 * p[0] + 1, 2 * p[1]}, Mark{2 * p[0], 2 * p[1] + 1},
                               Mark{2 * p[0] - 1, 2 * p[1]}, Mark{2 * p[0], 2 * p[1] - 1}};
    int i = 0;
    while (!(cyc[i] == m)) ++i;
    Mark nxt = cyc[(i + (dir > 0 ? 1 : 3)) % 4];
    out.push_back(nxt.pt());
    return nxt;
}

/// One step around the lens of a peg (a half loop to the opposite mark);
/// dir = +1 is counterclockwise.
inline Mark lens_step(Mark const& m, int dir, Poly& out, long long mp) {
    Peg p = lens_peg(m, mp);
    Rat q(1, 4);
    Mark nxt;
    Pt way;
    if (m.on_vert()) {  // lens around an (odd, even) peg, marks west/east
        bool at_w = m.x2 < 2 * p[0];
        nxt = Mark{at_w ? m.x2 + 2 : m.x2 - 2, m.y2};
        bool south = (at_w == (dir > 0));  // ccw from the west mark passes south
        way = {Rat(p[0]), Rat(p[1]) + (south ? -q : q)};
    } else {  // lens around an (even, odd) peg, marks south/north
        bool at_s = m.y2 < 2 * p[1];
        nxt = Mark{m.x2, at_s ? m.y2 + 2 : m.y2 - 2};
        bool east = (at_s == (dir > 0));  // ccw from the south mark passes east
        way = {Rat(p[0]) + (east ? q : -q), Rat(p[1])};
    }
    out.push_back(way);
    out.push_back(nxt.pt());
    return nxt;
}

struct Crossing {
    Pt p;
    bool vert = true;   // crossing of a vertical half-integer line
    long long c = 0;    // line coordinate: x = c + 1/2 resp. y = c + 1/2
    std::size_t seg = 0;  // index of the path segment carrying the crossing
    Rat t;                // parameter along that segment
};

/// The candidate anchor marks of a crossing: the nearest marks on its line
/// (marks sit at positions of parity mp, two units apart); a crossing exactly
/// on a mark anchors there.
inline std::vector<Mark> anchors(Crossing const& x, long long mp) {
    Rat pos = x.vert ? x.p.y : x.p.x;
    long long f = 2 * rfloor((pos - mp) / 2) + mp;
    auto mk = [&](long long v) {
        return x.vert ? Mark{2 * x.c + 1, 2 * v} : Mark{2 * v, 2 * x.c + 1};
    };
    if (pos == f) return {mk(f)};
    return {mk(f), mk(f + 2)};
}

struct GeomLetter {
    bool s_type = true;
    int pow = 1;
    int dir = 1;          // +1 = counterclockwise around the supporting peg
    bool lens_o = false;  // D-letters: lens around an (odd, even) peg
};

/// Parse the passage between consecutive crossings into a single algebra
/// letter: the homotopy class of anchor run + passage + anchor run must match
/// a power of one quiver edge around a single peg.
inline std::optional<GeomLetter> parse_passage(Crossing const& x, Mark const& mx,
                                               Poly const& mid, Crossing const& y,
                                               Mark const& my, long long mp) {
    Poly full;
    full.push_back(mx.pt());
    full.insert(full.end(), mid.begin(), mid.end());
    full.push_back(my.pt());
    FP want = fingerprint(full);
    int maxk = 2 * (int)want.size() + 9;

    auto walk = [&](bool s_type) -> std::optional<GeomLetter> {
        for (int dir : {1, -1}) {
            Poly cand{mx.pt()};
            Mark cur = mx;
            for (int k = 1; k <= maxk; ++k) {
                cur = s_type ? diamond_step(cur, dir, cand, mp)
                             : lens_step(cur, dir, cand, mp);
                if (cur == my && fingerprint(cand) == want)
                    return GeomLetter{s_type, k, dir, !s_type && mx.on_vert()};
            }
        }
        return std::nullopt;
    };
    if (diamond_peg(mx, mp) == diamond_peg(my, mp))
        if (auto l = walk(true)) return l;
    if (mx.on_vert() == my.on_vert() && lens_peg(mx, mp) == lens_peg(my, mp))
        if (auto l = walk(false)) return l;
    return std::nullopt;
}

/// The peg supporting a letter anchored at the given mark.
inline Peg letter_peg(GeomLetter const& l, Mark const& m, long long mp) {
    return l.s_type ? diamond_peg(m, mp) : lens_peg(m, mp);
}

}  // namespace curvedetail

// ---------------------------------------------------------------------------
// Encoding: transversal path -> loop-form word
// ---------------------------------------------------------------------------

/// Chirality and orientation conventions: whether the forward arrow of each
/// letter type runs counterclockwise around its supporting peg, and how the
/// tangle slopes embed into the plane. Pinned against the scanned complexes
/// of rational tangles.
struct CurveConventions {
    int chi_s = -1;
    int chi_do = -1;          // D of marks on vertical lines
    int chi_de = -1;          // D of marks on horizontal lines
    long long mark_parity = 1;  // diamonds sit around pegs of this parity
    bool transpose = false;   // swap the roles of the two grid-line families
    bool flip_y = true;       // arc of slope p/q lifts with negated y-direction

    int idem_of(bool vertical_line) const { return (vertical_line != transpose) ? 1 : 0; }
};

struct EncodedPath {
    LoopComponent comp;
    std::vector<curvedetail::Crossing> crossings;
};

/// Encode a PL path through the punctured plane. The path must meet the
/// half-integer grid lines transversally, away from its vertices, and avoid
/// all pegs except at its two endpoints.
///
/// The generators of the word are the crossings, but the arrows of the
/// complex need not connect crossings adjacent along the path: the
/// parametrising arcs are only isotopic to the grid lines, so the reading
/// order is a local reshuffle of the path order. Arrows are therefore sought
/// among all nearby crossing pairs whose connecting passage is a pure letter,
/// and the word is the unique single open walk those arrows assemble into.
inline std::optional<EncodedPath> encode_path(Poly const& path,
                                              CurveConventions const& cv = {},
                                              int depth = 0) {
    using namespace curvedetail;
    // interior vertices must stay clear of the half-integer grid lines
    for (std::size_t k = 1; k + 1 < path.size(); ++k) {
        auto on_line = [](Rat const& v) { return !is_integer(v) && is_integer(2 * v); };
        if (on_line(path[k].x) || on_line(path[k].y)) return std::nullopt;
    }
    // collect crossings in order along the path
    std::vector<Crossing> xs;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        Pt const& a = path[k];
        Pt const& b = path[k + 1];
        std::vector<Crossing> here;
        auto scan_lines = [&](bool vert) {
            Rat pa = vert ? a.x : a.y, pb = vert ? b.x : b.y;
            if (pa == pb) return;
            Rat lo = pa < pb ? pa : pb, hi = pa < pb ? pb : pa;
            for (long long c = rfloor(lo); Rat(2 * c + 1) < 2 * hi; ++c) {
                Rat line = Rat(2 * c + 1) / 2;
                if (line <= lo) continue;
                Rat t = (line - pa) / (pb - pa);
                Pt p{a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t};
                here.push_back({p, vert, c, k, t});
            }
        };
        scan_lines(true);
        scan_lines(false);
        std::sort(here.begin(), here.end(),
                  [](Crossing const& u, Crossing const& v) { return u.t < v.t; });
        xs.insert(xs.end(), here.begin(), here.end());
    }
    if (xs.empty()) return std::nullopt;
    // a crossing exactly on a mark is a degenerate anchor position, and a
    // crossing at a half-integer position coincides with a crossing of the
    // perpendicular line; neither point is a puncture, so nudge the path
    // slightly and retry
    for (auto const& x : xs) {
        Rat pos = x.vert ? x.p.y : x.p.x;
        bool on_mark =
            is_integer(pos) && (((rfloor(pos) - cv.mark_parity) % 2 + 2) % 2) == 0;
        bool on_center = !is_integer(pos) && is_integer(2 * pos);
        if (!on_mark && !on_center) continue;
        if (depth > 64) return std::nullopt;
        Pt const& a = path[x.seg];
        Pt const& b = path[x.seg + 1];
        int nb = sgn(x.vert ? b.x - a.x : b.y - a.y);
        for (long long sn : {1, -1, 3, -3}) {
            Rat s(sn, 32), h(sn < 0 ? -sn : sn, 256);
            Pt P = x.vert ? Pt{x.p.x + h * nb, x.p.y + s} : Pt{x.p.x + s, x.p.y + h * nb};
            auto on_line = [](Rat const& v) { return is_integer(2 * v); };
            if (on_line(P.x) || on_line(P.y)) continue;
            Poly np = path;
            np.insert(np.begin() + x.seg + 1, P);
            if (auto r = encode_path(np, cv, depth + 1)) return r;
        }
        return std::nullopt;
    }
    std::size_t n = xs.size();

    std::vector<std::vector<Mark>> cand(n);
    for (std::size_t i = 0; i < n; ++i) cand[i] = anchors(xs[i], cv.mark_parity);


    // subpath along the curve between crossings i < j
    auto subpath = [&](std::size_t i, std::size_t j) {
        Poly mid{xs[i].p};
        for (std::size_t s = xs[i].seg; s < xs[j].seg; ++s) mid.push_back(path[s + 1]);
        mid.push_back(xs[j].p);
        return mid;
    };

    // candidate arrows: letter-labelled pairs within a small path-order window
    struct Arrow {
        std::size_t i, j;
        int u, v;
        GeomLetter l;
    };
    std::size_t W = std::min<std::size_t>(n - 1, 12);
    std::vector<std::vector<Arrow>> inc(n);  // arrows by their larger endpoint j
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j <= std::min(i + W, n - 1); ++j) {
            Poly mid = subpath(i, j);
            for (std::size_t u = 0; u < cand[i].size(); ++u)
                for (std::size_t v = 0; v < cand[j].size(); ++v)
                    if (auto l = parse_passage(xs[i], cand[i][u], mid, xs[j], cand[j][v],
                                               cv.mark_parity))
                        inc[j].push_back({i, j, (int)u, (int)v, *l});
        }
    }

    // search for an anchor assignment whose arrows form one open walk
    std::vector<int> asg(n, -1), deg(n, 0);
    std::vector<Arrow> edges;
    std::optional<EncodedPath> result;

    auto validate = [&]() -> bool {
        if (edges.size() + 1 != n) return false;
        std::vector<std::vector<std::size_t>> adj(n);
        for (std::size_t e = 0; e < edges.size(); ++e) {
            adj[edges[e].i].push_back(e);
            adj[edges[e].j].push_back(e);
        }
        std::size_t start = n;
        for (std::size_t i = 0; i < n && n > 1; ++i) {
            if (adj[i].size() > 2 || adj[i].empty()) return false;
            if (adj[i].size() == 1 && start == n) start = i;
        }
        if (n == 1) start = 0;
        if (start == n) return false;

        LoopComponent comp;
        comp.open = true;
        comp.gens.push_back({cv.idem_of(xs[start].vert), 0, 0});
        std::vector<Crossing> order{xs[start]};
        std::vector<char> used(edges.size(), 0);
        std::size_t at = start;
        for (std::size_t step = 0; step + 1 < n; ++step) {
            std::size_t e = edges.size();
            for (std::size_t c : adj[at])
                if (!used[c]) e = c;
            if (e == edges.size()) return false;
            used[e] = 1;
            auto const& a = edges[e];
            bool rev = a.j == at;
            std::size_t nxt = rev ? a.i : a.j;
            int dir = rev ? -a.l.dir : a.l.dir;
            if (!comp.letters.empty() && comp.letters.back().s_type == a.l.s_type)
                return false;  // letters along a reduced walk alternate S, D
            int chi = a.l.s_type ? cv.chi_s : (a.l.lens_o ? cv.chi_do : cv.chi_de);
            bool fwd = dir == chi;
            int dq = a.l.s_type ? a.l.pow : 2 * a.l.pow;
            auto prev = comp.gens.back();
            comp.gens.push_back({cv.idem_of(xs[nxt].vert), prev.q + (fwd ? dq : -dq),
                                 prev.h + (fwd ? 1 : -1)});
            comp.letters.push_back({a.l.s_type, a.l.pow, fwd, "1"});
            bool flips = a.l.s_type && (a.l.pow % 2 == 1);
            std::size_t g = comp.gens.size() - 1;
            if ((comp.gens[g - 1].idem != comp.gens[g].idem) != flips) return false;
            order.push_back(xs[nxt]);
            at = nxt;
        }
        result = EncodedPath{std::move(comp), std::move(order)};
        return true;
    };

    std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
        if (i == n) return validate();
        for (std::size_t a = 0; a < cand[i].size(); ++a) {
            asg[i] = (int)a;
            std::size_t added = 0;
            bool ok = true;
            for (auto const& e : inc[i]) {
                if (e.v != (int)a || asg[e.i] != e.u) continue;
                if (deg[e.i] >= 2 || deg[i] >= 2) {
                    ok = false;
                    break;
                }
                edges.push_back(e);
                ++deg[e.i];
                ++deg[i];
                ++added;
            }
            // a crossing beyond the window can no longer gain arrows
            if (ok && n > 1 && i >= W && deg[i - W] == 0) ok = false;
            if (ok && rec(i + 1)) return true;
            while (added--) {
                --deg[edges.back().i];
                --deg[edges.back().j];
                edges.pop_back();
            }
        }
        asg[i] = -1;
        return false;
    };
    if (rec(0)) return result;

    // Fallback for taut representatives: a passage may attach far from its
    // crossings, and the two passages at one crossing may use different
    // marks. Draw anchor pairs per arrow from the span of the connecting
    // subpath and assemble the walk directly.
    std::vector<std::vector<Arrow>> eadj(n);
    auto marks_in_span = [&](Crossing const& x, Poly const& mid) {
        Rat pos = x.vert ? x.p.y : x.p.x;
        Rat lo = pos, hi = pos;
        for (auto const& pt : mid) {
            Rat c = x.vert ? pt.y : pt.x;
            if (c < lo) lo = c;
            if (c > hi) hi = c;
        }
        std::vector<Mark> out;
        long long mp = cv.mark_parity;
        long long f = 2 * rfloor((lo - 2 - mp) / 2) + mp;
        for (long long m = f; Rat(m) <= hi + 2; m += 2) {
            if (Rat(m) < lo - 2) continue;
            out.push_back(x.vert ? Mark{2 * x.c + 1, 2 * m} : Mark{2 * m, 2 * x.c + 1});
        }
        return out;
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j <= std::min(i + W, n - 1); ++j) {
            Poly mid = subpath(i, j);
            auto mi = marks_in_span(xs[i], mid);
            auto mj = marks_in_span(xs[j], mid);
            std::vector<GeomLetter> seen;
            for (auto const& mx : mi)
                for (auto const& my : mj)
                    if (auto l = parse_passage(xs[i], mx, mid, xs[j], my, cv.mark_parity)) {
                        bool dup = false;
                        for (auto const& s : seen)
                            dup |= s.s_type == l->s_type && s.pow == l->pow &&
                                   s.dir == l->dir && s.lens_o == l->lens_o;
                        if (dup) continue;
                        seen.push_back(*l);
                        Arrow a{i, j, 0, 0, *l};
                        eadj[i].push_back(a);
                        eadj[j].push_back(a);
                    }
        }
    }
    std::vector<char> vis(n, 0);
    long long budget = 4000000;
    std::function<bool(std::size_t, std::size_t)> go = [&](std::size_t at,
                                                           std::size_t cnt) -> bool {
        if (cnt == n) return validate();
        if (--budget < 0) return false;
        // arrows span at most W in path order, so the walk stays local
        std::size_t m = 0;
        while (m < n && vis[m]) ++m;
        if (m + 3 * W < at) return false;
        for (auto const& e : eadj[at]) {
            std::size_t nx = e.i == at ? e.j : e.i;
            if (vis[nx]) continue;
            if (!edges.empty() && edges.back().l.s_type == e.l.s_type) continue;
            vis[nx] = 1;
            edges.push_back(e);
            if (go(nx, cnt + 1)) return true;
            edges.pop_back();
            vis[nx] = 0;
        }
        return false;
    };
    for (std::size_t s = 0; s < n; ++s) {
        std::fill(vis.begin(), vis.end(), 0);
        vis[s] = 1;
        edges.clear();
        if (go(s, 1)) return result;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Tightening: rubber-band a path to its geodesic representative. The result
// is an epsilon-push-off of the singular peg-board representative: interior
// vertices sit a small offset away from their supporting pegs, endpoints stay
// exactly at their pegs.
// ---------------------------------------------------------------------------

namespace curvedetail {

inline Rat const& tighten_eps() {
    static Rat e(1, 1024);
    return e;
}

inline Peg nearest_peg(Pt const& p) {
    return {rfloor(p.x + Rat(1, 2)), rfloor(p.y + Rat(1, 2))};
}

inline bool near_peg(Pt const& p, Peg& out) {
    out = nearest_peg(p);
    Rat dx = p.x - out[0], dy = p.y - out[1];
    Rat e = 8 * tighten_eps();
    return dx < e && -dx < e && dy < e && -dy < e;
}

/// Convex chain from u to w over the pegs of S, bulging toward side sv of the
/// oriented line u -> w; collinear supports are kept.
inline std::vector<Peg> hull_chain(Pt const& u, Pt const& w, std::vector<Peg> const& S,
                                   int sv) {
    Pt d{w.x - u.x, w.y - u.y};
    struct Item {
        Rat t, s;
        Pt p;
        bool is_end;
    };
    std::vector<Item> items;
    for (auto const& z : S) {
        Pt p{Rat(z[0]), Rat(z[1])};
        Rat t = d.x * (p.x - u.x) + d.y * (p.y - u.y);
        Rat s = (d.x * (p.y - u.y) - d.y * (p.x - u.x)) * sv;
        items.push_back({t, s, p, false});
    }
    std::sort(items.begin(), items.end(), [](Item const& a, Item const& b) {
        if (a.t != b.t) return a.t < b.t;
        return a.s < b.s;
    });
    std::vector<Pt> chain{u};
    auto push = [&](Pt const& p) {
        while (chain.size() >= 2) {
            Pt const& a = chain[chain.size() - 2];
            Pt const& b = chain[chain.size() - 1];
            if (sgn(cross(a, b, p)) * sv > 0)
                chain.pop_back();
            else
                break;
        }
        chain.push_back(p);
    };
    for (auto const& it : items) push(it.p);
    push(w);
    std::vector<Peg> out;
    for (std::size_t i = 1; i + 1 < chain.size(); ++i)
        out.push_back({rfloor(chain[i].x), rfloor(chain[i].y)});
    return out;
}

inline std::vector<Peg> pegs_in_triangle(Pt const& u, Pt const& v, Pt const& w,
                                         std::vector<Peg> const& skip) {
    std::vector<Peg> out;
    Rat xs[3] = {u.x, v.x, w.x}, ys[3] = {u.y, v.y, w.y};
    long long x0 = rfloor(*std::min_element(xs, xs + 3));
    long long x1 = rceil(*std::max_element(xs, xs + 3));
    long long y0 = rfloor(*std::min_element(ys, ys + 3));
    long long y1 = rceil(*std::max_element(ys, ys + 3));
    int o = sgn(cross(u, v, w));
    for (long long x = x0; x <= x1; ++x) {
        for (long long y = y0; y <= y1; ++y) {
            if (std::find(skip.begin(), skip.end(), Peg{x, y}) != skip.end()) continue;
            Pt p{Rat(x), Rat(y)};
            if (sgn(cross(u, v, p)) * o < 0) continue;
            if (sgn(cross(v, w, p)) * o < 0) continue;
            if (sgn(cross(w, u, p)) * o < 0) continue;
            out.push_back({x, y});
        }
    }
    return out;
}

}  // namespace curvedetail

/// Tighten an open path whose endpoints are exactly at pegs.
inline Poly tighten(Poly path, int max_sweeps = 4096) {
    using namespace curvedetail;
    if (path.size() < 2) return path;
    Peg e0 = nearest_peg(path.front()), e1 = nearest_peg(path.back());
    Rat const& eps = tighten_eps();

    // drop exact duplicates
    auto dedupe = [&]() {
        Poly out;
        for (auto const& p : path)
            if (out.empty() || !(out.back() == p)) out.push_back(p);
        path = std::move(out);
    };
    dedupe();

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool changed = false;
        for (std::size_t i = 1; i + 1 < path.size();) {
            Pt u = path[i - 1], v = path[i], w = path[i + 1];
            if (v == u || v == w) {
                path.erase(path.begin() + i);
                changed = true;
                continue;
            }
            if (u == w) {  // spur
                path.erase(path.begin() + i, path.begin() + i + 2);
                changed = true;
                if (i > 1) --i;
                continue;
            }
            Rat cr = cross(u, v, w);
            if (cr == 0) {
                Rat dotp = (w.x - u.x) * (v.x - u.x) + (w.y - u.y) * (v.y - u.y);
                Rat len2 = (w.x - u.x) * (w.x - u.x) + (w.y - u.y) * (w.y - u.y);
                bool between = dotp > 0 && dotp < len2;
                Peg pv;
                if (between && near_peg(v, pv)) {
                    ++i;  // flat supporting vertex, keep
                } else {
                    path.erase(path.begin() + i);
                    changed = true;
                }
                continue;
            }
            // cr > 0 means u->v->w turns left, i.e. v lies right of the chord
            // u->w; sv = +1 selects the left bulge in hull_chain and the
            // offset normal, so flip the sign
            int sv = sgn(cr) > 0 ? -1 : 1;
            // skip the pegs the triangle corners sit on exactly (the path
            // endpoints): a support duplicating a corner is redundant.
            // Endpoint pegs stay live for interior triangles -- the path may
            // wind around its own end punctures -- and a vertex merely
            // eps-near a peg never hides it, since it may pass on either side
            std::vector<Peg> skip;
            if (i == 1) skip.push_back(e0);
            if (i + 2 == path.size()) skip.push_back(e1);
            auto S = pegs_in_triangle(u, v, w, skip);
            auto chain = hull_chain(u, w, S, sv);
            Peg pv;
            bool keep = chain.size() == 1 && near_peg(v, pv) && chain[0] == pv;
            if (keep) {
                ++i;
                continue;
            }
            // flat support masked by offsets: when the chord between the
            // snapped neighbours passes exactly through the peg v sits on,
            // v records the side of that pass and must stay
            if (near_peg(v, pv)) {
                Peg gn;
                Pt su = near_peg(u, gn) ? Pt{Rat(gn[0]), Rat(gn[1])} : u;
                Pt sw = near_peg(w, gn) ? Pt{Rat(gn[0]), Rat(gn[1])} : w;
                Pt pp{Rat(pv[0]), Rat(pv[1])};
                if (cross(su, pp, sw) == 0) {
                    Rat dotp = (sw.x - su.x) * (pp.x - su.x) + (sw.y - su.y) * (pp.y - su.y);
                    Rat len2 = (sw.x - su.x) * (sw.x - su.x) + (sw.y - su.y) * (sw.y - su.y);
                    if (dotp > 0 && dotp < len2) {
                        ++i;
                        continue;
                    }
                }
            }
            // offset each chain vertex toward the v side, along the outward
            // bisector of its two adjacent chain edges: a sharp wrap (e.g. a
            // hairpin apex) needs a diagonal push-off, a straight run the
            // plain perpendicular. Quantize to a fixed grid so vertex
            // coordinates keep bounded denominators across sweeps
            auto qz = [](Rat const& x) {
                long long den = 1 << 22;
                if (x == 0) return Rat(0);
                long long r = rfloor(x * den + Rat(1, 2));
                if (r == 0) r = x > 0 ? 1 : -1;
                return Rat(r, den);
            };
            auto unit_normal = [&](Pt const& a, Pt const& b) {
                Pt nrm{(a.y - b.y) * sv, (b.x - a.x) * sv};
                Rat m = nrm.x < 0 ? -nrm.x : nrm.x;
                Rat my = nrm.y < 0 ? -nrm.y : nrm.y;
                if (my > m) m = my;
                if (m == 0) return Pt{0, 0};
                return Pt{nrm.x / m, nrm.y / m};
            };
            Poly repl;
            {
                Poly snap{u};
                for (auto const& z : chain) snap.push_back({Rat(z[0]), Rat(z[1])});
                snap.push_back(w);
                for (std::size_t k = 1; k + 1 < snap.size(); ++k) {
                    Pt n1 = unit_normal(snap[k - 1], snap[k]);
                    Pt n2 = unit_normal(snap[k], snap[k + 1]);
                    Pt nn{n1.x + n2.x, n1.y + n2.y};
                    if (nn.x == 0 && nn.y == 0) nn = n1;
                    Rat m = nn.x < 0 ? -nn.x : nn.x;
                    Rat my = nn.y < 0 ? -nn.y : nn.y;
                    if (my > m) m = my;
                    if (m == 0) nn = Pt{Rat(sv), 0}, m = 1;
                    repl.push_back({snap[k].x + qz(nn.x * eps / m),
                                    snap[k].y + qz(nn.y * eps / m)});
                }
            }
            // an end of the offset chain duplicating a neighbour that already
            // sits eps-near the same peg is redundant; dropping it is sound
            // exactly when the swept sliver contains no peg
            Peg gr, gn3;
            if (!repl.empty() && near_peg(u, gn3) && near_peg(repl.front(), gr) && gr == gn3) {
                Pt nxtp = repl.size() > 1 ? repl[1] : w;
                if (pegs_in_triangle(u, repl.front(), nxtp, {}).empty())
                    repl.erase(repl.begin());
            }
            if (!repl.empty() && near_peg(w, gn3) && near_peg(repl.back(), gr) && gr == gn3) {
                Pt prvp = repl.size() > 1 ? repl[repl.size() - 2] : u;
                if (pegs_in_triangle(prvp, repl.back(), w, {}).empty())
                    repl.pop_back();
            }
            if (repl.size() == 1 && repl[0] == v) {
                ++i;  // already in offset position
                continue;
            }
            path.erase(path.begin() + i);
            path.insert(path.begin() + i, repl.begin(), repl.end());
            changed = true;
            if (repl.empty() && i > 1) --i;
        }
        if (!changed) return path;
    }
    throw std::runtime_error("tighten: sweep cap exceeded");
}

// ---------------------------------------------------------------------------
// Peg-path form: the combinatorial geodesic word read off a tightened path.
// Interior entries carry the side (+1 = peg left of travel, -1 = right) on
// which the curve passes its supporting peg; chords are subdivided at every
// lattice point they pass, so two geodesics agree iff their words agree.
// ---------------------------------------------------------------------------

struct PegPath {
    std::vector<Peg> pegs;   // including both endpoint pegs
    std::vector<int> side;   // side[i] belongs to pegs[i]; 0 for the endpoints
};

inline PegPath peg_path(Poly const& tight) {
    using namespace curvedetail;
    PegPath out;
    auto push = [&](Peg g, int s) {
        out.pegs.push_back(g);
        out.side.push_back(s);
    };
    push(nearest_peg(tight.front()), 0);
    for (std::size_t i = 0; i + 1 < tight.size(); ++i) {
        Pt const& a = tight[i];
        Pt const& b = tight[i + 1];
        Peg ga = nearest_peg(a), gb = nearest_peg(b);
        long long dx = gb[0] - ga[0], dy = gb[1] - ga[1];
        long long g = std::gcd(dx < 0 ? -dx : dx, dy < 0 ? -dy : dy);
        for (long long j = 1; j < g; ++j) {  // lattice points under the chord
            Peg z{ga[0] + j * dx / g, ga[1] + j * dy / g};
            int s = sgn((b.x - a.x) * (Rat(z[1]) - a.y) - (b.y - a.y) * (Rat(z[0]) - a.x));
            if (s == 0) throw std::logic_error("peg_path: chord through a peg");
            push(z, -s);  // cross sign gives the peg's side seen from the path
        }
        if (i + 2 < tight.size()) {
            Pt const& c = tight[i + 2];
            int s = sgn((c.x - a.x) * (Rat(gb[1]) - a.y) - (c.y - a.y) * (Rat(gb[0]) - a.x));
            if (s == 0) {  // flat supporting vertex: read the side off the offset
                s = -sgn((c.x - a.x) * (b.y - Rat(gb[1])) - (c.y - a.y) * (b.x - Rat(gb[0])));
            }
            if (s == 0) throw std::logic_error("peg_path: degenerate vertex");
            push(gb, -s);
        }
    }
    push(nearest_peg(tight.back()), 0);
    return out;
}

// ---------------------------------------------------------------------------
// Decoding: loop-form word -> tightened lift
// ---------------------------------------------------------------------------

enum class Puncture { SW, SE, NE };

inline char const* puncture_name(Puncture p) {
    switch (p) {
        case Puncture::SW: return "SW";
        case Puncture::SE: return "SE";
        default: return "NE";
    }
}

namespace curvedetail {

/// Parity class of the pegs lifting each puncture.
inline std::array<int, 2> puncture_parity(Puncture p, bool transpose) {
    std::array<int, 2> r;
    switch (p) {
        case Puncture::SW: r = {0, 1}; break;
        case Puncture::SE: r = {1, 1}; break;
        default: r = {1, 0};  // NE
    }
    if (transpose) std::swap(r[0], r[1]);
    return r;
}

inline std::optional<Puncture> puncture_of_peg(Peg const& g, bool transpose) {
    int a = ((g[0] % 2) + 2) % 2, b = ((g[1] % 2) + 2) % 2;
    if (transpose) std::swap(a, b);
    if (a == 0 && b == 0) return std::nullopt;  // special
    if (a == 0) return Puncture::SW;
    if (b == 0) return Puncture::NE;
    return Puncture::SE;
}

/// The two open-arc end punctures forced by the tangle connectivity.
inline std::array<Puncture, 2> arc_ends(Conn c) {
    switch (c) {
        case Conn::H: return {Puncture::SW, Puncture::SE};
        case Conn::V: return {Puncture::NE, Puncture::SE};
        default: return {Puncture::SW, Puncture::NE};  // X
    }
}

}  // namespace curvedetail

struct TautLift {
    Poly pts;      // epsilon-representative; endpoints exactly at pegs
    PegPath word;  // combinatorial geodesic form
};

/// Decode an open loop-form component into a tightened plane lift with ends at
/// pegs of the two given parity classes. Certified: the result re-encodes to
/// the input word.
inline TautLift decode_arc(LoopComponent const& comp, std::array<Puncture, 2> ends,
                           CurveConventions const& cv = {}) {
    using namespace curvedetail;
    if (!comp.open) throw std::invalid_argument("decode_arc: open component required");
    LoopComponent want = comp;
    canonicalize(want);

    auto attempt = [&](LoopComponent const& w, std::array<int, 2> sp, std::array<int, 2> ep,
                       int wall, std::size_t anchor_ix, int term,
                       int fside) -> std::optional<Poly> {
        // start peg and the first crossing on one of its cell walls
        Peg p0{sp[0], sp[1]};
        // wall 0..3: E, N, W, S wall of the start cell
        bool vert = wall == 0 || wall == 2;
        Crossing x1;
        x1.vert = vert;
        Rat foff = fside == 0 ? Rat(1, 4) : -Rat(1, 4);
        if (vert) {
            x1.c = wall == 0 ? p0[0] : p0[0] - 1;
            x1.p = {Rat(2 * x1.c + 1) / 2, Rat(p0[1]) + foff};
        } else {
            x1.c = wall == 1 ? p0[1] : p0[1] - 1;
            x1.p = {Rat(p0[0]) + foff, Rat(2 * x1.c + 1) / 2};
        }
        if (cv.idem_of(x1.vert) != w.gens[0].idem) return std::nullopt;
        auto cands = anchors(x1, cv.mark_parity);
        if (anchor_ix >= cands.size()) return std::nullopt;
        Mark mu = cands[anchor_ix];

        Poly path{{Rat(p0[0]), Rat(p0[1])}, x1.p, mu.pt()};
        Crossing cur = x1;
        for (std::size_t i = 0; i < w.letters.size(); ++i) {
            auto const& l = w.letters[i];
            bool lens_o = !l.s_type && mu.on_vert();
            int chi = l.s_type ? cv.chi_s : (lens_o ? cv.chi_do : cv.chi_de);
            int dir = l.fwd ? chi : -chi;
            for (int k = 0; k < l.pow; ++k)
                mu = l.s_type ? diamond_step(mu, dir, path, cv.mark_parity)
                              : lens_step(mu, dir, path, cv.mark_parity);
            // place the next crossing on its line next to its anchor, behind
            // the direction in which the following passage leaves the mark
            // (or past the arrival direction for the final crossing)
            int side = 0;
            if (i + 1 < w.letters.size()) {
                auto const& ln = w.letters[i + 1];
                bool lo = !ln.s_type && mu.on_vert();
                int chn = ln.s_type ? cv.chi_s : (lo ? cv.chi_do : cv.chi_de);
                int dn = ln.fwd ? chn : -chn;
                Mark tmp = mu;
                Poly scratch{mu.pt()};
                tmp = ln.s_type ? diamond_step(tmp, dn, scratch, cv.mark_parity)
                                : lens_step(tmp, dn, scratch, cv.mark_parity);
                Pt const& w1 = scratch[1];
                Rat delta = mu.on_vert() ? w1.y - Rat(mu.y2) / 2 : w1.x - Rat(mu.x2) / 2;
                side = -sgn(delta);
            } else {
                Pt const& wa = path[path.size() - 2];
                Rat delta = mu.on_vert() ? Rat(mu.y2) / 2 - wa.y : Rat(mu.x2) / 2 - wa.x;
                side = sgn(delta);
                if (term & 2) side = -side;  // both terminal sides are viable
            }
            Rat off = side >= 0 ? Rat(1, 4) : -Rat(1, 4);
            Crossing nxt;
            nxt.vert = mu.on_vert();
            if (nxt.vert) {
                nxt.c = (mu.x2 - 1) / 2;
                nxt.p = {Rat(mu.x2) / 2, Rat(mu.y2) / 2 + off};
            } else {
                nxt.c = (mu.y2 - 1) / 2;
                nxt.p = {Rat(mu.x2) / 2 + off, Rat(mu.y2) / 2};
            }
            if (cv.idem_of(nxt.vert) != w.gens[i + 1].idem) return std::nullopt;
            path.push_back(nxt.p);
            path.push_back(mu.pt());
            path.push_back(nxt.p);
            cur = nxt;
        }
        // terminal arc into an adjacent peg of the required parity; the peg
        // may sit on either side of the final crossing along its line
        Rat pos = cur.vert ? cur.p.y : cur.p.x;
        long long other = (term & 1) == 0 ? rfloor(pos) : rfloor(pos) + 1;
        Peg a = cur.vert ? Peg{cur.c, other} : Peg{other, cur.c};
        Peg b = cur.vert ? Peg{cur.c + 1, other} : Peg{other, cur.c + 1};
        auto par = [](Peg g) {
            return std::array<int, 2>{(int)(((g[0] % 2) + 2) % 2), (int)(((g[1] % 2) + 2) % 2)};
        };
        Peg pe;
        if (par(a) == ep) pe = a;
        else if (par(b) == ep) pe = b;
        else return std::nullopt;
        path.push_back({Rat(pe[0]), Rat(pe[1])});
        return path;
    };

    std::array<int, 2> pa = puncture_parity(ends[0], cv.transpose);
    std::array<int, 2> pb = puncture_parity(ends[1], cv.transpose);
    for (int rev = 0; rev < 2; ++rev) {
        LoopComponent w = comp;
        if (rev) reverse_walk(w);
        for (auto const& [sp, ep] : {std::pair{pa, pb}, std::pair{pb, pa}}) {
            for (int wall = 0; wall < 4; ++wall) {
                for (std::size_t ai = 0; ai < 2; ++ai) {
                  for (int term = 0; term < 4; ++term) {
                   for (int fside = 0; fside < 2; ++fside) {
                    auto p = attempt(w, sp, ep, wall, ai, term, fside);
                    if (!p) continue;
                    Poly tp;
                    try {
                        tp = tighten(*p);
                        auto enc = encode_path(tp, cv);
                        if (!enc) continue;
                        canonicalize(enc->comp);
                        if (!equal_up_to_shift(enc->comp, want)) continue;
                    } catch (std::exception const&) {
                        continue;
                    }
                    return TautLift{tp, peg_path(tp)};
                   }
                  }
                }
            }
        }
    }
    throw std::runtime_error("decode_arc: no certified lift found");
}

// ---------------------------------------------------------------------------
// Curves with geometry: the open component of a tangle invariant, lifted and
// tightened. Gradings always come from the complex; the lift only carries the
// unoriented geometry.
// ---------------------------------------------------------------------------

struct MultiCurve {
    LoopForm form;
    Conn conn = Conn::H;
    TautLift arc;
    CurveConventions cv;
};

template <class F>
MultiCurve multicurve(F field, TangleDiagram const& d, CurveConventions const& cv = {}) {
    MultiCurve mc;
    mc.cv = cv;
    mc.form = loop_form(tangle_invariant(std::move(field), d));
    mc.conn = classify(d).first;
    mc.arc = decode_arc(mc.form.open_component(), curvedetail::arc_ends(mc.conn), cv);
    return mc;
}

/// End of the arc lift lying at the given puncture: 0 = front, 1 = back.
inline int arc_end_at(TautLift const& l, Puncture p, CurveConventions const& cv = {}) {
    using namespace curvedetail;
    auto f = puncture_of_peg(l.word.pegs.front(), cv.transpose);
    auto b = puncture_of_peg(l.word.pegs.back(), cv.transpose);
    if (f && *f == p) return 0;
    if (b && *b == p) return 1;
    throw std::invalid_argument("curve has no end at the requested puncture");
}

/// Oriented peg word starting from the given end.
inline PegPath from_end(PegPath w, int end) {
    if (end == 1) {
        std::reverse(w.pegs.begin(), w.pegs.end());
        std::reverse(w.side.begin(), w.side.end());
        for (auto& s : w.side) s = -s;
    }
    return w;
}

inline Slope slope_at(MultiCurve const& mc, Puncture p) {
    auto w = from_end(mc.arc.word, arc_end_at(mc.arc, p, mc.cv));
    long long dx = w.pegs[1][0] - w.pegs[0][0];
    long long dy = w.pegs[1][1] - w.pegs[0][1];
    if (mc.cv.transpose) std::swap(dx, dy);
    if (mc.cv.flip_y) dy = -dy;
    return Slope(dy, dx);
}

// ---------------------------------------------------------------------------
// Germ comparison at a puncture: angular order of curve ends on a small
// circle, ties broken by walking outward to the first divergence.
// ---------------------------------------------------------------------------

namespace curvedetail {

/// Counterclockwise angular comparison of nonzero direction vectors on the
/// quotient circle (directions are doubled: the lift is only defined up to
/// the half-turn deck transformation).
struct Dir {
    long long x = 0, y = 0;
};

inline Dir doubled(long long dx, long long dy) {
    return {dx * dx - dy * dy, 2 * dx * dy};
}

inline int halfplane(Dir const& d) { return (d.y > 0 || (d.y == 0 && d.x > 0)) ? 0 : 1; }

/// Strict ccw order from the positive x-axis; 0 if equal directions.
inline int cmp_angle(Dir const& a, Dir const& b) {
    int ha = halfplane(a), hb = halfplane(b);
    if (ha != hb) return ha < hb ? -1 : 1;
    long long cr = a.x * b.y - a.y * b.x;
    return cr > 0 ? -1 : (cr < 0 ? 1 : 0);
}

/// ccw angle order around the base direction: returns -1 if the ccw angle
/// from base to a is smaller than from base to b.
inline int cmp_around(Dir const& base, Dir a, Dir b) {
    auto angle_class = [&](Dir const& d) {
        long long cr = base.x * d.y - base.y * d.x;
        long long dt = base.x * d.x + base.y * d.y;
        if (cr == 0 && dt > 0) return 0;  // along base
        if (cr > 0) return 1;             // first half turn ccw
        if (cr == 0) return 2;            // opposite
        return 3;                         // second half turn
    };
    int ca = angle_class(a), cb = angle_class(b);
    if (ca != cb) return ca < cb ? -1 : 1;
    long long cr = a.x * b.y - a.y * b.x;
    return cr > 0 ? -1 : (cr < 0 ? 1 : 0);
}

/// Walk two aligned peg words from a common start peg with identical initial
/// direction; -1/1 orders the first divergence (left of the other = greater),
/// 0 means identical words.
inline int walk_compare(PegPath const& A, PegPath const& B) {
    std::size_t n = std::min(A.pegs.size(), B.pegs.size());
    for (std::size_t k = 1; k < n; ++k) {
        if (A.pegs[k] != B.pegs[k]) {
            Peg c = A.pegs[k - 1];
            Dir u{c[0] - A.pegs[k > 1 ? k - 2 : 0][0], c[1] - A.pegs[k > 1 ? k - 2 : 0][1]};
            if (k == 1) u = {0, 0};
            Dir da{A.pegs[k][0] - c[0], A.pegs[k][1] - c[1]};
            Dir db{B.pegs[k][0] - c[0], B.pegs[k][1] - c[1]};
            Dir back{-u.x, -u.y};
            if (u.x == 0 && u.y == 0)
                throw std::logic_error("walk_compare: divergence at aligned start");
            // larger ccw angle from the reversed approach = veers further left
            int c2 = cmp_around(back, da, db);
            return c2 < 0 ? -1 : 1;
        }
        bool ea = k + 1 == A.pegs.size(), eb = k + 1 == B.pegs.size();
        int sa = ea ? 0 : A.side[k];
        int sb = eb ? 0 : B.side[k];
        if (ea && eb) {
            if (A.pegs.size() == B.pegs.size()) return 0;
            // one word ends here, the other has this as its last peg too
        }
        if (sa != sb) return sa > sb ? 1 : -1;  // passing left (+1) is greater
        if (ea || eb) {
            // equal sides impossible when one path terminates (side 0 is
            // reserved for endpoints), handled above
            return ea ? -1 : 1;
        }
    }
    return A.pegs.size() == B.pegs.size() ? 0 : (A.pegs.size() < B.pegs.size() ? -1 : 1);
}

/// Translate a peg word by an even lattice vector and optionally rotate it by
/// a half turn about its start peg (both are deck transformations).
inline PegPath align_to(PegPath w, Peg target, bool flip) {
    Peg s = w.pegs.front();
    long long tx = target[0] - s[0], ty = target[1] - s[1];
    if (((tx % 2) + 2) % 2 != 0 || ((ty % 2) + 2) % 2 != 0)
        throw std::logic_error("align_to: parity mismatch");
    for (auto& g : w.pegs) {
        g[0] += tx;
        g[1] += ty;
        if (flip) {
            g[0] = 2 * target[0] - g[0];
            g[1] = 2 * target[1] - g[1];
        }
    }
    return w;
}

struct Germ {
    PegPath w;  // oriented outward from the shared peg
    Dir d0;     // doubled initial direction (lift-choice independent)
};

inline Germ germ_at(MultiCurve const& mc, Puncture p, Peg anchor) {
    auto w = from_end(mc.arc.word, arc_end_at(mc.arc, p, mc.cv));
    w = align_to(std::move(w), anchor, false);
    Dir d = doubled(w.pegs[1][0] - anchor[0], w.pegs[1][1] - anchor[1]);
    return {std::move(w), d};
}

/// Trichotomy on germs at a shared puncture; -1 = a before b in ccw order
/// from the reference axis, 0 = identical curve ends.
inline int cmp_germ(Germ const& a, Germ const& b) {
    int c = cmp_angle(a.d0, b.d0);
    if (c != 0) return c;
    // equal quotient directions: align the plane lifts and walk
    Peg s = a.w.pegs.front();
    long long ax = a.w.pegs[1][0] - s[0], ay = a.w.pegs[1][1] - s[1];
    long long bx = b.w.pegs[1][0] - s[0], by = b.w.pegs[1][1] - s[1];
    bool flip = ax * bx + ay * by < 0;  // antipodal lift: rotate by a half turn
    PegPath bb = align_to(b.w, s, flip);
    long long g = std::gcd(ax < 0 ? -ax : ax, ay < 0 ? -ay : ay);
    long long h = std::gcd(bx < 0 ? -bx : bx, by < 0 ? -by : by);
    (void)g;
    (void)h;
    return walk_compare(a.w, bb);
}

}  // namespace curvedetail

/// The <_p comparison of two curve ends with equal slope at p:
/// -1 if a <_p b, 0 if the ends coincide, 1 if a >_p b.
inline int order_at(MultiCurve const& a, MultiCurve const& b, Puncture p) {
    using namespace curvedetail;
    Peg anchor = from_end(a.arc.word, arc_end_at(a.arc, p, a.cv)).pegs.front();
    Germ ga = germ_at(a, p, anchor);
    Germ gb = germ_at(b, p, anchor);
    return cmp_germ(ga, gb);
}

/// Cyclic-order intersection number of two formal pairs of curve ends at p:
/// 1 iff all four germs are distinct and (g1, g1p, g2, g2p) sit in this
/// counterclockwise cyclic order around the puncture.
inline int i_p(MultiCurve const& g1, MultiCurve const& g1p, MultiCurve const& g2,
               MultiCurve const& g2p, Puncture p) {
    using namespace curvedetail;
    Peg anchor = from_end(g1.arc.word, arc_end_at(g1.arc, p, g1.cv)).pegs.front();
    std::array<Germ, 4> g = {germ_at(g1, p, anchor), germ_at(g1p, p, anchor),
                             germ_at(g2, p, anchor), germ_at(g2p, p, anchor)};
    std::array<int, 4> rank{};
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            if (i == j) continue;
            int c = cmp_germ(g[i], g[j]);
            if (c == 0 && i < j) return 0;  // coinciding ends: never ordered
            if (c > 0) ++rank[i];
        }
    }
    // strict cyclic order g0 -> g1 -> g2 -> g3 counterclockwise
    int r0 = rank[0];
    for (int i = 1; i < 4; ++i)
        if (rank[i] != (r0 + i) % 4) return 0;
    return 1;
}

// ---------------------------------------------------------------------------
// Twisting: the mapping class action on lifts is an integer shear; the word
// and gradings of the twisted curve are recomputed by re-encoding the sheared
// lift.
// ---------------------------------------------------------------------------

enum class TwistGen { HorPos, HorNeg, VertPos, VertNeg };

inline MultiCurve twist(MultiCurve const& mc, std::vector<TwistGen> const& word) {
    Poly p = mc.arc.pts;
    for (auto t : word) {
        for (auto& z : p) {
            switch (t) {
                case TwistGen::HorPos: z.y = z.y + z.x; break;
                case TwistGen::HorNeg: z.y = z.y - z.x; break;
                case TwistGen::VertPos: z.x = z.x + z.y; break;
                case TwistGen::VertNeg: z.x = z.x - z.y; break;
            }
        }
    }
    Poly tp = tighten(p);
    auto enc = encode_path(tp, mc.cv);
    if (!enc) throw std::runtime_error("twist: re-encoding failed");
    canonicalize(enc->comp);
    MultiCurve out;
    out.cv = mc.cv;
    out.arc = TautLift{tp, peg_path(tp)};
    LoopForm f;
    f.comps.push_back(enc->comp);
    out.form = std::move(f);
    // connectivity follows the puncture classes of the sheared ends
    using namespace curvedetail;
    auto f0 = puncture_of_peg(out.arc.word.pegs.front(), mc.cv.transpose);
    auto f1 = puncture_of_peg(out.arc.word.pegs.back(), mc.cv.transpose);
    if (!f0 || !f1) throw std::logic_error("twist: end at the special puncture");
    auto has = [&](Puncture q) { return *f0 == q || *f1 == q; };
    out.conn = has(Puncture::SW) ? (has(Puncture::SE) ? Conn::H : Conn::X) : Conn::V;
    return out;
}

// ---------------------------------------------------------------------------
// SVG emission of lifted curves: grid, pegs by parity, curve polylines.
// ---------------------------------------------------------------------------

inline std::string svg_lifts(std::vector<TautLift> const& lifts) {
    long long x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    for (auto const& l : lifts) {
        for (auto const& g : l.word.pegs) {
            x0 = std::min(x0, g[0] - 1);
            x1 = std::max(x1, g[0] + 1);
            y0 = std::min(y0, g[1] - 1);
            y1 = std::max(y1, g[1] + 1);
        }
    }
    int const u = 40;
    auto X = [&](Rat const& x) {
        return (double)((x - x0) * u).convert_to<double>();
    };
    auto Y = [&](Rat const& y) {
        return (double)((Rat(y1) - y) * u).convert_to<double>();
    };
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << (x1 - x0) * u
       << "\" height=\"" << (y1 - y0) * u << "\">\n";
    for (long long x = x0; x <= x1; ++x)
        os << "<line x1=\"" << X(Rat(x)) << "\" y1=\"" << Y(Rat(y0)) << "\" x2=\""
           << X(Rat(x)) << "\" y2=\"" << Y(Rat(y1))
           << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
    for (long long y = y0; y <= y1; ++y)
        os << "<line x1=\"" << X(Rat(x0)) << "\" y1=\"" << Y(Rat(y)) << "\" x2=\""
           << X(Rat(x1)) << "\" y2=\"" << Y(Rat(y))
           << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
    for (long long x = x0; x <= x1; ++x) {
        for (long long y = y0; y <= y1; ++y) {
            bool ex = ((x % 2) + 2) % 2 == 0, ey = ((y % 2) + 2) % 2 == 0;
            char const* col = ex && ey ? "#000" : (ex ? "#c33" : (ey ? "#33c" : "#393"));
            os << "<circle cx=\"" << X(Rat(x)) << "\" cy=\"" << Y(Rat(y))
               << "\" r=\"3\" fill=\"" << col << "\"/>\n";
        }
    }
    char const* colors[] = {"#e07000", "#7000e0", "#00a0a0", "#a00070"};
    for (std::size_t i = 0; i < lifts.size(); ++i) {
        os << "<polyline fill=\"none\" stroke=\"" << colors[i % 4]
           << "\" stroke-width=\"2\" points=\"";
        for (auto const& p : lifts[i].pts) os << X(p.x) << "," << Y(p.y) << " ";
        os << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace bnr
