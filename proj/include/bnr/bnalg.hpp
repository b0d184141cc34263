#pragma once

#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "bnr/cobcat.hpp"

namespace bnr {

/// Type-D structure over the arc algebra: generators carry an idempotent
/// (0 = vertical/•, 1 = horizontal/∘) and a bigrading; the differential is a
/// sparse matrix whose entries are single monomials c*S^a (idempotent-switching
/// for odd a) or c*D^m, with S.D = D.S = 0. A same-idempotent cobordism entry
/// alpha*H^k*id + beta*H^(k-1)*dot expands as alpha*D^k + (alpha+beta)*S^(2k),
/// so one object pair can carry one S- and one D-arrow simultaneously.
template <class F>
struct TypeD {
    using Elem = typename F::Elem;
    struct Gen {
        int idem = 0;
        int q = 0, h = 0;
    };
    struct Arrow {
        Elem c;
        int pow = 0;
    };
    F field;
    std::vector<Gen> gens;
    std::map<std::pair<int, int>, Arrow> sd;  // S-type arrows
    std::map<std::pair<int, int>, Arrow> dd;  // D-type arrows

    explicit TypeD(F f) : field(std::move(f)) {}
};

namespace detail {

/// Boundary point id of each compass end of a scanned 4-ended tangle.
inline std::array<int, 4> compass_points(TangleDiagram const& d) {
    std::array<int, 4> pt{};
    int a = d.top_arity;
    int w = d.ends - a;
    for (int s = 0; s < 4; ++s) {
        int id = s < a ? s : Flat::bottom_id(a, w, s - a);
        pt[(int)d.slot_end[s]] = id;
    }
    return pt;
}

}  // namespace detail

/// Translate a fully scanned, reduced 4-ended complex into a type-D structure.
template <class F>
TypeD<F> to_typeD(ScanResult<F>& r, TangleDiagram const& d) {
    auto& cx = r.cx;
    if (d.ends != 4 || cx.a + cx.w != 4)
        throw std::invalid_argument("to_typeD: fully scanned 4-ended tangle required");
    auto pt = detail::compass_points(d);
    TypeD<F> t(cx.field);

    std::vector<int> gidx(cx.obs.size(), -1);
    for (std::size_t i = 0; i < cx.obs.size(); ++i) {
        auto const& o = cx.obs[i];
        if (!o.alive) continue;
        int partner = o.flat.m[pt[(int)End::NW]];
        int idem;
        if (partner == pt[(int)End::SW]) idem = 0;        // vertical pairing: •
        else if (partner == pt[(int)End::NE]) idem = 1;   // horizontal pairing: ∘
        else throw std::logic_error("to_typeD: non-planar end pairing");
        gidx[i] = (int)t.gens.size();
        t.gens.push_back({idem, o.q + r.q_shift(), o.h + r.h_shift()});
    }

    for (auto const& [ij, e] : cx.diff) {
        auto [i, j] = ij;
        if (gidx[i] < 0 || gidx[j] < 0 || e.empty()) continue;
        int gi = gidx[i], gj = gidx[j];
        if (t.gens[gi].idem != t.gens[gj].idem) {
            // saddle-type: single term c * H^k * S = c * S^(2k+1)
            if (e.size() != 1) throw std::logic_error("to_typeD: inhomogeneous saddle entry");
            auto const& [key, c] = *e.begin();
            if (key.first != 0) throw std::logic_error("to_typeD: dotted saddle entry");
            t.sd[{gi, gj}] = {c, 2 * key.second + 1};
        } else {
            // same idempotent: two boundary circles, the non-special one may be dotted
            auto cyc = cycles(cx.obs[i].flat, cx.obs[j].flat);
            if (cyc.count != 2) throw std::logic_error("to_typeD: unexpected circle count");
            typename F::Elem alpha = cx.field.zero(), beta = cx.field.zero();
            int k = -1;
            for (auto const& [key, c] : e) {
                if (key.first == 0) {
                    if (k >= 0 && k != key.second) throw std::logic_error("to_typeD: mixed powers");
                    k = key.second;
                    alpha = c;
                } else {
                    if (k >= 0 && k != key.second + 1) throw std::logic_error("to_typeD: mixed powers");
                    k = key.second + 1;
                    beta = c;
                }
            }
            if (k < 1) throw std::logic_error("to_typeD: identity entry survived reduction");
            if (!cx.field.is_zero(alpha)) t.dd[{gi, gj}] = {alpha, k};
            auto s = cx.field.add(alpha, beta);
            if (!cx.field.is_zero(s)) t.sd[{gi, gj}] = {s, 2 * k};
        }
    }
    return t;
}

/// Scan + translate in one step.
template <class F>
TypeD<F> tangle_invariant(F field, TangleDiagram const& d,
                          std::size_t max_objects = std::size_t(1) << 20) {
    auto r = scan(std::move(field), d, max_objects);
    return to_typeD(r, d);
}

/// Mirror: arrows reversed, gradings negated.
template <class F>
TypeD<F> mirror(TypeD<F> const& t) {
    TypeD<F> m(t.field);
    m.gens = t.gens;
    for (auto& g : m.gens) { g.q = -g.q; g.h = -g.h; }
    for (auto const& [ij, a] : t.sd) m.sd[{ij.second, ij.first}] = a;
    for (auto const& [ij, a] : t.dd) m.dd[{ij.second, ij.first}] = a;
    return m;
}

// ---------------------------------------------------------------------------
// loop form
// ---------------------------------------------------------------------------

/// A loop-form component: a walk through generators connected by letters.
/// letters[i] sits between gens[i] and gens[i+1] (mod size for compact
/// components); fwd means the arrow points in the reading direction.
struct LoopComponent {
    struct G {
        int idem = 0, q = 0, h = 0;
        auto operator<=>(G const&) const = default;
    };
    struct L {
        bool s_type = true;
        int pow = 1;
        bool fwd = true;
        std::string coeff = "1";  // normalized; only compact holonomy can differ
        auto operator<=>(L const&) const = default;
    };
    bool open = true;
    std::vector<G> gens;
    std::vector<L> letters;
    auto operator<=>(LoopComponent const&) const = default;
};

struct LoopForm {
    std::vector<LoopComponent> comps;
    /// Entries that could not be brought to valence <= 2 (never seen over F_2;
    /// kept opaque instead of failing the pipeline).
    std::string residue;

    LoopComponent const& open_component() const {
        LoopComponent const* found = nullptr;
        for (auto const& c : comps) {
            if (!c.open) continue;
            if (found) throw std::logic_error("multiple open loop-form components");
            found = &c;
        }
        if (!found) throw std::logic_error("no open loop-form component");
        return *found;
    }
};

inline std::string serialize(LoopComponent const& c) {
    std::ostringstream os;
    os << (c.open ? "arc" : "loop") << " [g(" << c.gens[0].q << "," << c.gens[0].h << ","
       << (c.gens[0].idem == 0 ? "." : "o") << ")]";
    for (auto const& l : c.letters) {
        os << " " << (l.s_type ? "S" : "D") << l.pow;
        if (!l.fwd) os << "'";
        if (l.coeff != "1") os << "*" << l.coeff;
    }
    return os.str();
}

inline std::string serialize(LoopForm const& f) {
    std::vector<std::string> lines;
    for (auto const& c : f.comps) lines.push_back(serialize(c));
    std::sort(lines.begin(), lines.end(), [](auto const& a, auto const& b) {
        bool ao = a.rfind("arc", 0) == 0, bo = b.rfind("arc", 0) == 0;
        if (ao != bo) return ao;
        return a < b;
    });
    std::string out;
    for (auto const& l : lines) { out += l; out += "\n"; }
    if (!f.residue.empty()) out += "residue " + f.residue + "\n";
    return out;
}

namespace detail {

template <class F>
struct Cleaner {
    using Arrow = typename TypeD<F>::Arrow;
    using Graph = std::map<std::pair<int, int>, Arrow>;
    F& field;
    Graph& sd;
    Graph& dd;
    long long steps = 0;
    long long cap = 1000000;
    std::mt19937 rng{20290};

    void add(Graph& g, int i, int j, typename F::Elem c, int pow) {
        if (field.is_zero(c)) return;
        auto it = g.find({i, j});
        if (it == g.end()) {
            g[{i, j}] = {c, pow};
            return;
        }
        if (it->second.pow != pow)
            throw std::logic_error("loop_form: inhomogeneous arrow accumulation");
        it->second.c = field.add(it->second.c, c);
        if (field.is_zero(it->second.c)) g.erase(it);
    }

    /// Base change y <- y + lambda * z with lambda = c * L^dl, where L is the
    /// letter of graph g. Row y gains lambda * (arrows out of z); column z
    /// loses (arrows into y) * lambda. For dl > 0 the corrections stay inside
    /// g (the two letters annihilate each other), for dl == 0 lambda is a
    /// scalar and the corrections hit the other graph as well.
    void mix(Graph& g, int y, int z, typename F::Elem const& lam, int dl) {
        auto apply = [&](Graph& h, int shift) {
            std::vector<std::tuple<int, int, typename F::Elem, int>> delta;
            for (auto const& [ij, a] : h) {
                if (ij.first == z) {
                    if (ij.second == y) throw std::logic_error("loop_form: grading clash");
                    delta.push_back({y, ij.second, field.mul(lam, a.c), shift + a.pow});
                }
                if (ij.second == y)
                    delta.push_back({ij.first, z, field.neg(field.mul(a.c, lam)), a.pow + shift});
            }
            for (auto const& [i, j, c, p] : delta) add(h, i, j, c, p);
        };
        apply(g, dl);
        if (dl == 0) apply(&g == &sd ? dd : sd, 0);
    }

    /// Isolate the globally shortest conflicted arrow, i.e. clear all other
    /// arrows out of its source and into its target. Every mix removes one
    /// such arrow and never adds one back, so isolation terminates; the pivot
    /// stays globally minimal throughout, keeping all letter quotients valid.
    /// Returns false when both graphs already have at most one arrow per row
    /// and per column.
    bool step() {
        // candidate pivots: all conflicted arrows of globally minimal power.
        // A deterministic choice can enter a cycle where isolating one pivot
        // breaks another and vice versa, so draw from a fixed-seed generator;
        // the final loop form is unique either way.
        std::vector<std::pair<Graph*, std::pair<int, int>>> cands;
        int best_pow = 0;
        auto consider = [&](Graph& g) {
            std::map<int, int> out_deg, in_deg;
            for (auto const& [ij, a] : g) {
                ++out_deg[ij.first];
                ++in_deg[ij.second];
            }
            for (auto const& [ij, a] : g) {
                if (out_deg[ij.first] < 2 && in_deg[ij.second] < 2) continue;
                if (cands.empty() || a.pow < best_pow) {
                    cands.clear();
                    best_pow = a.pow;
                }
                if (a.pow == best_pow) cands.push_back({&g, ij});
            }
        };
        consider(sd);
        consider(dd);
        if (cands.empty()) return false;
        auto pick = cands[rng() % cands.size()];
        Graph& g = *pick.first;
        auto [x, y] = pick.second;
        for (;;) {
            if (++steps > cap) throw std::runtime_error("loop_form: iteration cap exceeded");
            auto pivot = g.at({x, y});
            std::pair<int, Arrow> conflict{-1, {}};
            bool row = true;
            for (auto const& [ij, a] : g) {
                if (ij.first == x && ij.second != y &&
                    (conflict.first < 0 || a.pow < conflict.second.pow)) {
                    conflict = {ij.second, a};
                    row = true;
                }
            }
            if (conflict.first < 0) {
                for (auto const& [ij, a] : g) {
                    if (ij.second == y && ij.first != x &&
                        (conflict.first < 0 || a.pow < conflict.second.pow)) {
                        conflict = {ij.first, a};
                        row = false;
                    }
                }
            }
            if (conflict.first < 0) return true;
            auto lam = field.div(conflict.second.c, pivot.c);
            int dl = conflict.second.pow - pivot.pow;
            if (dl < 0) throw std::logic_error("loop_form: pivot not minimal");
            if (row) {
                // conflict x -> z: substitute y = y' - lambda z; the pivot's
                // contribution to column z cancels the conflict arrow
                mix(g, y, conflict.first, lam, dl);
            } else {
                // conflict w -> y: substitute w' = w - lambda x; the pivot's
                // contribution to row w cancels the conflict arrow
                mix(g, conflict.first, x, field.neg(lam), dl);
            }
        }
    }
};

}  // namespace detail

inline void reverse_walk(LoopComponent& c);
inline void rotate_walk(LoopComponent& c, int k);
inline void canonicalize(LoopComponent& c);

/// Reduce a type-D structure to loop form by Clean-Up base changes. Since
/// S.D = D.S = 0, a base change along a positive letter power only corrects
/// arrows of its own type; scalar base changes (equal powers) touch both
/// graphs. Alternation of letter types along each component is automatic.
template <class F>
LoopForm loop_form(TypeD<F> const& t, long long iteration_cap = 1000000) {
    auto sd = t.sd;
    auto dd = t.dd;
    F field = t.field;
    detail::Cleaner<F> cl{field, sd, dd, 0, iteration_cap};
    while (cl.step()) {}

    int n = (int)t.gens.size();
    struct Edge {
        int from, to, pow;
        bool s_type;
        typename F::Elem c;
    };
    std::vector<Edge> edges;
    for (auto const& [ij, a] : sd) edges.push_back({ij.first, ij.second, a.pow, true, a.c});
    for (auto const& [ij, a] : dd) edges.push_back({ij.first, ij.second, a.pow, false, a.c});

    std::vector<std::vector<int>> inc(n);
    for (int e = 0; e < (int)edges.size(); ++e) {
        inc[edges[e].from].push_back(e);
        inc[edges[e].to].push_back(e);
    }
    LoopForm lf;
    std::ostringstream residue;
    std::vector<bool> bad(n, false);
    for (int v = 0; v < n; ++v) {
        if (inc[v].size() <= 2) continue;
        bad[v] = true;
        residue << "valence " << inc[v].size() << " at generator " << v << "; ";
    }
    std::vector<bool> used_gen(n, false), used_edge(edges.size(), false);
    for (int v = 0; v < n; ++v)
        if (bad[v]) used_gen[v] = true;

    auto emit = [&](int start, bool open) {
        LoopComponent comp;
        comp.open = open;
        std::vector<typename F::Elem> coeffs;
        int cur = start;
        int prev_edge = -1;
        for (;;) {
            used_gen[cur] = true;
            comp.gens.push_back({t.gens[cur].idem, t.gens[cur].q, t.gens[cur].h});
            int next_edge = -1;
            for (int e : inc[cur])
                if (e != prev_edge && !used_edge[e]) next_edge = e;
            if (next_edge < 0) break;
            used_edge[next_edge] = true;
            auto const& ed = edges[next_edge];
            bool fwd = ed.from == cur;
            int nxt = fwd ? ed.to : ed.from;
            comp.letters.push_back({ed.s_type, ed.pow, fwd, "1"});
            coeffs.push_back(ed.c);
            prev_edge = next_edge;
            if (nxt == start && !open) break;
            cur = nxt;
        }
        // normalize: rescale generators along the walk so every coefficient
        // becomes 1; any residual holonomy of a compact component lands on the
        // closing letter
        auto scale = field.one();
        for (std::size_t i = 0; i < comp.letters.size(); ++i) {
            auto cc = coeffs[i];
            auto& l = comp.letters[i];
            bool closing = !comp.open && i + 1 == comp.letters.size();
            if (closing) {
                auto hol = l.fwd ? field.mul(cc, scale) : field.div(cc, scale);
                l.coeff = field.str(hol);
            } else {
                scale = l.fwd ? field.mul(cc, scale) : field.div(scale, cc);
            }
        }
        lf.comps.push_back(std::move(comp));
    };

    // open components start at a generator with at most one incident edge
    for (int v = 0; v < n; ++v)
        if (!used_gen[v] && inc[v].size() <= 1) emit(v, true);
    // the rest are compact cycles
    for (int v = 0; v < n; ++v)
        if (!used_gen[v]) emit(v, false);

    for (int e = 0; e < (int)edges.size(); ++e)
        if (!used_edge[e])
            residue << "arrow " << edges[e].from << "->" << edges[e].to << "; ";
    lf.residue = residue.str();

    // letter-type alternation along every component is automatic (a same-type
    // pair at one generator would contradict d^2 = 0); verify anyway
    for (auto const& c : lf.comps) {
        for (std::size_t i = 0; i + 1 < c.letters.size(); ++i)
            if (c.letters[i].s_type == c.letters[i + 1].s_type)
                throw std::logic_error("loop_form: letter alternation violated");
        if (!c.open && c.letters.size() > 1 &&
            c.letters.front().s_type == c.letters.back().s_type)
            throw std::logic_error("loop_form: letter alternation violated");
    }

    for (auto& c : lf.comps) canonicalize(c);
    return lf;
}

inline void reverse_walk(LoopComponent& c) {
    std::reverse(c.gens.begin(), c.gens.end());
    std::reverse(c.letters.begin(), c.letters.end());
    for (auto& l : c.letters) l.fwd = !l.fwd;
    if (!c.open && !c.gens.empty()) {
        // keep letters aligned: letter i must connect gens i and i+1
        std::rotate(c.gens.begin(), c.gens.end() - 1, c.gens.end());
    }
}

inline void rotate_walk(LoopComponent& c, int k) {
    if (c.open || c.gens.empty()) return;
    int n = (int)c.gens.size();
    k = ((k % n) + n) % n;
    std::rotate(c.gens.begin(), c.gens.begin() + k, c.gens.end());
    std::rotate(c.letters.begin(), c.letters.begin() + k, c.letters.end());
}

inline void canonicalize(LoopComponent& c) {
    auto key = [](LoopComponent const& x) {
        std::ostringstream os;
        for (auto const& l : x.letters)
            os << (l.s_type ? 'S' : 'D') << l.pow << (l.fwd ? '>' : '<') << ',';
        for (auto const& g : x.gens) os << g.idem;
        return os.str();
    };
    if (c.open) {
        // read from the •-end; ties broken by the lexicographically smaller key,
        // then by the smaller (h, q) of the first generator
        LoopComponent r = c;
        reverse_walk(r);
        auto pick_rev = [&]() {
            int ic = c.gens.front().idem, ir = r.gens.front().idem;
            if (ic != ir) return ir < ic;
            auto kc = key(c), kr = key(r);
            if (kc != kr) return kr < kc;
            return std::pair(r.gens.front().h, r.gens.front().q) <
                   std::pair(c.gens.front().h, c.gens.front().q);
        };
        if (pick_rev()) c = std::move(r);
        return;
    }
    LoopComponent best = c;
    auto bk = key(best);
    for (int rev = 0; rev < 2; ++rev) {
        LoopComponent base = c;
        if (rev) reverse_walk(base);
        for (int k = 0; k < (int)base.gens.size(); ++k) {
            LoopComponent cand = base;
            rotate_walk(cand, k);
            auto ck = key(cand);
            if (ck < bk || (ck == bk && cand < best)) { best = std::move(cand); bk = ck; }
        }
    }
    c = std::move(best);
}

/// Word equality under rotation/reflection and uniform grading shift.
/// Returns (q-shift, h-shift) with a + shift = b, or nothing.
inline std::optional<std::pair<int, int>> equal_up_to_shift(LoopComponent const& a,
                                                            LoopComponent const& b) {
    if (a.open != b.open || a.gens.size() != b.gens.size() ||
        a.letters.size() != b.letters.size())
        return std::nullopt;
    auto match = [&](LoopComponent const& x) -> std::optional<std::pair<int, int>> {
        for (std::size_t i = 0; i < x.letters.size(); ++i) {
            auto const& l = x.letters[i];
            auto const& m = b.letters[i];
            if (l.s_type != m.s_type || l.pow != m.pow || l.fwd != m.fwd) return std::nullopt;
        }
        for (std::size_t i = 0; i < x.gens.size(); ++i)
            if (x.gens[i].idem != b.gens[i].idem) return std::nullopt;
        int dq = b.gens[0].q - x.gens[0].q;
        int dh = b.gens[0].h - x.gens[0].h;
        for (std::size_t i = 0; i < x.gens.size(); ++i)
            if (x.gens[i].q + dq != b.gens[i].q || x.gens[i].h + dh != b.gens[i].h)
                return std::nullopt;
        return std::pair{dq, dh};
    };
    std::vector<LoopComponent> variants;
    if (a.open) {
        variants.push_back(a);
        LoopComponent r = a;
        reverse_walk(r);
        variants.push_back(std::move(r));
    } else {
        for (int rev = 0; rev < 2; ++rev) {
            LoopComponent base = a;
            if (rev) reverse_walk(base);
            for (int k = 0; k < (int)base.gens.size(); ++k) {
                LoopComponent cand = base;
                rotate_walk(cand, k);
                variants.push_back(std::move(cand));
            }
        }
    }
    for (auto const& v : variants)
        if (auto s = match(v)) return s;
    return std::nullopt;
}

}  // namespace bnr
