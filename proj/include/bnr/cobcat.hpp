#pragma once

#include <cassert>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bnr/diagram.hpp"
#include "bnr/field.hpp"

namespace bnr {

struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Crossingless tangle on m boundary points as a fixed-point-free involution.
/// Point ids run around the disk boundary: top ends 0..a-1 left to right, then
/// bottom column j of width w gets id a + (w-1-j). Closed loops are never stored
/// in a Flat; they live in a transient per-object counter and are delooped at once.
struct Flat {
    std::vector<int> m;

    int size() const { return (int)m.size(); }
    bool operator==(Flat const&) const = default;
    auto operator<=>(Flat const&) const = default;

    static int bottom_id(int a, int w, int col) { return a + (w - 1 - col); }

    /// a parallel strands: top i matched to bottom column i.
    static Flat identity(int a) {
        Flat f;
        f.m.resize(2 * a);
        for (int i = 0; i < a; ++i) { f.m[i] = 2 * a - 1 - i; f.m[2 * a - 1 - i] = i; }
        return f;
    }
};

/// Boundary circles of the union of two flats on the same point set, ordered by
/// their minimal point id.
struct Cycles {
    std::vector<int> of_point;
    int count = 0;
};

inline Cycles cycles(Flat const& s, Flat const& t) {
    int m = s.size();
    Cycles c;
    c.of_point.assign(m, -1);
    for (int p = 0; p < m; ++p) {
        if (c.of_point[p] != -1) continue;
        int idx = c.count++;
        int x = p;
        // walk s-arc, t-arc alternately until back at p
        while (c.of_point[x] == -1) {
            c.of_point[x] = idx;
            c.of_point[s.m[x]] = idx;
            x = t.m[s.m[x]];
        }
    }
    return c;
}

/// The chain complex of a partially scanned tangle over the reduced Bar-Natan
/// cobordism category. Entries are linear combinations of normal-form cobordisms,
/// keyed by (dot bitmask over boundary circles, extra H power). Circle slots are
/// ordered: point circles (by minimal point), then the source loop, then the
/// target loop. The circle containing point 0 (the special end) never carries a
/// dot: reduction rewrites such a dot as one extra H power.
template <class F>
class Complex {
public:
    using Elem = typename F::Elem;
    using Key = std::pair<std::uint64_t, int>;
    using Entry = std::map<Key, Elem>;

    struct Ob {
        Flat flat;
        int h = 0, q = 0;
        int loop = 0;  // transient: number of closed loops (0 or 1)
        bool alive = true;
    };

    F field;
    int a = 2;  // number of top ends (fixed for the whole scan)
    int w = 0;  // current bottom width
    std::vector<Ob> obs;
    std::map<std::pair<int, int>, Entry> diff;
    std::size_t max_objects = std::size_t(1) << 20;
    std::size_t peak_objects = 0;

    explicit Complex(F f, int top_arity) : field(std::move(f)), a(top_arity), w(top_arity) {
        obs.push_back(Ob{Flat::identity(a), 0, 0, 0, true});
    }

    std::size_t alive_count() const {
        std::size_t n = 0;
        for (auto const& o : obs)
            if (o.alive) ++n;
        return n;
    }

    // -- entry helpers ------------------------------------------------------

    void add_term(Entry& e, Key k, Elem c) {
        if (field.is_zero(c)) return;
        auto it = e.find(k);
        if (it == e.end()) {
            e.emplace(k, std::move(c));
        } else {
            it->second = field.add(it->second, c);
            if (field.is_zero(it->second)) e.erase(it);
        }
    }

    /// Reduction: a dot on the special circle (the one containing point 0) turns
    /// into an extra H power.
    void add_reduced(Entry& e, int special, std::uint64_t dots, int hpow, Elem c) {
        if (special >= 0 && (dots >> special) & 1) {
            dots &= ~(std::uint64_t(1) << special);
            ++hpow;
        }
        add_term(e, {dots, hpow}, std::move(c));
    }

    void set_entry(int from, int to, Entry e) {
        if (e.empty()) diff.erase({from, to});
        else diff[{from, to}] = std::move(e);
    }

    void add_poly(std::map<int, Elem>& m, int k, Elem v) {
        if (field.is_zero(v)) return;
        auto it = m.find(k);
        if (it == m.end()) {
            m.emplace(k, std::move(v));
        } else {
            it->second = field.add(it->second, v);
            if (field.is_zero(it->second)) m.erase(it);
        }
    }

    // -- event application --------------------------------------------------

    void apply(Event const& ev) {
        switch (ev.kind) {
            case Ev::U: apply_cup(ev.pos); break;
            case Ev::N: apply_cap(ev.pos); break;
            default: apply_crossing(ev.pos, ev.kind); break;
        }
        deloop_all();
        cancel_all();
        guard();
    }

    void guard() {
        std::size_t n = alive_count();
        peak_objects = std::max(peak_objects, n);
        if (n > max_objects)
            throw ResourceError("object count " + std::to_string(n) + " exceeds limit");
        compact_if_needed();
    }

private:
    // Point renumbering for a cup at column pos (old width w): old ids >= ins
    // shift up by 2, where ins is the smaller of the two new ids.
    void apply_cup(int pos) {
        int ins = a + (w - pos);
        auto pmap = [&](int p) { return p >= ins ? p + 2 : p; };

        std::vector<Flat> nf(obs.size());
        for (std::size_t i = 0; i < obs.size(); ++i) {
            if (!obs[i].alive) continue;
            Flat const& f = obs[i].flat;
            Flat g;
            g.m.resize(f.size() + 2);
            for (int p = 0; p < f.size(); ++p) g.m[pmap(p)] = pmap(f.m[p]);
            g.m[ins] = ins + 1;
            g.m[ins + 1] = ins;
            nf[i] = std::move(g);
        }
        std::map<std::pair<int, int>, Entry> nd;
        for (auto const& [ij, e] : diff) {
            auto [i, j] = ij;
            Cycles oc = cycles(obs[i].flat, obs[j].flat);
            Cycles nc = cycles(nf[i], nf[j]);
            // old circle -> new circle via any member point
            std::vector<int> cmap(oc.count, -1);
            for (int p = 0; p < (int)oc.of_point.size(); ++p)
                cmap[oc.of_point[p]] = nc.of_point[pmap(p)];
            int special = nc.of_point[0];
            Entry ne;
            for (auto const& [key, c] : e) {
                std::uint64_t dots = 0;
                for (int cy = 0; cy < oc.count; ++cy)
                    if ((key.first >> cy) & 1) dots |= std::uint64_t(1) << cmap[cy];
                add_reduced(ne, special, dots, key.second, c);
            }
            nd[ij] = std::move(ne);
        }
        for (std::size_t i = 0; i < obs.size(); ++i)
            if (obs[i].alive) obs[i].flat = std::move(nf[i]);
        diff = std::move(nd);
        w += 2;
    }

    /// Band transport shared by caps and the plat halves of crossings. Both the
    /// source and target of every entry are composed with the same elementary
    /// cobordism, which attaches one band at points (p1, p2) = (pl-1, pl).
    struct Banded {
        Flat flat;
        int loop = 0;  // 1 if the band closed a circle of this object
    };

    Banded cap_flat(Flat const& f, int p2, int p1) const {
        auto pmap = [&](int p) { return p > p1 ? p - 2 : p; };
        Banded b;
        if (f.m[p1] == p2) {
            b.loop = 1;
            b.flat.m.resize(f.size() - 2);
            for (int p = 0; p < f.size(); ++p)
                if (p != p1 && p != p2) b.flat.m[pmap(p)] = pmap(f.m[p]);
        } else {
            int q1 = f.m[p1], q2 = f.m[p2];
            b.flat.m.resize(f.size() - 2);
            for (int p = 0; p < f.size(); ++p)
                if (p != p1 && p != p2) b.flat.m[pmap(p)] = pmap(f.m[p]);
            b.flat.m[pmap(q1)] = pmap(q2);
            b.flat.m[pmap(q2)] = pmap(q1);
        }
        return b;
    }

    /// Transport an entry through the band at (p2, p1) = (pl-1, pl). `cupins`
    /// >= 0 re-inserts a cup pair at that id afterwards (plat transport).
    Entry transport_band(Entry const& e, Flat const& So, Flat const& To, Flat const& Sn,
                         Flat const& Tn, int loopS, int loopT, int p2, int p1,
                         int cupins) {
        auto pmap = [&](int p) -> int {
            if (p == p1 || p == p2) return -1;
            int q = p > p1 ? p - 2 : p;
            if (cupins >= 0 && q >= cupins) q += 2;
            return q;
        };
        Cycles oc = cycles(So, To);
        Cycles nc = cycles(Sn, Tn);
        int nslots = nc.count + loopS + loopT;
        if (nslots > 62) throw ResourceError("too many boundary circles");
        int slotLoopS = nc.count;
        int slotLoopT = nc.count + loopS;
        int special = nc.of_point.empty() ? -1 : nc.of_point[0];

        int c1 = oc.of_point[p1], c2 = oc.of_point[p2];
        // old circle -> new slot via surviving points (band circles handled below)
        std::vector<int> cmap(oc.count, -1);
        for (int p = 0; p < (int)oc.of_point.size(); ++p) {
            int np = pmap(p);
            if (np >= 0) cmap[oc.of_point[p]] = nc.of_point[np];
        }
        Entry out;
        Complex* self = this;
        if (c1 != c2) {
            // merge: dots add, a double dot becomes H * dot
            int target = cmap[c1];
            assert(target == cmap[c2] && target >= 0);
            for (auto const& [key, c] : e) {
                std::uint64_t dots = 0;
                int hpow = key.second;
                int d = 0;
                for (int cy = 0; cy < oc.count; ++cy) {
                    if (!((key.first >> cy) & 1)) continue;
                    if (cy == c1 || cy == c2) { ++d; continue; }
                    dots |= std::uint64_t(1) << cmap[cy];
                }
                if (d == 2) { d = 1; ++hpow; }
                if (d) dots |= std::uint64_t(1) << target;
                self->add_reduced(out, special, dots, hpow, c);
            }
        } else {
            // split: the band circle becomes exactly two circles (possibly loops);
            // neck-cutting distributes the dot states
            std::vector<int> parts;
            {
                std::vector<bool> seen(nc.count, false);
                for (int p = 0; p < (int)oc.of_point.size(); ++p) {
                    if (oc.of_point[p] != c1) continue;
                    int np = pmap(p);
                    if (np < 0) continue;
                    int cy = nc.of_point[np];
                    if (!seen[cy]) { seen[cy] = true; parts.push_back(cy); }
                }
            }
            if (loopS) parts.push_back(slotLoopS);
            if (loopT) parts.push_back(slotLoopT);
            assert(parts.size() == 2);
            std::uint64_t b1 = std::uint64_t(1) << parts[0];
            std::uint64_t b2 = std::uint64_t(1) << parts[1];
            for (auto const& [key, c] : e) {
                std::uint64_t dots = 0;
                bool dotted = false;
                for (int cy = 0; cy < oc.count; ++cy) {
                    if (!((key.first >> cy) & 1)) continue;
                    if (cy == c1) { dotted = true; continue; }
                    dots |= std::uint64_t(1) << cmap[cy];
                }
                if (dotted) {
                    self->add_reduced(out, special, dots | b1 | b2, key.second, c);
                } else {
                    self->add_reduced(out, special, dots | b1, key.second, c);
                    self->add_reduced(out, special, dots | b2, key.second, c);
                    self->add_reduced(out, special, dots, key.second + 1, field.neg(c));
                }
            }
        }
        return out;
    }

    void apply_cap(int pos) {
        int p1 = Flat::bottom_id(a, w, pos);  // left column: larger id
        int p2 = p1 - 1;
        std::vector<Banded> nb(obs.size());
        for (std::size_t i = 0; i < obs.size(); ++i)
            if (obs[i].alive) nb[i] = cap_flat(obs[i].flat, p2, p1);
        std::map<std::pair<int, int>, Entry> nd;
        for (auto const& [ij, e] : diff) {
            auto [i, j] = ij;
            Entry ne = transport_band(e, obs[i].flat, obs[j].flat, nb[i].flat, nb[j].flat,
                                      nb[i].loop, nb[j].loop, p2, p1, -1);
            if (!ne.empty()) nd[ij] = std::move(ne);
        }
        for (std::size_t i = 0; i < obs.size(); ++i) {
            if (!obs[i].alive) continue;
            obs[i].flat = std::move(nb[i].flat);
            obs[i].loop = nb[i].loop;
        }
        diff = std::move(nd);
        w -= 2;
    }

    void apply_crossing(int pos, Ev kind) {
        int p1 = Flat::bottom_id(a, w, pos);
        int p2 = p1 - 1;
        int cupins = p2;  // cup pair re-inserted at the same ids
        std::size_t n = obs.size();
        if (2 * alive_count() > max_objects)
            throw ResourceError("object count would exceed limit at crossing");

        // copy objects: index i = one smoothing, i + n = plat smoothing
        obs.resize(2 * n);
        std::vector<Banded> plat(n);
        for (std::size_t i = 0; i < n; ++i) {
            obs[i + n] = obs[i];
            if (!obs[i].alive) { obs[i + n].alive = false; continue; }
            Banded b = cap_flat(obs[i].flat, p2, p1);
            // re-insert the cup pair
            Flat g;
            g.m.resize(b.flat.size() + 2);
            for (int p = 0; p < b.flat.size(); ++p) {
                int q = p >= cupins ? p + 2 : p;
                int r = b.flat.m[p] >= cupins ? b.flat.m[p] + 2 : b.flat.m[p];
                g.m[q] = r;
            }
            g.m[cupins] = cupins + 1;
            g.m[cupins + 1] = cupins;
            plat[i].flat = std::move(g);
            plat[i].loop = b.loop;
            obs[i + n].flat = plat[i].flat;
            obs[i + n].loop = plat[i].loop;
        }

        // x: parallel smoothing in homological degree 0, plat in degree 1;
        // y: the other way round
        bool plat_is_one = (kind == Ev::X);
        std::size_t lo = plat_is_one ? 0 : n;   // index offset of the 0-smoothing copy
        std::size_t hi = plat_is_one ? n : 0;   // index offset of the 1-smoothing copy
        for (std::size_t i = 0; i < n; ++i) {
            if (!obs[i].alive) continue;
            obs[i + hi].h += 1;
            obs[i + hi].q += 1;
        }

        std::map<std::pair<int, int>, Entry> nd;
        for (auto const& [ij, e] : diff) {
            auto [i, j] = ij;
            nd[{i, j}] = e;  // parallel copies: flats unchanged
            Entry pe = transport_band(e, obs[i].flat, obs[j].flat, plat[i].flat, plat[j].flat,
                                      plat[i].loop, plat[j].loop, p2, p1, cupins);
            if (!pe.empty()) nd[{(int)(i + n), (int)(j + n)}] = std::move(pe);
        }
        // saddle components 0-smoothing -> 1-smoothing, with the Koszul sign of
        // the object it is tensored onto
        for (std::size_t i = 0; i < n; ++i) {
            if (!obs[i].alive) continue;
            Flat const& par = obs[i].flat;
            Flat const& pl = plat[i].flat;
            Cycles nc = plat_is_one ? cycles(par, pl) : cycles(pl, par);
            int special = nc.of_point[0];
            // Koszul sign uses the homological degree before the local shift
            Elem c = (obs[i + lo].h % 2 == 0) ? field.one() : field.neg(field.one());
            Entry se;
            if (plat[i].loop) {
                // the band splits: circle {p2,p1} and the loop; delta terms
                int cy = nc.of_point[p2];
                int loopslot = nc.count;  // single loop (source for y, target for x)
                std::uint64_t b1 = std::uint64_t(1) << cy;
                std::uint64_t b2 = std::uint64_t(1) << loopslot;
                add_reduced(se, special, b1, 0, c);
                add_reduced(se, special, b2, 0, c);
                add_reduced(se, special, 0, 1, field.neg(c));
            } else {
                add_reduced(se, special, 0, 0, c);
            }
            int from = (int)(i + lo), to = (int)(i + hi);
            nd[{from, to}] = std::move(se);
        }
        diff = std::move(nd);
    }

    // -- delooping ----------------------------------------------------------

    void deloop_all() {
        for (std::size_t i = 0; i < obs.size(); ++i)
            if (obs[i].alive && obs[i].loop) deloop(i);
    }

    void deloop(std::size_t i) {
        // O u loop ~ O(q+1) + O(q-1)
        std::size_t ip = obs.size();
        std::size_t im = ip + 1;
        Ob base = obs[i];
        base.loop = 0;
        obs.push_back(base);
        obs.back().q += 1;
        obs.push_back(base);
        obs.back().q -= 1;

        std::vector<std::pair<std::pair<int, int>, Entry>> add;
        std::vector<std::pair<int, int>> del;
        for (auto const& [ij, e] : diff) {
            auto [from, to] = ij;
            if (from != (int)i && to != (int)i) continue;
            del.push_back(ij);
            if (from == (int)i && to == (int)i)
                throw std::logic_error("self-entry on looped object");
            if (to == (int)i) {
                // incoming f: component into O(q+1) keeps the loop-undotted part,
                // into O(q-1) the loop-dotted part
                Cycles cyc = cycles(obs[from].flat, obs[i].flat);
                int slot = cyc.count + obs[from].loop;  // target loop after source loops
                Entry fp, fm;
                for (auto const& [key, c] : e) {
                    std::uint64_t dots = key.first;
                    if ((dots >> slot) & 1) {
                        fm[{clear_slot(dots, slot), key.second}] = c;
                    } else {
                        fp[{clear_slot(dots, slot), key.second}] = c;
                    }
                }
                if (!fp.empty()) add.push_back({{from, (int)ip}, std::move(fp)});
                if (!fm.empty()) add.push_back({{from, (int)im}, std::move(fm)});
            } else {
                // outgoing g: from O(q+1) the loop-dotted part; from O(q-1) the
                // undotted part plus H times the dotted part
                Cycles cyc = cycles(obs[i].flat, obs[to].flat);
                int slot = cyc.count;  // source loop comes first
                Entry gp, gm;
                for (auto const& [key, c] : e) {
                    std::uint64_t dots = key.first;
                    if ((dots >> slot) & 1) {
                        std::uint64_t d = clear_slot(dots, slot);
                        add_term(gp, {d, key.second}, c);
                        add_term(gm, {d, key.second + 1}, c);
                    } else {
                        add_term(gm, {clear_slot(dots, slot), key.second}, c);
                    }
                }
                if (!gp.empty()) add.push_back({{(int)ip, to}, std::move(gp)});
                if (!gm.empty()) add.push_back({{(int)im, to}, std::move(gm)});
            }
        }
        for (auto const& k : del) diff.erase(k);
        for (auto& [k, e] : add) {
            // merge (both halves of a doubly-looped entry can land on one key)
            Entry& tgt = diff[k];
            for (auto& [key, c] : e) add_term(tgt, key, c);
            if (tgt.empty()) diff.erase(k);
        }
        obs[i].alive = false;
    }

    static std::uint64_t clear_slot(std::uint64_t dots, int slot) {
        std::uint64_t low = dots & ((std::uint64_t(1) << slot) - 1);
        std::uint64_t high = (dots >> (slot + 1)) << slot;
        return low | high;
    }

    // -- gaussian cancellation ----------------------------------------------

public:
    /// Entry composition g then h (g: A -> B, h: B -> C), multiplied by scalar s.
    Entry compose(Entry const& g, Entry const& h, Flat const& A, Flat const& B,
                  Flat const& C, Elem const& s) {
        Cycles cab = cycles(A, B);
        Cycles cbc = cycles(B, C);
        Cycles cac = cycles(A, C);
        int special = cac.of_point.empty() ? -1 : cac.of_point[0];

        // glue normal-form discs along the arcs of B
        int nab = cab.count;
        int total = nab + cbc.count;
        std::vector<int> parent(total);
        for (int i = 0; i < total; ++i) parent[i] = i;
        auto find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        std::vector<int> arcs(total, 0);
        for (int p = 0; p < B.size(); ++p) {
            if (B.m[p] < p) continue;
            int da = cab.of_point[p];
            int db = nab + cbc.of_point[p];
            int ra = find(da), rb = find(db);
            if (ra != rb) parent[rb] = ra;
            ++arcs[find(ra)];
        }
        // piece data: member discs, glued arcs, boundary circles in (A, C)
        std::vector<int> discs(total, 0), narcs(total, 0);
        for (int i = 0; i < total; ++i) ++discs[find(i)];
        for (int i = 0; i < total; ++i) narcs[find(i)] += arcs[i];
        // map each (A,C) circle to its piece via the AB-disc of any of its A-arcs
        // (or the BC-disc of a C-arc)
        std::vector<int> circle_piece(cac.count, -1);
        for (int p = 0; p < A.size(); ++p) {
            int cy = cac.of_point[p];
            if (circle_piece[cy] == -1) circle_piece[cy] = find(cab.of_point[p]);
        }
        std::vector<std::vector<int>> piece_circles(total);
        for (int cy = 0; cy < cac.count; ++cy) piece_circles[circle_piece[cy]].push_back(cy);

        Entry out;
        for (auto const& [kg, cg] : g) {
            for (auto const& [kh, ch] : h) {
                // dots per piece
                std::vector<int> dots(total, 0);
                for (int cy = 0; cy < nab; ++cy)
                    if ((kg.first >> cy) & 1) ++dots[find(cy)];
                for (int cy = 0; cy < cbc.count; ++cy)
                    if ((kh.first >> cy) & 1) ++dots[find(nab + cy)];

                // per-piece elements of k[H][X]/(X^2 - HX), distributed over the
                // piece's boundary circles; terms: (coeff, hpow, dotmask)
                struct P { Elem c; int hp; std::uint64_t dm; };
                std::vector<P> acc{{field.mul(cg, ch), kg.second + kh.second, 0}};
                bool dead = false;
                for (int r = 0; r < total && !dead; ++r) {
                    if (find(r) != r) continue;
                    int chi = discs[r] - narcs[r];
                    int b = (int)piece_circles[r].size();
                    int genus = (2 - b - chi) / 2;
                    if ((2 - b - chi) % 2 != 0 || genus < 0)
                        throw std::logic_error("bad euler characteristic in composition");
                    // elt = (2X - H)^genus * X^dots as alpha + beta X
                    // alpha, beta in k[H]: track as hpow -> coeff
                    std::map<int, Elem> al, be;
                    if (dots[r] == 0) al[0] = field.one();
                    else be[dots[r] - 1] = field.one();  // X^d = H^(d-1) X
                    for (int t = 0; t < genus; ++t) {
                        // multiply by Z = 2X - H:  (a + bX)(2X - H) =
                        //   -aH + (2a + 2bH - bH) X = -aH + (2a + bH) X
                        std::map<int, Elem> al2, be2;
                        for (auto const& [k, v] : al) {
                            add_poly(al2, k + 1, field.neg(v));
                            add_poly(be2, k, field.mul(field.from_int(2), v));
                        }
                        for (auto const& [k, v] : be) add_poly(be2, k + 1, v);
                        al = std::move(al2);
                        be = std::move(be2);
                    }
                    std::vector<P> nacc;
                    if (b == 0) {
                        // closed piece: evaluate (1 -> 0, X -> 1)
                        if (be.empty()) { dead = true; break; }
                        for (auto const& pt : acc)
                            for (auto const& [k, v] : be)
                                nacc.push_back({field.mul(pt.c, v), pt.hp + k, pt.dm});
                    } else {
                        // comultiply alpha + beta X over b circles:
                        // delta(X) = X (x) X;  delta(1) = X(x)1 + 1(x)X - H 1(x)1
                        struct T { Elem c; int hp; std::uint64_t dm; };
                        std::vector<T> terms;
                        for (auto const& [k, v] : al) terms.push_back({v, k, 0});
                        for (auto const& [k, v] : be) terms.push_back({v, k, 1});
                        // state dm bit s = circle piece_circles[r][s] dotted; start
                        // with one slot, expand to b slots
                        for (int s = 1; s < b; ++s) {
                            std::vector<T> nt;
                            for (auto const& t : terms) {
                                bool last = (t.dm >> (s - 1)) & 1;
                                if (last) {
                                    nt.push_back({t.c, t.hp, t.dm | (std::uint64_t(1) << s)});
                                } else {
                                    nt.push_back({t.c, t.hp, t.dm | (std::uint64_t(1) << (s - 1))});
                                    nt.push_back({t.c, t.hp, t.dm | (std::uint64_t(1) << s)});
                                    nt.push_back({field.neg(t.c), t.hp + 1, t.dm});
                                }
                            }
                            terms = std::move(nt);
                        }
                        for (auto const& pt : acc) {
                            for (auto const& t : terms) {
                                std::uint64_t dm = pt.dm;
                                for (int s = 0; s < b; ++s)
                                    if ((t.dm >> s) & 1)
                                        dm |= std::uint64_t(1) << piece_circles[r][s];
                                nacc.push_back({field.mul(pt.c, t.c), pt.hp + t.hp, dm});
                            }
                        }
                    }
                    acc = std::move(nacc);
                }
                if (dead) continue;
                for (auto const& pt : acc)
                    add_reduced(out, special, pt.dm, pt.hp, field.mul(pt.c, s));
            }
        }
        return out;
    }

    /// Cancel all isomorphism components (entries containing an undotted
    /// H^0 identity term between equal flats).
    void cancel_all() {
        for (;;) {
            int pi = -1, pj = -1;
            Elem pc = field.zero();
            for (auto const& [ij, e] : diff) {
                auto [i, j] = ij;
                if (!obs[i].alive || !obs[j].alive) continue;
                if (!(obs[i].flat == obs[j].flat)) continue;
                auto it = e.find({0, 0});
                if (it == e.end()) continue;
                // bigraded homogeneity: the entry is exactly c * id
                assert(e.size() == 1);
                pi = i; pj = j; pc = it->second;
                break;
            }
            if (pi < 0) return;
            cancel(pi, pj, pc);
        }
    }

    void cancel(int x, int y, Elem const& c) {
        Elem cinv = field.inv(c);
        std::vector<std::pair<int, Entry const*>> into_y;   // w -> y, w != x
        std::vector<std::pair<int, Entry const*>> from_x;   // x -> z, z != y
        for (auto const& [ij, e] : diff) {
            auto [i, j] = ij;
            if (j == y && i != x && obs[i].alive) into_y.push_back({i, &e});
            if (i == x && j != y && obs[j].alive) from_x.push_back({j, &e});
        }
        Elem ms = field.neg(cinv);
        for (auto const& [wi, ge] : into_y) {
            for (auto const& [zi, he] : from_x) {
                Entry corr = compose(*ge, *he, obs[wi].flat, obs[x].flat, obs[zi].flat, ms);
                Entry& tgt = diff[{wi, zi}];
                for (auto& [key, cc] : corr) add_term(tgt, key, cc);
                if (tgt.empty()) diff.erase({wi, zi});
            }
        }
        obs[x].alive = false;
        obs[y].alive = false;
        for (auto it = diff.begin(); it != diff.end();) {
            auto [i, j] = it->first;
            if (i == x || i == y || j == x || j == y) it = diff.erase(it);
            else ++it;
        }
    }

private:
    void compact_if_needed() {
        std::size_t dead = obs.size() - alive_count();
        if (dead < 1024 || dead < obs.size() / 2) return;
        std::vector<int> remap(obs.size(), -1);
        std::vector<Ob> nob;
        nob.reserve(alive_count());
        for (std::size_t i = 0; i < obs.size(); ++i) {
            if (!obs[i].alive) continue;
            remap[i] = (int)nob.size();
            nob.push_back(std::move(obs[i]));
        }
        std::map<std::pair<int, int>, Entry> nd;
        for (auto& [ij, e] : diff) nd[{remap[ij.first], remap[ij.second]}] = std::move(e);
        obs = std::move(nob);
        diff = std::move(nd);
    }
};

// ---------------------------------------------------------------------------
// scanning driver
// ---------------------------------------------------------------------------

template <class F>
struct ScanResult {
    Complex<F> cx;
    int n_plus = 0, n_minus = 0;
    int h_shift() const { return -n_minus; }
    int q_shift() const { return n_plus - 2 * n_minus; }
};

/// Scan a diagram event by event. Knot diagrams (0-ended) are cut open at their
/// first cup so that a special top-left end exists throughout.
template <class F>
ScanResult<F> scan(F field, TangleDiagram const& d,
                   std::size_t max_objects = std::size_t(1) << 20) {
    auto tr = trace(d);
    std::vector<Event> evs;
    int arity;
    if (d.ends == 0) {
        if (d.events.empty() || d.events.front().kind != Ev::U || d.events.front().pos != 0)
            throw std::invalid_argument("scan: knot word must start with u0");
        arity = 2;
        evs.assign(d.events.begin() + 1, d.events.end());
    } else {
        if ((int)d.slot_end[0] != (int)End::NW)
            throw std::invalid_argument("scan: special end must be NW at top column 0");
        arity = d.top_arity;
        evs = d.events;
    }
    ScanResult<F> r{Complex<F>(std::move(field), arity), tr.n_plus, tr.n_minus};
    r.cx.max_objects = max_objects;
    for (auto const& e : evs) r.cx.apply(e);
    return r;
}

// ---------------------------------------------------------------------------
// knot normal form and the Rasmussen invariant
// ---------------------------------------------------------------------------

struct Torsion {
    int h = 0;   // homological grading of the torsion generator
    int q = 0;   // quantum grading of the torsion generator
    int k = 0;   // torsion order exponent: summand k[H]/(H^k)
    auto operator<=>(Torsion const&) const = default;
};

struct KnotNormalForm {
    int s_h = 0;  // homological grading of the free generator (must be 0)
    int s_q = 0;  // quantum grading of the free generator = the s-invariant
    std::vector<Torsion> torsion;
};

/// Reduce the scanned complex of a knot (final width 0, all differentials
/// multiples of powers of H) to its normal form over k[H].
template <class F>
KnotNormalForm knot_normal_form(ScanResult<F>& r) {
    auto& cx = r.cx;
    auto& field = cx.field;
    if (cx.w != 0) throw std::invalid_argument("knot_normal_form: tangle not fully scanned");

    // every entry is c * H^k with k >= 1
    struct E { typename F::Elem c; int k; };
    std::map<std::pair<int, int>, E> d;
    for (auto const& [ij, e] : cx.diff) {
        if (!cx.obs[ij.first].alive || !cx.obs[ij.second].alive) continue;
        if (e.empty()) continue;
        if (e.size() != 1) throw std::logic_error("inhomogeneous knot entry");
        auto const& [key, c] = *e.begin();
        if (key.first != 0 || key.second < 1)
            throw std::logic_error("unexpected knot entry shape");
        d[ij] = {c, key.second};
    }

    KnotNormalForm nf;
    std::vector<bool> alive(cx.obs.size());
    for (std::size_t i = 0; i < cx.obs.size(); ++i) alive[i] = cx.obs[i].alive;

    while (!d.empty()) {
        // pivot: minimal H power, then lexicographic (from, to)
        auto pivot = d.begin();
        for (auto it = d.begin(); it != d.end(); ++it)
            if (it->second.k < pivot->second.k) pivot = it;
        auto [x, y] = pivot->first;
        auto [c, k] = pivot->second;
        nf.torsion.push_back({cx.obs[y].h + r.h_shift(), cx.obs[y].q + r.q_shift(), k});
        auto cinv = field.inv(c);
        std::vector<std::pair<int, E>> into_y, from_x;
        for (auto const& [ij, e] : d) {
            if (ij.second == y && ij.first != x) into_y.push_back({ij.first, e});
            if (ij.first == x && ij.second != y) from_x.push_back({ij.second, e});
        }
        for (auto const& [w, g] : into_y) {
            for (auto const& [z, h] : from_x) {
                int kk = g.k + h.k - k;
                if (kk < 1) throw std::logic_error("negative H power in reduction");
                auto corr = field.neg(field.mul(field.mul(g.c, h.c), cinv));
                auto it = d.find({w, z});
                if (it == d.end()) {
                    d[{w, z}] = {corr, kk};
                } else if (it->second.k == kk) {
                    it->second.c = field.add(it->second.c, corr);
                    if (field.is_zero(it->second.c)) d.erase(it);
                } else if (it->second.k > kk) {
                    // lower power dominates: keep both? homogeneity forbids this
                    throw std::logic_error("mixed H powers on one knot entry");
                } else {
                    throw std::logic_error("mixed H powers on one knot entry");
                }
            }
        }
        alive[x] = false;
        alive[y] = false;
        for (auto it = d.begin(); it != d.end();) {
            auto [i, j] = it->first;
            if (i == x || i == y || j == x || j == y) it = d.erase(it);
            else ++it;
        }
    }

    int survivors = 0;
    for (std::size_t i = 0; i < cx.obs.size(); ++i) {
        if (!alive[i]) continue;
        ++survivors;
        nf.s_h = cx.obs[i].h + r.h_shift();
        nf.s_q = cx.obs[i].q + r.q_shift();
    }
    if (survivors != 1)
        throw std::logic_error("knot normal form has " + std::to_string(survivors) +
                               " free generators (expected 1)");
    std::sort(nf.torsion.begin(), nf.torsion.end());
    return nf;
}

/// The reduced Bar-Natan s-invariant over the field of characteristic c.
inline int s_invariant(TangleDiagram const& knot, int characteristic,
                       std::size_t max_objects = std::size_t(1) << 20) {
    FieldSpec::parse(characteristic);
    if (characteristic == 0) {
        auto r = scan(QQ{}, knot, max_objects);
        return knot_normal_form(r).s_q;
    }
    auto r = scan(Fp(characteristic), knot, max_objects);
    return knot_normal_form(r).s_q;
}

}  // namespace bnr
