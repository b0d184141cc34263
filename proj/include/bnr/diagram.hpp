#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bnr {

/// Elementary slice events, applied top to bottom.
///  X: positive crossing at columns (pos, pos+1)  (over-strand from top-right to bottom-left)
///  Y: negative crossing at columns (pos, pos+1)
///  U: cup, inserts two new adjacent strands at column pos
///  N: cap, joins the strands at columns (pos, pos+1)
enum class Ev : std::uint8_t { X, Y, U, N };

struct Event {
    Ev kind;
    int pos;
    bool operator==(Event const&) const = default;
};

/// Compass labels for the four open ends of a Conway tangle.
enum class End : int { NW = 0, NE = 1, SW = 2, SE = 3 };

/// The three end-matchings of a Conway tangle:
///  V: NW-SW, NE-SE (vertical);  X: NW-SE, NE-SW;  H: NW-NE, SW-SE (horizontal).
enum class Conn { V, X, H };

inline char const* conn_name(Conn c) {
    switch (c) {
        case Conn::V: return "V";
        case Conn::X: return "X";
        default: return "H";
    }
}

/// Reduced fraction p/q in QQ union {infinity}; q == 0 encodes infinity (p = 1).
struct Slope {
    long long p = 0;
    long long q = 1;

    Slope() = default;
    Slope(long long p_, long long q_) : p(p_), q(q_) { normalize(); }
    static Slope infinity() { return Slope(1, 0); }
    bool is_infinity() const { return q == 0; }
    bool is_integer() const { return q == 1; }

    void normalize() {
        if (q == 0) { p = 1; return; }
        if (q < 0) { p = -p; q = -q; }
        long long g = std::gcd(p < 0 ? -p : p, q);
        if (g > 1) { p /= g; q /= g; }
        if (p == 0) q = 1;
    }
    Slope operator-() const { return is_infinity() ? *this : Slope(-p, q); }
    Slope plus_int(long long n) const {
        return is_infinity() ? *this : Slope(p + n * q, q);
    }
    bool operator==(Slope const& o) const { return p == o.p && q == o.q; }
    std::string str() const {
        if (is_infinity()) return "inf";
        if (q == 1) return std::to_string(p);
        return std::to_string(p) + "/" + std::to_string(q);
    }
    static Slope parse(std::string const& s) {
        if (s == "inf" || s == "infty" || s == "oo") return infinity();
        auto k = s.find('/');
        if (k == std::string::npos) return Slope(std::stoll(s), 1);
        return Slope(std::stoll(s.substr(0, k)), std::stoll(s.substr(k + 1)));
    }
};

/// A knot or Conway-tangle diagram as a slice word.
///
/// The word starts with `top_arity` strands and is read top to bottom. Open ends are
/// the initial top columns (left to right) followed by the final bottom columns
/// (left to right). For 4-ended tangles `slot_end` records the compass label of each
/// open-end slot; the special end is always NW and always sits at top column 0.
/// Standard form: top_arity 2 with slots (NW, NE, SW, SE). Double tangles use the
/// all-ends-on-top form: top_arity 4 with slots (NW, SW, SE, NE).
struct TangleDiagram {
    int ends = 4;
    int top_arity = 2;
    std::vector<Event> events;
    std::array<End, 4> slot_end{End::NW, End::NE, End::SW, End::SE};
    /// Orientation hint per compass end (indexed by End): +1 strand points into the
    /// tangle, -1 out, 0 unspecified (resolved by the default rule at trace time).
    std::array<int, 4> orient{0, 0, 0, 0};

    int final_width() const {
        int w = top_arity;
        for (auto const& e : events) {
            if (e.kind == Ev::U) w += 2;
            else if (e.kind == Ev::N) w -= 2;
        }
        return w;
    }

    bool validate(std::string* err = nullptr) const {
        auto fail = [&](std::string const& m) {
            if (err) *err = m;
            return false;
        };
        int w = top_arity;
        for (std::size_t k = 0; k < events.size(); ++k) {
            auto const& e = events[k];
            switch (e.kind) {
                case Ev::U:
                    if (e.pos < 0 || e.pos > w) return fail("cup out of range at event " + std::to_string(k));
                    w += 2;
                    break;
                case Ev::N:
                    if (e.pos < 0 || e.pos + 1 >= w) return fail("cap out of range at event " + std::to_string(k));
                    w -= 2;
                    break;
                default:
                    if (e.pos < 0 || e.pos + 1 >= w) return fail("crossing out of range at event " + std::to_string(k));
            }
        }
        int open = top_arity + w;
        if (open != ends) return fail("open end count " + std::to_string(open) + " != ends");
        if (ends != 0 && ends != 4) return fail("ends must be 0 or 4");
        return true;
    }
};

// ---------------------------------------------------------------------------
// strand tracing: components, connectivity, orientations, crossing signs
// ---------------------------------------------------------------------------

namespace detail {

/// Union-find with parity (parity 1 = opposite travel direction to the root).
struct ParityUF {
    std::vector<int> parent;
    std::vector<std::uint8_t> par;
    int make() {
        parent.push_back((int)parent.size());
        par.push_back(0);
        return (int)parent.size() - 1;
    }
    std::pair<int, int> find(int x) const {
        int p = 0;
        int r = x;
        while (parent[r] != r) { p ^= par[r]; r = parent[r]; }
        return {r, p};
    }
    void unite(int a, int b, int parity) {
        auto [ra, pa] = find(a);
        auto [rb, pb] = find(b);
        if (ra == rb) {
            if ((pa ^ pb) != parity) throw std::runtime_error("inconsistent strand orientation");
            return;
        }
        parent[rb] = ra;
        par[rb] = (std::uint8_t)(pa ^ pb ^ parity);
    }
};

}  // namespace detail

struct TraceResult {
    int components = 0;
    int closed_components = 0;
    Conn conn = Conn::V;      // 4-ended only
    int n_plus = 0;
    int n_minus = 0;
    int lk2 = 0;              // 2 * linking number (4-ended, two components)
    int writhe = 0;           // n_plus - n_minus
};

/// Trace strands through the word, resolve orientations, count signed crossings.
inline TraceResult trace(TangleDiagram const& d) {
    std::string err;
    if (!d.validate(&err)) throw std::invalid_argument("invalid slice word: " + err);

    detail::ParityUF uf;
    struct Xing { int segL, segR; Ev kind; };
    std::vector<Xing> xings;

    std::vector<int> col(d.top_arity);
    for (int i = 0; i < d.top_arity; ++i) col[i] = uf.make();
    std::vector<int> top_seg = col;

    for (auto const& e : d.events) {
        switch (e.kind) {
            case Ev::U: {
                int a = uf.make(), b = uf.make();
                uf.unite(a, b, 1);
                col.insert(col.begin() + e.pos, {a, b});
                break;
            }
            case Ev::N: {
                uf.unite(col[e.pos], col[e.pos + 1], 1);
                col.erase(col.begin() + e.pos, col.begin() + e.pos + 2);
                break;
            }
            default: {
                xings.push_back({col[e.pos], col[e.pos + 1], e.kind});
                std::swap(col[e.pos], col[e.pos + 1]);
                break;
            }
        }
    }
    std::vector<int> bot_seg = col;

    // open-end slots in order: top columns, then bottom columns
    std::vector<int> end_seg = top_seg;
    end_seg.insert(end_seg.end(), bot_seg.begin(), bot_seg.end());
    std::vector<bool> end_is_top(top_seg.size(), true);
    end_is_top.resize(end_seg.size(), false);

    // components
    TraceResult r;
    std::vector<int> roots;
    for (int s = 0; s < (int)uf.parent.size(); ++s)
        if (uf.find(s).first == s) roots.push_back(s);
    r.components = (int)roots.size();
    std::vector<bool> root_open(uf.parent.size(), false);
    for (int s : end_seg) root_open[uf.find(s).first] = true;
    for (int root : roots)
        if (!root_open[root]) ++r.closed_components;

    // resolve orientation: root_dir[root] = travel direction of the root segment
    // (+1 = down). For components with open ends, the end earliest in compass order
    // (NW, NE, SW, SE) fixes the direction (respecting any orientation hints);
    // closed components (knots) default to down.
    std::vector<int> root_dir(uf.parent.size(), 0);
    if (d.ends == 4) {
        if (end_seg.size() != 4) throw std::runtime_error("tangle must have 4 open ends");
        // slot index per compass end
        std::array<int, 4> slot_of{-1, -1, -1, -1};
        for (int s = 0; s < 4; ++s) slot_of[(int)d.slot_end[s]] = s;
        for (int c = 0; c < 4; ++c) {
            int slot = slot_of[c];
            if (slot < 0) throw std::runtime_error("bad slot_end labels");
            auto [root, par] = uf.find(end_seg[slot]);
            if (root_dir[root] != 0) continue;
            int in = d.orient[c] != 0 ? d.orient[c] : 1;  // default: points in
            // "in" at a top end = travelling down; at a bottom end = travelling up
            int dir = end_is_top[slot] ? in : -in;
            root_dir[root] = par ? -dir : dir;
        }
        // consistency of remaining hints
        for (int c = 0; c < 4; ++c) {
            if (d.orient[c] == 0) continue;
            int slot = slot_of[c];
            auto [root, par] = uf.find(end_seg[slot]);
            int dir = par ? -root_dir[root] : root_dir[root];
            int in = end_is_top[slot] ? dir : -dir;
            if (in != d.orient[c]) throw std::runtime_error("incompatible end orientations");
        }
    }
    for (int root : roots)
        if (root_dir[root] == 0) root_dir[root] = 1;

    auto dir_of = [&](int seg) {
        auto [root, par] = uf.find(seg);
        return par ? -root_dir[root] : root_dir[root];
    };

    for (auto const& x : xings) {
        int dL = dir_of(x.segL), dR = dir_of(x.segR);
        int sign = (x.kind == Ev::X ? 1 : -1) * (dL == dR ? 1 : -1);
        if (sign > 0) ++r.n_plus; else ++r.n_minus;
        if (d.ends == 4 && r.components - r.closed_components == 2) {
            if (uf.find(x.segL).first != uf.find(x.segR).first) r.lk2 += sign;
        }
    }
    r.writhe = r.n_plus - r.n_minus;

    if (d.ends == 4) {
        auto [r0, p0] = uf.find(end_seg[0]);
        std::array<int, 4> slot_of{-1, -1, -1, -1};
        for (int s = 0; s < 4; ++s) slot_of[(int)d.slot_end[s]] = s;
        auto same = [&](End a, End b) {
            return uf.find(end_seg[slot_of[(int)a]]).first ==
                   uf.find(end_seg[slot_of[(int)b]]).first;
        };
        if (same(End::NW, End::SW)) r.conn = Conn::V;
        else if (same(End::NW, End::SE)) r.conn = Conn::X;
        else r.conn = Conn::H;
    }
    return r;
}

inline std::pair<Conn, int> classify(TangleDiagram const& d) {
    auto t = trace(d);
    if (d.ends == 4 && t.closed_components > 0)
        throw std::invalid_argument("not a Conway tangle: closed component present");
    return {t.conn, t.lk2};
}

// ---------------------------------------------------------------------------
// text format
// ---------------------------------------------------------------------------

inline std::string write_word(TangleDiagram const& d) {
    std::ostringstream os;
    os << "ends=" << d.ends;
    if (d.ends == 4) {
        os << " orient=";
        for (int c = 0; c < 4; ++c) {
            if (c) os << ",";
            os << (d.orient[c] >= 0 ? '+' : '-');
        }
        bool std_form = d.top_arity == 2 &&
                        d.slot_end == std::array<End, 4>{End::NW, End::NE, End::SW, End::SE};
        if (!std_form) {
            os << " top=" << d.top_arity << " slots=";
            char const* nm[4] = {"NW", "NE", "SW", "SE"};
            for (int s = 0; s < 4; ++s) {
                if (s) os << ",";
                os << nm[(int)d.slot_end[s]];
            }
        }
    }
    os << "\n";
    for (auto const& e : d.events) {
        char k = e.kind == Ev::X ? 'x' : e.kind == Ev::Y ? 'y' : e.kind == Ev::U ? 'u' : 'n';
        os << k << e.pos << "\n";
    }
    return os.str();
}

inline TangleDiagram parse_word(std::string const& text) {
    TangleDiagram d;
    std::istringstream is(text);
    std::string line;
    bool header = false;
    while (std::getline(is, line)) {
        auto h = line.find('#');
        if (h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) {
            if (!header) {
                // header tokens: ends=, orient=, top=, slots=
                if (tok.rfind("ends=", 0) == 0) {
                    d.ends = std::stoi(tok.substr(5));
                    d.top_arity = d.ends == 0 ? 0 : 2;
                    header = true;
                    continue;
                }
                throw std::invalid_argument("slice-word file must start with ends=");
            }
            if (tok.rfind("orient=", 0) == 0) {
                std::string v = tok.substr(7);
                int c = 0;
                for (char ch : v) {
                    if (ch == ',') continue;
                    if (c >= 4) throw std::invalid_argument("too many orientations");
                    d.orient[c++] = ch == '+' ? 1 : -1;
                }
                continue;
            }
            if (tok.rfind("top=", 0) == 0) { d.top_arity = std::stoi(tok.substr(4)); continue; }
            if (tok.rfind("slots=", 0) == 0) {
                std::string v = tok.substr(6);
                int s = 0;
                for (std::size_t i = 0; i + 1 < v.size(); ++i) {
                    std::string nm = v.substr(i, 2);
                    End e;
                    if (nm == "NW") e = End::NW;
                    else if (nm == "NE") e = End::NE;
                    else if (nm == "SW") e = End::SW;
                    else if (nm == "SE") e = End::SE;
                    else continue;
                    if (s >= 4) throw std::invalid_argument("too many slots");
                    d.slot_end[s++] = e;
                    ++i;
                }
                continue;
            }
            char k = tok[0];
            int pos = std::stoi(tok.substr(1));
            Ev ev;
            switch (k) {
                case 'x': ev = Ev::X; break;
                case 'y': ev = Ev::Y; break;
                case 'u': ev = Ev::U; break;
                case 'n': ev = Ev::N; break;
                default: throw std::invalid_argument("unknown event token: " + tok);
            }
            d.events.push_back({ev, pos});
        }
    }
    if (!header) throw std::invalid_argument("missing ends= header");
    std::string err;
    if (!d.validate(&err)) throw std::invalid_argument("invalid slice word: " + err);
    return d;
}

// ---------------------------------------------------------------------------
// constructors
// ---------------------------------------------------------------------------

namespace detail {

inline void append_embedded(std::vector<Event>& out, std::vector<Event> const& src, int offset) {
    for (auto const& e : src) out.push_back({e.kind, e.pos + offset});
}

}  // namespace detail

/// Left-right mirror realized in the plane (rotation about the vertical axis).
/// Crossing types are preserved; only for standard 2->2 tangles and 0-ended words.
inline TangleDiagram rotate_y(TangleDiagram const& d) {
    if (d.ends == 4 && d.top_arity != 2)
        throw std::invalid_argument("rotate_y: standard form required");
    TangleDiagram r = d;
    r.events.clear();
    int w = d.top_arity;
    for (auto const& e : d.events) {
        switch (e.kind) {
            case Ev::U: r.events.push_back({Ev::U, w - e.pos}); w += 2; break;
            case Ev::N: r.events.push_back({Ev::N, w - 2 - e.pos}); w -= 2; break;
            default: r.events.push_back({e.kind, w - 2 - e.pos}); break;
        }
    }
    // compass labels are positional, so slots stay (NW, NE, SW, SE); the end
    // orientations travel with the ends: NW<->NE, SW<->SE
    std::swap(r.orient[(int)End::NW], r.orient[(int)End::NE]);
    std::swap(r.orient[(int)End::SW], r.orient[(int)End::SE]);
    return r;
}

/// Mirror image: switch over- and under-strands everywhere.
inline TangleDiagram mirror(TangleDiagram const& d) {
    TangleDiagram r = d;
    for (auto& e : r.events)
        if (e.kind == Ev::X) e.kind = Ev::Y;
        else if (e.kind == Ev::Y) e.kind = Ev::X;
    return r;
}

/// Tangle sum T1 + T2 (T2 glued to the right of T1); standard forms.
inline TangleDiagram tangle_sum(TangleDiagram const& a, TangleDiagram const& b) {
    if (a.ends != 4 || b.ends != 4 || a.top_arity != 2 || b.top_arity != 2)
        throw std::invalid_argument("tangle_sum: standard 4-ended tangles required");
    TangleDiagram r;
    r.ends = 4;
    r.top_arity = 2;
    r.events.push_back({Ev::U, 1});
    detail::append_embedded(r.events, a.events, 0);
    detail::append_embedded(r.events, b.events, 2);
    r.events.push_back({Ev::N, 1});
    r.orient[(int)End::NW] = a.orient[(int)End::NW];
    r.orient[(int)End::SW] = a.orient[(int)End::SW];
    r.orient[(int)End::NE] = b.orient[(int)End::NE];
    r.orient[(int)End::SE] = b.orient[(int)End::SE];
    return r;
}

/// Union T1 u T2: sum, then close the outer ends around top and bottom. 0-ended.
inline TangleDiagram tangle_union(TangleDiagram const& a, TangleDiagram const& b) {
    TangleDiagram s = tangle_sum(a, b);
    TangleDiagram r;
    r.ends = 0;
    r.top_arity = 0;
    r.events.push_back({Ev::U, 0});
    detail::append_embedded(r.events, s.events, 0);
    r.events.push_back({Ev::N, 0});
    return r;
}

/// Union of a standard tangle A with a tangle B in all-ends-on-top form with
/// slots (NW, SW, SE, NE): glues compass-to-compass after mirroring A, which is
/// exactly A u B in the left/right gluing convention. 0-ended.
inline TangleDiagram glue4(TangleDiagram const& a_std, TangleDiagram const& b_top) {
    if (b_top.top_arity != 4 ||
        b_top.slot_end != std::array<End, 4>{End::NW, End::SW, End::SE, End::NE})
        throw std::invalid_argument("glue4: second tangle must be in 4-top form");
    TangleDiagram a = rotate_y(a_std);
    TangleDiagram r;
    r.ends = 0;
    r.top_arity = 0;
    r.events.push_back({Ev::U, 0});
    r.events.push_back({Ev::U, 0});
    detail::append_embedded(r.events, a.events, 1);
    detail::append_embedded(r.events, b_top.events, 0);
    return r;
}

/// n >= 1 vertical twists appended at the bottom of a standard tangle.
/// kind selects the crossing token used for every twist.
inline TangleDiagram append_vertical_twists(TangleDiagram const& t, int n, Ev kind) {
    TangleDiagram r = t;
    for (int i = 0; i < n; ++i) r.events.push_back({kind, 0});
    return r;
}

/// Q_0 (horizontal) and Q_infinity (vertical) zero-crossing tangles.
inline TangleDiagram q_zero() {
    TangleDiagram d;
    d.events = {{Ev::N, 0}, {Ev::U, 0}};
    return d;
}
inline TangleDiagram q_infinity() { return TangleDiagram{}; }

/// Q_{+1} and Q_{-1}: single-crossing tangles (x is the positive crossing for the
/// standard both-in orientation at NW/NE).
inline TangleDiagram q_one(int sign) {
    TangleDiagram d;
    d.events = {{sign > 0 ? Ev::X : Ev::Y, 0}};
    // connectivity X: re-label so downstream sum/union orientations stay sane
    return d;
}

/// T + Q_n: n horizontal twists added on the right.
inline TangleDiagram add_twists(TangleDiagram const& t, int n) {
    TangleDiagram r = t;
    for (int i = 0; i < std::abs(n); ++i) r = tangle_sum(r, q_one(n > 0 ? 1 : -1));
    return r;
}

/// Standard diagram of the rational tangle Q_s via a continued-fraction expansion.
/// Horizontal twists realize s -> s + n; vertical twists at the bottom realize
/// 1/s -> 1/s + m (m counted with the sign of the crossing used).
inline TangleDiagram rational_tangle(Slope s) {
    if (s.is_infinity()) return q_infinity();
    if (s.is_integer()) return add_twists(q_zero(), (int)s.p);
    // s = n + r with |r| < 1, r != 0, sign(r) = sign matching the remainder
    long long n = s.p / s.q;       // truncation towards zero
    long long rp = s.p - n * s.q;  // remainder numerator, |rp| < q
    // build Q_r, then add n horizontal twists
    // 1/r = q/rp: recurse on t with 1/t = 1/r - m, choosing m = truncation of q/rp
    long long m = s.q / rp;        // 1/r = m + smaller
    long long tq = s.q - m * rp;   // 1/t = 1/r - m = tq/rp
    TangleDiagram inner = rational_tangle(Slope(rp, tq));  // t = rp/tq (tq may be 0 -> infinity)
    // m vertical twists with sign of m
    TangleDiagram withv = append_vertical_twists(inner, (int)std::abs(m), m > 0 ? Ev::X : Ev::Y);
    return add_twists(withv, (int)n);
}

/// Rational filling T(s) = Q_{-s} u T. Accepts standard or 4-top form.
inline TangleDiagram fill(TangleDiagram const& t, Slope s) {
    TangleDiagram q = rational_tangle(-s);
    if (t.top_arity == 4) return glue4(q, t);
    return tangle_union(q, t);
}

// ---------------------------------------------------------------------------
// doubling and satellites
// ---------------------------------------------------------------------------

namespace detail {

/// Cut a 0-ended word open at its first event (necessarily a cup at position 0):
/// a 2->0 word whose two top strands are the cut points.
inline TangleDiagram cut_open(TangleDiagram const& k) {
    if (k.ends != 0 || k.events.empty())
        throw std::invalid_argument("cut_open: 0-ended diagram required");
    if (k.events.front().kind != Ev::U || k.events.front().pos != 0)
        throw std::invalid_argument("cut_open: word must start with u0");
    TangleDiagram c;
    c.ends = 4;          // bookkeeping only; this is a 2->0 fragment used internally
    c.top_arity = 2;
    c.events.assign(k.events.begin() + 1, k.events.end());
    return c;
}

/// Blackboard-framed parallel copy: strand i |-> strands 2i, 2i+1.
inline std::vector<Event> double_events(std::vector<Event> const& src) {
    std::vector<Event> out;
    for (auto const& e : src) {
        int i = e.pos;
        switch (e.kind) {
            case Ev::U:
                out.push_back({Ev::U, 2 * i});
                out.push_back({Ev::U, 2 * i + 1});
                break;
            case Ev::N:
                out.push_back({Ev::N, 2 * i + 1});
                out.push_back({Ev::N, 2 * i});
                break;
            default:
                out.push_back({e.kind, 2 * i + 1});
                out.push_back({e.kind, 2 * i});
                out.push_back({e.kind, 2 * i + 2});
                out.push_back({e.kind, 2 * i + 1});
                break;
        }
    }
    return out;
}

}  // namespace detail

/// The double tangle T_K: K plus its zero-framed parallel, cut open once.
/// Result is in 4-top form with slots (NW, SW, SE, NE); both strands are oriented
/// parallel (in at NW and SW); lk(T_K) = 0 by the writhe-correcting twists.
inline TangleDiagram double_tangle(TangleDiagram const& k) {
    auto tk = trace(k);
    if (k.ends != 0 || tk.components != 1)
        throw std::invalid_argument("double_tangle: input must be a knot diagram");
    TangleDiagram cut = detail::cut_open(k);

    auto build = [&](Ev corr) {
        TangleDiagram d;
        d.ends = 4;
        d.top_arity = 4;
        d.slot_end = {End::NW, End::SW, End::SE, End::NE};
        d.orient = {+1, -1, +1, -1};  // NW in, NE out, SW in, SE out (parallel copies)
        for (int i = 0; i < 2 * std::abs(tk.writhe); ++i) d.events.push_back({corr, 2});
        auto doubled = detail::double_events(cut.events);
        d.events.insert(d.events.end(), doubled.begin(), doubled.end());
        return d;
    };
    // correcting half-twists between the two strands at the right-hand end; the
    // token type must cancel the doubled writhe, asserted via lk
    TangleDiagram d = build(tk.writhe > 0 ? Ev::Y : Ev::X);
    if (tk.writhe != 0 && classify(d).second != 0) d = build(tk.writhe > 0 ? Ev::X : Ev::Y);
    auto [conn, lk2] = classify(d);
    if (conn != Conn::H || lk2 != 0)
        throw std::logic_error("double_tangle: connectivity/lk postcondition failed");
    return d;
}

/// Satellite P_t(K) = (T_P + Q_{-2t}) u T_K as a 0-ended knot diagram.
inline TangleDiagram satellite(TangleDiagram const& pattern, TangleDiagram const& companion, int t) {
    auto [pc, plk] = classify(pattern);
    (void)plk;
    if (pc == Conn::H)
        throw std::invalid_argument("satellite: pattern connectivity H (two-component link)");
    TangleDiagram tk = companion.ends == 0 ? double_tangle(companion) : companion;
    return glue4(add_twists(pattern, -2 * t), tk);
}

/// Whitehead doubles and 2-cables as rational fillings of the double tangle.
inline TangleDiagram whitehead(TangleDiagram const& k, int t, int sign) {
    return fill(double_tangle(k), Slope(4 * t + (sign > 0 ? 1 : -1), 2));
}
inline TangleDiagram cable2(TangleDiagram const& k, int t) {
    return fill(double_tangle(k), Slope(2 * t + 1, 1));
}

// ---------------------------------------------------------------------------
// knot operations
// ---------------------------------------------------------------------------

inline TangleDiagram connected_sum(TangleDiagram const& k1, TangleDiagram const& k2) {
    if (k1.ends != 0 || k2.ends != 0)
        throw std::invalid_argument("connected_sum: knot diagrams required");
    TangleDiagram c1 = detail::cut_open(k1);
    TangleDiagram c2 = detail::cut_open(k2);
    TangleDiagram r;
    r.ends = 0;
    r.top_arity = 0;
    r.events.push_back({Ev::U, 0});
    r.events.push_back({Ev::U, 1});
    detail::append_embedded(r.events, c2.events, 0);
    detail::append_embedded(r.events, c1.events, 0);
    return r;
}

/// Orientation reversal; the slice word is unchanged (the invariants never depend
/// on the orientation of a knot).
inline TangleDiagram reverse(TangleDiagram const& k) { return k; }

// ---------------------------------------------------------------------------
// PD-code ingestion (greedy left-to-right Morse-ification)
// ---------------------------------------------------------------------------

/// Parse "PD[X(1,4,2,5),X(3,6,4,1),...]" (also accepts lowercase/bracket variants).
inline std::vector<std::array<int, 4>> parse_pd(std::string const& text) {
    std::vector<std::array<int, 4>> xs;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == 'X' || text[i] == 'x') {
            std::size_t o = text.find_first_of("([", i);
            std::size_t c = text.find_first_of(")]", o);
            if (o == std::string::npos || c == std::string::npos)
                throw std::invalid_argument("malformed PD code");
            std::string body = text.substr(o + 1, c - o - 1);
            std::array<int, 4> q{};
            int n = 0;
            std::istringstream bs(body);
            std::string num;
            while (std::getline(bs, num, ',')) {
                if (n >= 4) throw std::invalid_argument("PD crossing with >4 edges");
                q[n++] = std::stoi(num);
            }
            if (n != 4) throw std::invalid_argument("PD crossing with <4 edges");
            xs.push_back(q);
            i = c + 1;
        } else {
            ++i;
        }
    }
    if (xs.empty()) throw std::invalid_argument("no crossings in PD code");
    return xs;
}

/// Greedy Morse-ification of a PD code into a 0-ended slice word.
/// Crossing slots are in counterclockwise order starting at the incoming
/// under-strand; rotations place two cyclically adjacent slots at the top.
inline TangleDiagram from_pd(std::vector<std::array<int, 4>> const& xs) {
    int nx = (int)xs.size();
    std::vector<bool> used(nx, false);
    std::vector<int> front;  // current bottom boundary edge labels
    TangleDiagram d;
    d.ends = 0;
    d.top_arity = 0;

    // with rotation r: corners ccw from SW are slots (r, r+1, r+2, r+3):
    // SW, SE, NE, NW. top edges (NW, NE) = (slot r+3, slot r+2); bottom (SW, SE).
    // under-strand occupies SW-NE for even r, so the over diagonal is NW-SE: token y;
    // odd r: token x.
    auto attach = [&](int ci, int r, int at) {
        auto const& q = xs[ci];
        d.events.push_back({(r % 2 == 1) ? Ev::X : Ev::Y, at});
        front[at] = q[r % 4];
        front[at + 1] = q[(r + 1) % 4];
        used[ci] = true;
    };

    int remaining = nx;
    while (remaining > 0 || !front.empty()) {
        // caps first
        bool progressed = false;
        for (std::size_t i = 0; i + 1 < front.size(); ++i) {
            if (front[i] == front[i + 1]) {
                d.events.push_back({Ev::N, (int)i});
                front.erase(front.begin() + i, front.begin() + i + 2);
                progressed = true;
                break;
            }
        }
        if (progressed) continue;
        if (remaining == 0) {
            if (front.empty()) break;
            throw std::runtime_error("PD Morse-ification stuck: non-planar front");
        }
        // full match: crossing with both top edges adjacent in the front
        for (int ci = 0; ci < nx && !progressed; ++ci) {
            if (used[ci]) continue;
            for (int r = 0; r < 4 && !progressed; ++r) {
                int nw = xs[ci][(r + 3) % 4], ne = xs[ci][(r + 2) % 4];
                for (std::size_t i = 0; i + 1 < front.size(); ++i) {
                    if (front[i] == nw && front[i + 1] == ne) {
                        attach(ci, r, (int)i);
                        --remaining;
                        progressed = true;
                        break;
                    }
                }
            }
        }
        if (progressed) continue;
        // half match: one top edge present; cup in the partner
        for (int ci = 0; ci < nx && !progressed; ++ci) {
            if (used[ci]) continue;
            for (int r = 0; r < 4 && !progressed; ++r) {
                int nw = xs[ci][(r + 3) % 4], ne = xs[ci][(r + 2) % 4];
                for (std::size_t i = 0; i < front.size(); ++i) {
                    if (front[i] == nw) {
                        d.events.push_back({Ev::U, (int)i + 1});
                        front.insert(front.begin() + i + 1, {ne, ne});
                        attach(ci, r, (int)i);
                        --remaining;
                        progressed = true;
                        break;
                    }
                }
            }
        }
        if (progressed) continue;
        // no contact: open a fresh crossing at the right-hand end
        for (int ci = 0; ci < nx; ++ci) {
            if (used[ci]) continue;
            int r = 0;
            int nw = xs[ci][(r + 3) % 4], ne = xs[ci][(r + 2) % 4];
            int at = (int)front.size();
            d.events.push_back({Ev::U, at});
            front.insert(front.end(), {nw, nw});
            d.events.push_back({Ev::U, at + 1});
            front.insert(front.begin() + at + 1, {ne, ne});
            attach(ci, r, at);
            --remaining;
            progressed = true;
            break;
        }
        if (!progressed) throw std::runtime_error("PD Morse-ification stuck");
    }
    std::string err;
    if (!d.validate(&err)) throw std::logic_error("PD conversion produced invalid word: " + err);
    return d;
}

inline TangleDiagram from_pd_string(std::string const& text) { return from_pd(parse_pd(text)); }

}  // namespace bnr
