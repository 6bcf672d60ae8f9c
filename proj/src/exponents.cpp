#include "carlab/exponents.hpp"

#include "carlab/errors.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <map>

namespace carlab {

namespace {

std::int64_t parse_int(std::string_view s, const std::string& whole) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        throw ContractViolation("not a rational: '" + whole + "'");
    return v;
}

Rational R(std::int64_t n, std::int64_t d = 1) { return Rational(n, d); }

enum class Op { eq, ge, gt, le, lt };

// coef_x * x + coef_y * y  (op)  rhs
struct Condition {
    std::string name;
    Rational cx, cy;
    Op op;
    Rational rhs;
};

struct TheoremSpec {
    int min_d = 1;
    int max_d = 1 << 20;
    std::vector<Condition> conditions;
};

// 1 < p, q < infinity, optionally with p < q.
void add_open_box(std::vector<Condition>& c, bool p_less_q) {
    c.push_back({"p>1", R(1), R(0), Op::lt, R(1)});
    c.push_back({"q<inf", R(0), R(1), Op::gt, R(0)});
    if (p_less_q) {
        c.push_back({"p<q", R(1), R(-1), Op::gt, R(0)});
    } else {
        c.push_back({"p<inf", R(1), R(0), Op::gt, R(0)});
        c.push_back({"q>1", R(0), R(1), Op::lt, R(1)});
    }
}

TheoremSpec theorem_spec(Theorem t, int d) {
    TheoremSpec s;
    auto& c = s.conditions;
    const std::int64_t D = d;
    switch (t) {
        case Theorem::carleman_laplace:
            s.min_d = 3;
            add_open_box(c, true);
            c.push_back({"gap=2/d", R(1), R(-1), Op::eq, R(2, D)});
            c.push_back({"lower 1/p bound", R(1), R(0), Op::ge, R(D * D - 4, 2 * D * (D - 1))});
            c.push_back({"upper 1/p bound", R(1), R(0), Op::le, R(D + 2, 2 * (D - 1))});
            break;
        case Theorem::m_delta:
            s.min_d = 2;
            add_open_box(c, false);
            c.push_back({"gap>=2/(d+2)", R(1), R(-1), Op::ge, R(2, D + 2)});
            c.push_back({"dx-y>=d/2", R(D), R(-1), Op::ge, R(D, 2)});
            c.push_back({"(d-2)/2>=dy-x", R(-1), R(D), Op::le, R(D - 2, 2)});
            break;
        case Theorem::uniform_sobolev:
            s.min_d = 3;
            add_open_box(c, true);
            c.push_back({"gap=2/d", R(1), R(-1), Op::eq, R(2, D)});
            c.push_back({"lower 1/p bound", R(1), R(0), Op::gt, R(D + 1, 2 * D)});
            c.push_back({"upper 1/p bound", R(1), R(0), Op::lt, R(D + 3, 2 * D)});
            break;
        case Theorem::nonelliptic:
            s.min_d = 3;
            add_open_box(c, true);
            c.push_back({"gap=2/d", R(1), R(-1), Op::eq, R(2, D)});
            c.push_back({"p<2(d-1)/d", R(1), R(0), Op::gt, R(D, 2 * (D - 1))});
            c.push_back({"q>2(d-1)/(d-2)", R(0), R(1), Op::lt, R(D - 2, 2 * (D - 1))});
            break;
        case Theorem::heat_carleman:
            s.min_d = 1;
            add_open_box(c, false);
            c.push_back({"gap=2/(d+2)", R(1), R(-1), Op::eq, R(2, D + 2)});
            c.push_back({"lower 1/p bound", R(1), R(0), Op::ge, R(D * D + 3 * D - 2, 2 * D * (D + 2))});
            c.push_back({"upper 1/q bound", R(0), R(1), Op::le, R(D * D + D + 2, 2 * D * (D + 2))});
            break;
        case Theorem::heat_local:
            s.min_d = 1;
            add_open_box(c, false);
            c.push_back({"gap>=2/(d+3)", R(1), R(-1), Op::ge, R(2, D + 3)});
            c.push_back({"(d+1)x-y>=(d+1)/2", R(D + 1), R(-1), Op::ge, R(D + 1, 2)});
            c.push_back({"(d-1)/2>=(d+1)y-x", R(-1), R(D + 1), Op::le, R(D - 1, 2)});
            break;
        case Theorem::dirac_2d:
            s.min_d = 2;
            s.max_d = 2;
            c.push_back({"gap=1/2", R(1), R(-1), Op::eq, R(1, 2)});
            c.push_back({"p>1", R(1), R(0), Op::lt, R(1)});
            c.push_back({"p<2", R(1), R(0), Op::gt, R(1, 2)});
            break;
    }
    return s;
}

bool holds(const Rational& lhs, Op op, const Rational& rhs) {
    switch (op) {
        case Op::eq: return lhs == rhs;
        case Op::ge: return lhs >= rhs;
        case Op::gt: return lhs > rhs;
        case Op::le: return lhs <= rhs;
        case Op::lt: return lhs < rhs;
    }
    return false;
}

const std::map<std::string, Theorem>& theorem_table() {
    static const std::map<std::string, Theorem> table = {
        {"carleman-laplace", Theorem::carleman_laplace}, {"m-delta", Theorem::m_delta},
        {"uniform-sobolev", Theorem::uniform_sobolev},   {"nonelliptic", Theorem::nonelliptic},
        {"heat-carleman", Theorem::heat_carleman},       {"heat-local", Theorem::heat_local},
        {"dirac-2d", Theorem::dirac_2d},
    };
    return table;
}

Interval intersect(Interval a, const Interval& b) {
    if (a.empty || b.empty) return Interval{};
    if (b.lo > a.lo || (b.lo == a.lo && !b.lo_closed)) {
        a.lo = b.lo;
        a.lo_closed = b.lo_closed;
    }
    if (b.hi < a.hi || (b.hi == a.hi && !b.hi_closed)) {
        a.hi = b.hi;
        a.hi_closed = b.hi_closed;
    }
    if (a.lo > a.hi || (a.lo == a.hi && !(a.lo_closed && a.hi_closed))) return Interval{};
    return a;
}

// A large box standing in for the real line; every relevant x lies in [-2, 2].
Interval whole_line() { return Interval{false, R(-4), R(4), true, true}; }

}  // namespace

// ---------------------------------------------------------------------------

Rational parse_rational(const std::string& text) {
    const auto slash = text.find('/');
    if (slash == std::string::npos) return Rational(parse_int(text, text));
    const auto num = parse_int(std::string_view(text).substr(0, slash), text);
    const auto den = parse_int(std::string_view(text).substr(slash + 1), text);
    if (den == 0) throw ContractViolation("zero denominator: '" + text + "'");
    return Rational(num, den);
}

std::string to_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

double to_double(const Rational& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

ExponentPoint parse_point(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw ContractViolation("point must be 'x,y': '" + text + "'");
    return {parse_rational(text.substr(0, comma)), parse_rational(text.substr(comma + 1))};
}

std::string to_string(const ExponentPoint& p) { return "(" + to_string(p.x) + ", " + to_string(p.y) + ")"; }

ExponentPoint dual(const ExponentPoint& p) { return {R(1) - p.y, R(1) - p.x}; }

CriticalPoints critical_points(int d) {
    if (d < 2) throw ContractViolation("critical_points requires d >= 2");
    const std::int64_t D = d;
    CriticalPoints c;
    c.G = {R(1, 2), R(D - 2, 2 * D)};
    c.Q = {R(D, 2 * (D - 1)), R((D - 2) * (D - 2), 2 * (D - 1) * D)};
    c.S = {R(D * D + 2 * D - 4, 2 * (D + 2) * (D - 1)), R(D * (D - 2), 2 * (D + 2) * (D - 1))};
    c.Gd = dual(c.G);
    c.Qd = dual(c.Q);
    c.Sd = dual(c.S);
    return c;
}

Theorem parse_theorem(const std::string& tag) {
    const auto& table = theorem_table();
    auto it = table.find(tag);
    if (it == table.end()) throw ContractViolation("unknown theorem tag '" + tag + "'");
    return it->second;
}

std::string theorem_name(Theorem t) {
    for (const auto& [name, th] : theorem_table())
        if (th == t) return name;
    return "unknown";
}

std::vector<Theorem> all_theorems() {
    return {Theorem::carleman_laplace, Theorem::m_delta,      Theorem::uniform_sobolev, Theorem::nonelliptic,
            Theorem::heat_carleman,    Theorem::heat_local, Theorem::dirac_2d};
}

RangeVerdict check_range(Theorem theorem, int d, const ExponentPoint& p) {
    const auto spec = theorem_spec(theorem, d);
    RangeVerdict v;
    if (d < spec.min_d || d > spec.max_d) v.failed_conditions.push_back("dimension");
    for (const auto& c : spec.conditions) {
        const Rational lhs = c.cx * p.x + c.cy * p.y;
        if (!holds(lhs, c.op, c.rhs)) {
            v.failed_conditions.push_back(c.name);
        } else if ((c.op == Op::ge || c.op == Op::le) && lhs == c.rhs) {
            v.boundary = true;
        }
    }
    v.admissible = v.failed_conditions.empty();
    return v;
}

PredictedExponents predicted_exponents(Regime regime, int d, const ExponentPoint& p) {
    const std::int64_t n = regime == Regime::laplace ? d : d + 1;
    if (regime == Regime::laplace && d < 2) throw ContractViolation("laplace regime requires d >= 2");
    if (regime == Regime::heat && d < 1) throw ContractViolation("heat regime requires d >= 1");
    PredictedExponents e;
    e.e1 = R(-1) + R(n + 2, 2) * (p.x - p.y);
    e.e2 = R(n) * p.x - p.y - R(n, 2);
    e.e2_dual = p.x - R(n) * p.y + R(n - 2, 2);
    return e;
}

// ---------------------------------------------------------------------------
// Line intervals

bool Interval::contains(const Rational& x) const {
    if (empty) return false;
    const bool above = lo_closed ? x >= lo : x > lo;
    const bool below = hi_closed ? x <= hi : x < hi;
    return above && below;
}

std::string Interval::describe() const {
    if (empty) return "empty";
    return std::string(lo_closed ? "[" : "(") + to_string(lo) + ", " + to_string(hi) + (hi_closed ? "]" : ")");
}

Rational line_gap(Theorem theorem, int d) {
    switch (theorem) {
        case Theorem::carleman_laplace:
        case Theorem::uniform_sobolev:
        case Theorem::nonelliptic: return R(2, d);
        case Theorem::heat_carleman: return R(2, d + 2);
        case Theorem::dirac_2d: return R(1, 2);
        default: break;
    }
    throw ContractViolation("theorem '" + theorem_name(theorem) + "' is not confined to a line");
}

Interval admissible_interval(Theorem theorem, int d) {
    const Rational gap = line_gap(theorem, d);
    const auto spec = theorem_spec(theorem, d);
    if (d < spec.min_d || d > spec.max_d) return Interval{};
    Interval acc = whole_line();
    for (const auto& c : spec.conditions) {
        if (c.op == Op::eq) continue;  // the line itself
        // (cx + cy) x  op  rhs + cy * gap
        const Rational a = c.cx + c.cy;
        const Rational b = c.rhs + c.cy * gap;
        if (a == R(0)) {
            if (!holds(R(0), c.op, b)) return Interval{};
            continue;
        }
        Op op = c.op;
        if (a < R(0)) {
            op = op == Op::ge ? Op::le : op == Op::gt ? Op::lt : op == Op::le ? Op::ge : Op::gt;
        }
        const Rational bound = b / a;
        Interval half = whole_line();
        if (op == Op::ge || op == Op::gt) {
            half.lo = bound;
            half.lo_closed = op == Op::ge;
        } else {
            half.hi = bound;
            half.hi_closed = op == Op::le;
        }
        acc = intersect(acc, half);
    }
    return acc;
}

std::vector<Interval> interval_difference(const Interval& a, const Interval& b) {
    if (a.empty) return {};
    if (b.empty) return {a};
    std::vector<Interval> out;
    Interval left = whole_line();
    left.hi = b.lo;
    left.hi_closed = !b.lo_closed;
    Interval right = whole_line();
    right.lo = b.hi;
    right.lo_closed = !b.hi_closed;
    for (const auto& piece : {intersect(a, left), intersect(a, right)})
        if (!piece.empty) out.push_back(piece);
    return out;
}

// ---------------------------------------------------------------------------

DiagramData figure_geometry(int d) {
    if (d < 2) throw ContractViolation("figure_geometry requires d >= 2");
    const std::int64_t D = d;
    const auto cp = critical_points(d);
    const ExponentPoint A{R(D * D - 4, 2 * D * (D - 1)), R(D - 4, 2 * (D - 1))};
    const ExponentPoint B{R(D + 1, 2 * D), R(D - 3, 2 * D)};
    DiagramData g;
    g.d = d;
    g.vertices = {
        {"O", {R(0), R(0)}}, {"E", {R(1), R(0)}},  {"C", {R(1, 2), R(0)}}, {"C'", dual({R(1, 2), R(0)})},
        {"A", A},            {"A'", dual(A)},      {"B", B},               {"B'", dual(B)},
        {"G", cp.G},         {"Q", cp.Q},          {"S", cp.S},            {"G'", cp.Gd},
        {"Q'", cp.Qd},       {"S'", cp.Sd},        {"I", {R(1), R(1)}},
    };
    g.segments = {
        {"carleman", "A", "A'", true},    {"sobolev", "B", "B'", false},  {"critical-line", "C", "S", true},
        {"pentagon", "C", "S", true},     {"pentagon", "S", "S'", true},  {"pentagon", "S'", "C'", true},
        {"pentagon", "C'", "E", true},    {"pentagon", "E", "C", true},   {"triangle", "C", "S", true},
        {"triangle", "S", "Q", true},     {"triangle", "Q", "C", true},   {"diagonal", "O", "I", true},
    };
    return g;
}

}  // namespace carlab
