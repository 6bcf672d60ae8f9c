#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace carlab {

using Rational = boost::rational<std::int64_t>;

/// Parses "num/den" or an integer.
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& r);
double to_double(const Rational& r);

/// (x, y) = (1/p, 1/q) on the Riesz diagram.
struct ExponentPoint {
    Rational x;
    Rational y;
    bool operator==(const ExponentPoint&) const = default;
};

/// Parses "x,y" with each coordinate a rational.
ExponentPoint parse_point(const std::string& text);
std::string to_string(const ExponentPoint& p);

/// (x, y)' = (1 - y, 1 - x).
ExponentPoint dual(const ExponentPoint& p);

struct CriticalPoints {
    ExponentPoint G, Q, S, Gd, Qd, Sd;
};
CriticalPoints critical_points(int d);

enum class Theorem { carleman_laplace, m_delta, uniform_sobolev, nonelliptic, heat_carleman, heat_local, dirac_2d };

Theorem parse_theorem(const std::string& tag);
std::string theorem_name(Theorem t);
std::vector<Theorem> all_theorems();

struct RangeVerdict {
    bool admissible = false;
    std::vector<std::string> failed_conditions;
    /// Some closed condition holds with equality.
    bool boundary = false;
};

RangeVerdict check_range(Theorem theorem, int d, const ExponentPoint& p);

enum class Regime { laplace, heat };

struct PredictedExponents {
    Rational e1;
    Rational e2;
    Rational e2_dual;
};
PredictedExponents predicted_exponents(Regime regime, int d, const ExponentPoint& p);

/// Set of x on a line x - y = gap where a theorem is admissible, as an interval
/// with open/closed ends. Only for theorems whose range lies on such a line.
struct Interval {
    bool empty = true;
    Rational lo, hi;
    bool lo_closed = false, hi_closed = false;
    bool contains(const Rational& x) const;
    std::string describe() const;
};
Rational line_gap(Theorem theorem, int d);
Interval admissible_interval(Theorem theorem, int d);
/// x-intervals admissible for a but not for b, on a common line.
std::vector<Interval> interval_difference(const Interval& a, const Interval& b);

/// Labelled vertices and segments of the exponent diagram for dimension d.
struct DiagramData {
    struct Vertex {
        std::string label;
        ExponentPoint p;
    };
    struct Segment {
        std::string label;
        std::string from, to;
        bool closed = true;
    };
    int d = 0;
    std::vector<Vertex> vertices;
    std::vector<Segment> segments;
};
DiagramData figure_geometry(int d);

}  // namespace carlab
