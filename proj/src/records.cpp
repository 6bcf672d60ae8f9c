#include "carlab/records.hpp"

#include "carlab/errors.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace carlab {

namespace {

constexpr const char* kSweepHeader = "family,symbol,d,p_num,p_den,q_num,q_den,eps,ratio,predicted_exp,grid";
constexpr const char* kOperatorHeader = "symbol,d,eps,k,p,q,in_norm,out_norm,ratio,grid";

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string join(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].find_first_of(",\n") != std::string::npos) throw IoError("csv: cell contains a separator");
        if (i) out += ',';
        out += cells[i];
    }
    return out;
}

double parse_double(const std::string& s) {
    if (s == "inf") return kInfinity;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw IoError("csv: bad number '" + s + "'");
    return v;
}

std::int64_t parse_int(const std::string& s) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw IoError("csv: bad integer '" + s + "'");
    return v;
}

void expect_schema(std::istream& is, const std::string& header) {
    std::string line;
    if (!std::getline(is, line) || line != "# schema=" + std::to_string(kSchemaVersion))
        throw IoError("csv: missing or unsupported schema line");
    if (!std::getline(is, line) || (!header.empty() && line != header)) throw IoError("csv: unexpected header");
}

std::vector<std::vector<std::string>> body(std::istream& is, std::size_t columns) {
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto cells = split(line);
        if (cells.size() != columns) throw IoError("csv: row has " + std::to_string(cells.size()) + " cells");
        rows.push_back(std::move(cells));
    }
    return rows;
}

}  // namespace

std::pair<std::int64_t, std::int64_t> exponent_fraction(const Rational& x) {
    if (x.numerator() == 0) return {1, 0};
    return {x.denominator(), x.numerator()};
}

Rational reciprocal_of(std::int64_t num, std::int64_t den) {
    if (num == 0) throw IoError("exponent with zero numerator");
    return Rational(den, num);
}

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw IoError("format_double failed");
    return std::string(buf, ptr);
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& rows) {
    os << "# schema=" << kSchemaVersion << '\n' << kSweepHeader << '\n';
    for (const auto& r : rows) {
        const auto [pn, pd] = exponent_fraction(r.point.x);
        const auto [qn, qd] = exponent_fraction(r.point.y);
        os << join({r.family, r.symbol, std::to_string(r.d), std::to_string(pn), std::to_string(pd), std::to_string(qn),
                    std::to_string(qd), format_double(r.eps), format_double(r.ratio), format_double(r.predicted_exp),
                    r.grid})
           << '\n';
    }
    if (!os) throw IoError("write_sweep_csv: stream failure");
}

std::vector<SweepRecord> read_sweep_csv(std::istream& is) {
    expect_schema(is, kSweepHeader);
    std::vector<SweepRecord> out;
    for (const auto& c : body(is, 11)) {
        SweepRecord r;
        r.family = c[0];
        r.symbol = c[1];
        r.d = static_cast<std::size_t>(parse_int(c[2]));
        r.point = {reciprocal_of(parse_int(c[3]), parse_int(c[4])), reciprocal_of(parse_int(c[5]), parse_int(c[6]))};
        r.eps = parse_double(c[7]);
        r.ratio = parse_double(c[8]);
        r.predicted_exp = parse_double(c[9]);
        r.grid = c[10];
        out.push_back(std::move(r));
    }
    return out;
}

void write_operator_csv(std::ostream& os, const std::vector<OperatorReport>& rows) {
    os << "# schema=" << kSchemaVersion << '\n' << kOperatorHeader << '\n';
    for (const auto& r : rows)
        os << join({r.symbol, std::to_string(r.d), format_double(r.eps), std::to_string(r.k), format_double(r.p),
                    format_double(r.q), format_double(r.in_norm), format_double(r.out_norm), format_double(r.ratio),
                    r.grid})
           << '\n';
    if (!os) throw IoError("write_operator_csv: stream failure");
}

std::vector<OperatorReport> read_operator_csv(std::istream& is) {
    expect_schema(is, kOperatorHeader);
    std::vector<OperatorReport> out;
    for (const auto& c : body(is, 10)) {
        OperatorReport r;
        r.symbol = c[0];
        r.d = static_cast<std::size_t>(parse_int(c[1]));
        r.eps = parse_double(c[2]);
        r.k = static_cast<int>(parse_int(c[3]));
        r.p = parse_double(c[4]);
        r.q = parse_double(c[5]);
        r.in_norm = parse_double(c[6]);
        r.out_norm = parse_double(c[7]);
        r.ratio = parse_double(c[8]);
        r.grid = c[9];
        out.push_back(std::move(r));
    }
    return out;
}

void write_table(std::ostream& os, const Table& t) {
    os << "# schema=" << kSchemaVersion << '\n' << join(t.header) << '\n';
    for (const auto& row : t.rows) {
        if (row.size() != t.header.size()) throw ContractViolation("write_table: row width differs from header");
        os << join(row) << '\n';
    }
    if (!os) throw IoError("write_table: stream failure");
}

Table read_table(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "# schema=" + std::to_string(kSchemaVersion))
        throw IoError("csv: missing or unsupported schema line");
    if (!std::getline(is, line)) throw IoError("csv: missing header");
    Table t;
    t.header = split(line);
    t.rows = body(is, t.header.size());
    return t;
}

nlohmann::json slope_json(const std::vector<SweepRecord>& rows, const SlopeFit& fit, double tolerance) {
    if (rows.empty()) throw ContractViolation("slope_json: no records");
    const auto& r0 = rows.front();
    nlohmann::json eps = nlohmann::json::array();
    for (const auto& r : rows) eps.push_back(r.eps);
    const double err = std::abs(fit.slope - r0.predicted_exp);
    return {{"schema", kSchemaVersion},
            {"kind", "slope-fit"},
            {"family", r0.family},
            {"symbol", r0.symbol},
            {"d", r0.d},
            {"point", to_string(r0.point)},
            {"eps", eps},
            {"slope", fit.slope},
            {"intercept", fit.intercept},
            {"residual_rms", fit.residual_rms},
            {"predicted", r0.predicted_exp},
            {"abs_error", err},
            {"tolerance", tolerance},
            {"pass", err <= tolerance}};
}

nlohmann::json ranges_json(int d) {
    const auto geo = figure_geometry(d);
    nlohmann::json vertices = nlohmann::json::array();
    for (const auto& v : geo.vertices)
        vertices.push_back({{"label", v.label}, {"x", to_string(v.p.x)}, {"y", to_string(v.p.y)}});
    nlohmann::json segments = nlohmann::json::array();
    for (const auto& s : geo.segments)
        segments.push_back({{"label", s.label}, {"from", s.from}, {"to", s.to}, {"closed", s.closed}});
    return {{"schema", kSchemaVersion}, {"kind", "figure-geometry"}, {"d", d}, {"vertices", vertices}, {"segments", segments}};
}

}  // namespace carlab
