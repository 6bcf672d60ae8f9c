#include "carlab/symbols.hpp"

#include "carlab/cutoffs.hpp"
#include "carlab/errors.hpp"

#include <cmath>
#include <map>

namespace carlab {

namespace {

constexpr cplx kI{0.0, 1.0};

double sum_sq(std::span<const double> xi, std::size_t count) {
    double s = 0.0;
    for (std::size_t a = 0; a < count; ++a) s += xi[a] * xi[a];
    return s;
}

cplx checked_inverse(cplx den, const char* what) {
    if (den == cplx{0.0, 0.0}) throw SingularityError(std::string(what) + ": evaluated on the singular set");
    return 1.0 / den;
}

// m_Delta at a point given by |eta|^2 and the last coordinate.
cplx m_delta(double eta2, double last) {
    const double r2 = eta2 + last * last;
    const double c = cutoffs::chi_radial(std::sqrt(r2));
    if (c == 0.0) return 0.0;
    return c * checked_inverse({r2 - 1.0, 2.0 * last}, "m_Delta");
}

cplx m_eps(double eta2, double last, double eps) {
    const double cut = cutoffs::psi(std::abs(last) / eps);
    if (cut == 0.0) return 0.0;
    return cut * m_delta(eta2, last);
}

Mat2 dirac_matrix(std::span<const double> xi, double angle) {
    const double c = cutoffs::chi(xi);
    if (c == 0.0) return Mat2{};
    const cplx den{xi[0] * xi[0] + xi[1] * xi[1] - 1.0, 2.0 * xi[1]};
    const cplx inv = checked_inverse(den, "dirac");
    const double ca = std::cos(angle), sa = std::sin(angle);
    // R (xi + i e2) with R the rotation by angle.
    const cplx w1 = ca * xi[0] - sa * xi[1] - kI * sa;
    const cplx w2 = sa * xi[0] + ca * xi[1] + kI * ca;
    return (c * inv) * pauli_dot(w1, w2);
}

void require_dim(std::size_t d, std::size_t lo, const char* who) {
    if (d < lo) throw ContractViolation(std::string(who) + ": dimension too small");
}

void require_eps(double eps, const char* who) {
    if (!(eps > 0.0) || !(eps <= 2.0)) throw ContractViolation(std::string(who) + ": eps must lie in (0, 2]");
}

const std::map<std::string, SymbolKind>& kind_table() {
    static const std::map<std::string, SymbolKind> table = {
        {"constant", SymbolKind::constant},
        {"laplacian", SymbolKind::laplacian},
        {"conjugated-laplacian", SymbolKind::conjugated_laplacian},
        {"laplace-carleman", SymbolKind::laplace_carleman},
        {"laplace-local", SymbolKind::laplace_local},
        {"dyadic-piece", SymbolKind::dyadic_piece},
        {"rescaled-piece", SymbolKind::rescaled_piece},
        {"shell-piece", SymbolKind::shell_piece},
        {"imag-part", SymbolKind::imag_part},
        {"dirac", SymbolKind::dirac},
        {"dirac-piece", SymbolKind::dirac_piece},
        {"nonelliptic", SymbolKind::nonelliptic},
        {"heat", SymbolKind::heat},
        {"heat-dyadic", SymbolKind::heat_dyadic},
        {"heat-local", SymbolKind::heat_local},
        {"heat-imag", SymbolKind::heat_imag},
    };
    return table;
}

}  // namespace

std::string symbol_kind_name(SymbolKind kind) {
    for (const auto& [name, k] : kind_table())
        if (k == kind) return name;
    return "unknown";
}

SymbolKind parse_symbol_kind(const std::string& name) {
    const auto& table = kind_table();
    auto it = table.find(name);
    if (it == table.end()) throw ContractViolation("unknown symbol kind '" + name + "'");
    return it->second;
}

Symbol::Symbol(SymbolKind kind, SymbolParams p) : kind_(kind), p_(std::move(p)) {}

Symbol Symbol::constant(std::size_t d, cplx value) {
    require_dim(d, 1, "constant");
    SymbolParams p;
    p.d = d;
    p.value = value;
    return Symbol(SymbolKind::constant, p);
}

Symbol Symbol::laplacian(std::size_t d) {
    require_dim(d, 1, "laplacian");
    SymbolParams p;
    p.d = d;
    return Symbol(SymbolKind::laplacian, p);
}

Symbol Symbol::conjugated_laplacian(std::vector<double> v) {
    require_dim(v.size(), 1, "conjugated-laplacian");
    SymbolParams p;
    p.d = v.size();
    p.v = std::move(v);
    return Symbol(SymbolKind::conjugated_laplacian, p);
}

Symbol Symbol::laplace_carleman(std::vector<double> v) {
    require_dim(v.size(), 1, "laplace-carleman");
    SymbolParams p;
    p.d = v.size();
    p.v = std::move(v);
    return Symbol(SymbolKind::laplace_carleman, p);
}

Symbol Symbol::laplace_local(std::size_t d) {
    require_dim(d, 2, "laplace-local");
    SymbolParams p;
    p.d = d;
    return Symbol(SymbolKind::laplace_local, p);
}

Symbol Symbol::dyadic_piece(std::size_t d, double eps) {
    require_dim(d, 2, "dyadic-piece");
    require_eps(eps, "dyadic-piece");
    SymbolParams p;
    p.d = d;
    p.eps = eps;
    return Symbol(SymbolKind::dyadic_piece, p);
}

Symbol Symbol::rescaled_piece(std::size_t d, double eps) {
    require_dim(d, 2, "rescaled-piece");
    require_eps(eps, "rescaled-piece");
    SymbolParams p;
    p.d = d;
    p.eps = eps;
    return Symbol(SymbolKind::rescaled_piece, p);
}

Symbol Symbol::shell_piece(std::size_t d, double eps, int k) {
    require_dim(d, 2, "shell-piece");
    require_eps(eps, "shell-piece");
    if (k < 0) throw ContractViolation("shell-piece: k must be >= 0");
    SymbolParams p;
    p.d = d;
    p.eps = eps;
    p.k = k;
    return Symbol(SymbolKind::shell_piece, p);
}

Symbol Symbol::imag_part(std::size_t d, double eps) {
    require_dim(d, 2, "imag-part");
    require_eps(eps, "imag-part");
    SymbolParams p;
    p.d = d;
    p.eps = eps;
    return Symbol(SymbolKind::imag_part, p);
}

Symbol Symbol::dirac(double angle) {
    SymbolParams p;
    p.d = 2;
    p.angle = angle;
    return Symbol(SymbolKind::dirac, p);
}

Symbol Symbol::dirac_piece(double angle, double eps) {
    require_eps(eps, "dirac-piece");
    SymbolParams p;
    p.d = 2;
    p.angle = angle;
    p.eps = eps;
    return Symbol(SymbolKind::dirac_piece, p);
}

Symbol Symbol::nonelliptic(int l, std::vector<double> v) {
    const auto d = static_cast<int>(v.size());
    if (d < 2 || l < 1 || l > d - 1) throw ContractViolation("nonelliptic: need 1 <= l <= d-1");
    SymbolParams p;
    p.d = v.size();
    p.l = l;
    p.v = std::move(v);
    return Symbol(SymbolKind::nonelliptic, p);
}

Symbol Symbol::heat(std::size_t d_space, double sigma) {
    require_dim(d_space, 1, "heat");
    SymbolParams p;
    p.d = d_space + 1;
    p.sigma = sigma;
    return Symbol(SymbolKind::heat, p);
}

Symbol Symbol::heat_dyadic(std::size_t d_space, double sigma, int j) {
    require_dim(d_space, 1, "heat-dyadic");
    SymbolParams p;
    p.d = d_space + 1;
    p.sigma = sigma;
    p.j = j;
    return Symbol(SymbolKind::heat_dyadic, p);
}

Symbol Symbol::heat_local(std::size_t d_space, double eps) {
    require_dim(d_space, 1, "heat-local");
    require_eps(eps, "heat-local");
    SymbolParams p;
    p.d = d_space + 1;
    p.eps = eps;
    return Symbol(SymbolKind::heat_local, p);
}

Symbol Symbol::heat_imag(std::size_t d_space, double eps) {
    require_dim(d_space, 1, "heat-imag");
    require_eps(eps, "heat-imag");
    SymbolParams p;
    p.d = d_space + 1;
    p.eps = eps;
    return Symbol(SymbolKind::heat_imag, p);
}

Symbol Symbol::from_name(const std::string& name, const SymbolParams& p) {
    const std::size_t d_space = p.d > 0 ? p.d - 1 : 0;
    switch (parse_symbol_kind(name)) {
        case SymbolKind::constant: return constant(p.d, p.value);
        case SymbolKind::laplacian: return laplacian(p.d);
        case SymbolKind::conjugated_laplacian: return conjugated_laplacian(p.v);
        case SymbolKind::laplace_carleman: return laplace_carleman(p.v);
        case SymbolKind::laplace_local: return laplace_local(p.d);
        case SymbolKind::dyadic_piece: return dyadic_piece(p.d, p.eps);
        case SymbolKind::rescaled_piece: return rescaled_piece(p.d, p.eps);
        case SymbolKind::shell_piece: return shell_piece(p.d, p.eps, p.k);
        case SymbolKind::imag_part: return imag_part(p.d, p.eps);
        case SymbolKind::dirac: return dirac(p.angle);
        case SymbolKind::dirac_piece: return dirac_piece(p.angle, p.eps);
        case SymbolKind::nonelliptic: return nonelliptic(p.l, p.v);
        case SymbolKind::heat: return heat(d_space, p.sigma);
        case SymbolKind::heat_dyadic: return heat_dyadic(d_space, p.sigma, p.j);
        case SymbolKind::heat_local: return heat_local(d_space, p.eps);
        case SymbolKind::heat_imag: return heat_imag(d_space, p.eps);
    }
    throw ContractViolation("unknown symbol kind '" + name + "'");
}

bool Symbol::is_matrix() const noexcept {
    return kind_ == SymbolKind::dirac || kind_ == SymbolKind::dirac_piece;
}

std::string Symbol::name() const { return symbol_kind_name(kind_); }

cplx Symbol::eval(std::span<const double> xi) const {
    if (xi.size() != p_.d) throw ContractViolation(name() + ": point dimension mismatch");
    if (is_matrix()) throw ContractViolation(name() + ": matrix symbol, use eval_matrix");
    for (double c : xi)
        if (!std::isfinite(c)) throw ContractViolation(name() + ": non-finite point");
    const std::size_t d = p_.d;
    const double eps = p_.eps;
    switch (kind_) {
        case SymbolKind::constant: return p_.value;
        case SymbolKind::laplacian: return sum_sq(xi, d);
        case SymbolKind::conjugated_laplacian: {
            double vx = 0.0, vv = 0.0;
            for (std::size_t a = 0; a < d; ++a) {
                vx += p_.v[a] * xi[a];
                vv += p_.v[a] * p_.v[a];
            }
            return {sum_sq(xi, d) - vv, 2.0 * vx};
        }
        case SymbolKind::laplace_carleman: {
            double vx = 0.0, vv = 0.0;
            for (std::size_t a = 0; a < d; ++a) {
                vx += p_.v[a] * xi[a];
                vv += p_.v[a] * p_.v[a];
            }
            return checked_inverse({sum_sq(xi, d) - vv, 2.0 * vx}, "laplace-carleman");
        }
        case SymbolKind::laplace_local: return m_delta(sum_sq(xi, d - 1), xi[d - 1]);
        case SymbolKind::dyadic_piece: return m_eps(sum_sq(xi, d - 1), xi[d - 1], eps);
        case SymbolKind::rescaled_piece: return m_eps(sum_sq(xi, d - 1), eps * xi[d - 1], eps);
        case SymbolKind::shell_piece: {
            const double eta2 = sum_sq(xi, d - 1);
            const double cut = cutoffs::psi_k(p_.k, (eta2 - 1.0) / eps);
            if (cut == 0.0) return 0.0;
            return cut * m_eps(eta2, eps * xi[d - 1], eps);
        }
        case SymbolKind::imag_part: {
            const double tau = xi[d - 1];
            const double cut = cutoffs::psi(std::abs(tau));
            if (cut == 0.0) return 0.0;
            const double et = eps * tau;
            const double eta2 = sum_sq(xi, d - 1);
            const double c = cutoffs::chi_radial(std::sqrt(eta2 + et * et));
            if (c == 0.0) return 0.0;
            const double a = eta2 - 1.0 + et * et;
            return 2.0 * et * c * cut / (a * a + 4.0 * et * et);
        }
        case SymbolKind::nonelliptic: {
            const double q_xi = quadratic_form(xi, p_.l);
            const double q_v = quadratic_form(p_.v, p_.l);
            double vmx = 0.0;
            for (std::size_t a = 0; a < d; ++a)
                vmx += (static_cast<int>(a) < p_.l ? -1.0 : 1.0) * p_.v[a] * xi[a];
            return checked_inverse({q_xi - q_v, 2.0 * vmx}, "nonelliptic");
        }
        case SymbolKind::heat:
            return checked_inverse({sum_sq(xi, d - 1) + p_.sigma, xi[d - 1]}, "heat");
        case SymbolKind::heat_dyadic: {
            const double n = parabolic_norm(xi.first(d - 1), xi[d - 1]);
            const double cut = cutoffs::psi(std::ldexp(n, -p_.j));
            if (cut == 0.0) return 0.0;
            return cut * checked_inverse({sum_sq(xi, d - 1) + p_.sigma, xi[d - 1]}, "heat-dyadic");
        }
        case SymbolKind::heat_local: {
            const double tau = xi[d - 1];
            const double cut = cutoffs::psi(std::abs(tau) / eps);
            if (cut == 0.0) return 0.0;
            const double c = cutoffs::chi_tilde(parabolic_norm(xi.first(d - 1), tau));
            if (c == 0.0) return 0.0;
            return c * cut * checked_inverse({sum_sq(xi, d - 1) - 1.0, tau}, "heat-local");
        }
        case SymbolKind::heat_imag: {
            const double tau = xi[d - 1];
            const double cut = cutoffs::psi(std::abs(tau));
            if (cut == 0.0) return 0.0;
            const double et = eps * tau;
            const double c = cutoffs::chi_tilde(parabolic_norm(xi.first(d - 1), et));
            if (c == 0.0) return 0.0;
            const double a = sum_sq(xi, d - 1) - 1.0;
            return et * c * cut / (a * a + et * et);
        }
        case SymbolKind::dirac:
        case SymbolKind::dirac_piece: break;
    }
    throw ContractViolation(name() + ": not a scalar symbol");
}

Mat2 Symbol::eval_matrix(std::span<const double> xi) const {
    if (xi.size() != p_.d) throw ContractViolation(name() + ": point dimension mismatch");
    if (!is_matrix()) return Mat2::diag(eval(xi), eval(xi));
    if (kind_ == SymbolKind::dirac) return dirac_matrix(xi, p_.angle);
    const double cut = cutoffs::psi(std::abs(xi[1]));
    if (cut == 0.0) return Mat2{};
    const double s[2] = {xi[0], p_.eps * xi[1]};
    return cplx{cut, 0.0} * dirac_matrix(s, p_.angle);
}

// ---------------------------------------------------------------------------
// Reductions

std::vector<double> AxisReduction::apply(std::span<const double> xi) const {
    const std::size_t d = xi.size();
    std::vector<double> out(d, 0.0);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) out[r] += rotation[r * d + c] * xi[c];
    return out;
}

AxisReduction rotate_to_axis(std::span<const double> v) {
    const std::size_t d = v.size();
    if (d < 2) throw ContractViolation("rotate_to_axis: dimension must be >= 2");
    const double s = std::sqrt(sum_sq(v, d));
    if (!(s > 0.0)) throw ContractViolation("rotate_to_axis: v must be nonzero");
    AxisReduction out;
    out.scale = s;
    out.rotation.assign(d * d, 0.0);
    std::vector<double> w(v.begin(), v.end());
    for (double& c : w) c /= s;
    w[d - 1] -= 1.0;
    const double ww = sum_sq(w, d);
    if (ww == 0.0) {
        for (std::size_t a = 0; a < d; ++a) out.rotation[a * d + a] = 1.0;
        return out;
    }
    // Householder reflection onto e_d, then flip axis 0 to restore det = +1.
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) {
            const double h = (r == c ? 1.0 : 0.0) - 2.0 * w[r] * w[c] / ww;
            out.rotation[r * d + c] = r == 0 ? -h : h;
        }
    return out;
}

double quadratic_form(std::span<const double> xi, int l) {
    double q = 0.0;
    for (std::size_t a = 0; a < xi.size(); ++a) q += (static_cast<int>(a) < l ? -1.0 : 1.0) * xi[a] * xi[a];
    return q;
}

double q_tilde(std::array<double, 2> x) { return -x[0] * x[0] + x[1] * x[1]; }

std::array<double, 2> boost(double theta, std::array<double, 2> x) {
    const double ch = std::cosh(theta), sh = std::sinh(theta);
    return {ch * x[0] + sh * x[1], sh * x[0] + ch * x[1]};
}

BoostResult lorentz_boost_normalize(std::span<const double> v, int l) {
    const auto d = static_cast<int>(v.size());
    if (d < 2 || l < 1 || l > d - 1) throw ContractViolation("lorentz_boost_normalize: need 1 <= l <= d-1");
    const double q = quadratic_form(v, l);
    if (!(q > 0.0)) throw ContractViolation("lorentz_boost_normalize: requires Q(v) > 0");
    // Block rotations concentrate each signature block on xi_l and xi_{l+1};
    // a single-coordinate block keeps its sign.
    double minus = 0.0, plus = 0.0;
    for (int a = 0; a < l; ++a) minus += v[a] * v[a];
    for (int a = l; a < d; ++a) plus += v[a] * v[a];
    const double sl = v[l - 1] < 0.0 ? -1.0 : 1.0;
    const double sp = v[l] < 0.0 ? -1.0 : 1.0;
    BoostResult out;
    out.scale = std::sqrt(q);
    out.vbar = {sl * std::sqrt(minus) / out.scale, sp * std::sqrt(plus) / out.scale};
    out.theta = std::atanh(out.vbar[0] / out.vbar[1]);
    out.sign = out.vbar[1] < 0.0 ? -1 : 1;
    return out;
}

HeatReduction heat_reduce(std::span<const double> v, double gamma) {
    const double s = sum_sq(v, v.size()) + gamma;
    HeatReduction out;
    out.sigma = s < 0.0 ? 1 : (s == 0.0 ? 0 : -1);
    out.scale = std::sqrt(std::abs(s));
    return out;
}

double parabolic_norm(std::span<const double> xi, double tau) {
    const double r2 = sum_sq(xi, xi.size());
    return std::sqrt(r2 * r2 + tau * tau);
}

}  // namespace carlab
