#include "despeckle/function_class.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "despeckle/kernel_lpe.hpp"

namespace despeckle {

void HolderSpec::validate() const {
    if (!(beta > 0.0)) throw std::invalid_argument("HolderSpec: beta must be > 0");
    if (!(L > 0.0)) throw std::invalid_argument("HolderSpec: L must be > 0");
    if (!(h_floor > 0.0 && h_floor < 1.0))
        throw std::invalid_argument("HolderSpec: h_floor must be in (0, 1)");
}

double phi0(double x) {
    const double d = 4.0 * x * x - 1.0;
    if (d >= 0.0) return 0.0;
    return std::exp(4.0 / d);
}

namespace {

using Poly = std::vector<double>;  // coefficients, ascending powers

Poly poly_derivative(const Poly& p) {
    if (p.size() <= 1) return {0.0};
    Poly d(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * static_cast<double>(i);
    return d;
}

Poly poly_mul(const Poly& a, const Poly& b) {
    Poly c(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

void poly_axpy(Poly& acc, double s, const Poly& p) {
    if (acc.size() < p.size()) acc.resize(p.size(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) acc[i] += s * p[i];
}

double poly_eval(const Poly& p, double x) {
    double v = 0.0;
    for (std::size_t i = p.size(); i-- > 0;) v = v * x + p[i];
    return v;
}

// Numerator polynomial P_m of phi0^(m) = P_m / (4x^2-1)^(2m) * phi0.
Poly phi0_numerator(int m) {
    const Poly d = {-1.0, 0.0, 4.0};  // 4x^2 - 1
    const Poly d2 = poly_mul(d, d);
    Poly p = {1.0};
    for (int r = 0; r < m; ++r) {
        Poly next = poly_mul(poly_derivative(p), d2);
        poly_axpy(next, 1.0, poly_mul({0.0, -16.0 * r}, poly_mul(p, d)));
        poly_axpy(next, 1.0, poly_mul({0.0, -32.0}, p));
        p = std::move(next);
    }
    return p;
}

}  // namespace

double phi0_derivative(int m, double x) {
    if (m < 0) throw std::invalid_argument("phi0_derivative: m must be >= 0");
    const double d = 4.0 * x * x - 1.0;
    if (d >= 0.0) return 0.0;
    if (m == 0) return std::exp(4.0 / d);
    // P_m(x) * exp(4/d - 2m log(1-4x^2)); the log form keeps values finite
    // all the way to the support boundary, where the product underflows to 0.
    const Poly p = phi0_numerator(m);
    return poly_eval(p, x) * std::exp(4.0 / d - 2.0 * m * std::log1p(-4.0 * x * x));
}

double BasicFunction::peak() const { return scale() * phi0(0.0); }

BasicFunction build_basic_function(double beta, double L, double extra_shrink) {
    if (!(beta > 0.0) || !(L > 0.0))
        throw std::invalid_argument("build_basic_function: beta and L must be > 0");
    if (!(extra_shrink > 0.0) || extra_shrink > 1.0)
        throw std::invalid_argument("build_basic_function: extra_shrink must be in (0, 1]");
    BasicFunction bf;
    bf.beta = beta;
    bf.L = L;
    bf.k = degree_for_beta(beta);
    bf.extra_shrink = extra_shrink;

    const int m = bf.k + 1;
    const auto target = [m](double x) { return std::abs(phi0_derivative(m, x)); };

    constexpr int kGridPoints = 100000;
    const double step = 1.0 / (kGridPoints + 1);
    double best_x = 0.0;
    double best_v = target(0.0);
    for (int i = 1; i <= kGridPoints; ++i) {
        const double x = -0.5 + i * step;
        const double v = target(x);
        if (v > best_v) {
            best_v = v;
            best_x = x;
        }
    }
    // Golden-section refinement around the grid argmax.
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = best_x - step;
    double b = best_x + step;
    while (b - a > 1e-10) {
        const double c = b - gr * (b - a);
        const double d = a + gr * (b - a);
        if (target(c) > target(d))
            b = d;
        else
            a = c;
    }
    bf.phibar = std::max(best_v, target(0.5 * (a + b)));
    return bf;
}

FunctionHandle bump_function(int j, double delta, const BasicFunction& bf) {
    const int m = static_cast<int>(std::floor(1.0 / delta));
    if (j < 1 || j > m) throw std::out_of_range("bump_function: j outside 1..floor(1/delta)");
    const double bj = (2.0 * j - 1.0) * delta / 2.0;
    const double amp = std::pow(delta, bf.beta);
    FunctionHandle f;
    f.eval = [bf, delta, bj, amp](double x) { return amp * bf((x - bj) / delta); };
    f.spec = HolderSpec{bf.beta, 0.5 * bf.L, 0.0};
    f.label = "bump[" + std::to_string(j) + "]";
    return f;
}

FunctionHandle hypothesis_function(const std::vector<std::uint8_t>& codeword, double delta,
                                   const BasicFunction& bf, double h_floor) {
    const int m = static_cast<int>(std::floor(1.0 / delta));
    if (static_cast<int>(codeword.size()) != m)
        throw std::invalid_argument("hypothesis_function: codeword length must be floor(1/delta)");
    const double amp = std::pow(delta, bf.beta);
    if (h_floor > 0.0 && amp * bf.peak() > 1.0 - h_floor) {
        std::cerr << "warning: hypothesis_function: delta^beta phi* = " << amp * bf.peak()
                  << " exceeds 1 - h_floor; range claim needs larger n\n";
    }
    FunctionHandle f;
    // Bumps have disjoint supports, so at most codeword[floor(x/delta)] is live.
    f.eval = [bf, delta, amp, codeword, m](double x) {
        const int j = static_cast<int>(std::floor(x / delta));
        if (j < 0 || j >= m || !codeword[static_cast<std::size_t>(j)]) return 1.0;
        const double bj = (2.0 * j + 1.0) * delta / 2.0;
        return 1.0 - amp * bf((x - bj) / delta);
    };
    f.spec = HolderSpec{bf.beta, bf.L, h_floor};
    f.label = "hypothesis";
    return f;
}

std::vector<FunctionHandle> sup_norm_hypotheses(double delta, const BasicFunction& bf,
                                                double h_floor) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("sup_norm_hypotheses: delta must be in (0, 1)");
    const int m = static_cast<int>(std::floor(1.0 / delta));
    std::vector<FunctionHandle> out;
    out.reserve(m + 1);
    FunctionHandle nu0;
    nu0.eval = [](double) { return 1.0; };
    nu0.spec = HolderSpec{bf.beta, bf.L, h_floor};
    nu0.label = "nu0";
    out.push_back(std::move(nu0));
    for (int j = 1; j <= m; ++j) {
        std::vector<std::uint8_t> e(m, 0);
        e[j - 1] = 1;
        FunctionHandle nu = hypothesis_function(e, delta, bf, h_floor);
        nu.label = "nu" + std::to_string(j);
        out.push_back(std::move(nu));
    }
    return out;
}

HolderReport check_holder_membership(const FunctionHandle& f, int grid_size) {
    if (grid_size < 100) throw std::invalid_argument("check_holder_membership: grid too small");
    const int k = degree_for_beta(f.spec.beta);
    const double step = 1.0 / grid_size;

    std::vector<double> vals(grid_size + 1);
    for (int i = 0; i <= grid_size; ++i) vals[i] = f(i * step);

    HolderReport report;
    report.range_ok = true;
    for (double v : vals) {
        if (v < f.spec.h_floor - 1e-12 || v > 1.0 + 1e-12) {
            report.range_ok = false;
            break;
        }
    }

    // f^(k) by k passes of the central difference, shrinking one point per side.
    std::vector<double> deriv = vals;
    for (int pass = 0; pass < k; ++pass) {
        std::vector<double> next(deriv.size() - 2);
        for (std::size_t i = 1; i + 1 < deriv.size(); ++i)
            next[i - 1] = (deriv[i + 1] - deriv[i - 1]) / (2.0 * step);
        deriv = std::move(next);
    }

    const double holder_exp = f.spec.beta - k;
    const int npts = static_cast<int>(deriv.size());
    std::vector<double> lag_pow(npts);
    for (int d = 1; d < npts; ++d) lag_pow[d] = std::pow(d * step, holder_exp);

    double max_ratio = 0.0;
    for (int i = 0; i < npts; ++i) {
        for (int j = i + 1; j < npts; ++j) {
            const double r = std::abs(deriv[i] - deriv[j]) / lag_pow[j - i];
            if (r > max_ratio) max_ratio = r;
        }
    }
    report.max_ratio = max_ratio;
    report.holder_ok = max_ratio <= f.spec.L * (1.0 + report.tolerance);
    return report;
}

double phi_moment(const BasicFunction& bf, int r) {
    if (r < 1) throw std::invalid_argument("phi_moment: r must be >= 1");
    constexpr int kPanels = 1 << 16;
    const double dx = 1.0 / kPanels;
    double acc = 0.0;
    for (int i = 0; i < kPanels; ++i) {
        const double x = -0.5 + (i + 0.5) * dx;
        acc += std::pow(bf(x), r);
    }
    return acc * dx;
}

double phi_l2_norm(const BasicFunction& bf) { return std::sqrt(phi_moment(bf, 2)); }

}  // namespace despeckle
