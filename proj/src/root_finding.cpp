#include "cslr/root_finding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "cslr/error.hpp"

namespace cslr {

namespace {

bool opposite_or_zero(double a, double b) {
    return a == 0.0 || b == 0.0 || (a < 0.0) != (b < 0.0);
}

}  // namespace

GridBracket bracket_on_grid(const ScalarFunction& score, double lo, double hi, int grid_points) {
    if (!(lo < hi)) throw Error(ErrorCode::InvalidArgument, "search interval needs lo < hi");
    if (grid_points < 2) throw Error(ErrorCode::InvalidArgument, "need at least two grid points");

    GridBracket res;
    const int m = grid_points;
    std::vector<double> grid(m);
    std::vector<double> values(m);
    for (int i = 0; i < m; ++i) {
        grid[i] = i == m - 1 ? hi : lo + (hi - lo) * i / (m - 1);
        values[i] = score(grid[i]);
        ++res.evaluations;
    }

    // Cells whose endpoint values have opposite signs or touch zero. Adjacent
    // cells sharing a zero endpoint describe one crossing.
    std::vector<int> cells;
    for (int i = 0; i + 1 < m; ++i) {
        if (!opposite_or_zero(values[i], values[i + 1])) continue;
        const bool continues = !cells.empty() && cells.back() == i - 1 && values[i] == 0.0;
        if (!continues) ++res.crossings;
        cells.push_back(i);
    }
    if (cells.empty())
        throw Error(ErrorCode::NoCrossing, "score has constant sign on the search grid");

    const double centre = 0.5 * (lo + hi);
    auto distance = [&](int c) { return std::abs(0.5 * (grid[c] + grid[c + 1]) - centre); };
    int best = cells.front();
    for (int c : cells)
        if (distance(c) < distance(best)) best = c;

    res.lo = grid[best];
    res.hi = grid[best + 1];
    res.f_lo = values[best];
    res.f_hi = values[best + 1];
    return res;
}

CrossingResult find_zero_crossing(const ScalarFunction& score, double lo, double hi, int grid_points,
                                  double refine_tol) {
    if (!(refine_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "refine_tol must be positive");
    const auto cell = bracket_on_grid(score, lo, hi, grid_points);

    CrossingResult res;
    res.method = "zero-crossing";
    res.evaluations = cell.evaluations;
    res.crossings = cell.crossings;

    double a = cell.lo;
    double b = cell.hi;
    double fa = cell.f_lo;
    double fb = cell.f_hi;
    if (fa == 0.0 && fb == 0.0) {
        res.lo = a;
        res.hi = b;
        res.beta_hat = 0.5 * (a + b);
        return res;
    }
    if (fa == 0.0) {
        b = a;
    } else if (fb == 0.0) {
        a = b;
    }
    while (b - a > refine_tol) {
        const double mid = 0.5 * (a + b);
        const double fm = score(mid);
        ++res.evaluations;
        if (fm == 0.0) {
            a = b = mid;
            break;
        }
        if (opposite_or_zero(fa, fm)) {
            b = mid;
            fb = fm;
        } else {
            a = mid;
            fa = fm;
        }
    }
    res.lo = a;
    res.hi = b;
    res.beta_hat = 0.5 * (a + b);
    return res;
}

// Classic zeroin: inverse quadratic interpolation / secant steps guarded by
// bisection.
CrossingResult find_root_brent(const ScalarFunction& score, double lo, double hi, double tol) {
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
    CrossingResult res;
    res.method = "brent";
    res.crossings = 1;
    double a = lo;
    double b = hi;
    double fa = score(a);
    double fb = score(b);
    res.evaluations = 2;
    if (!opposite_or_zero(fa, fb))
        throw Error(ErrorCode::BracketInvalid, "score has the same sign at both bracket ends");
    if (fa == 0.0) {
        res.lo = res.hi = res.beta_hat = a;
        return res;
    }
    if (fb == 0.0) {
        res.lo = res.hi = res.beta_hat = b;
        return res;
    }

    double c = a;
    double fc = fa;
    double d = b - a;
    double e = d;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (int iter = 0; iter < 200; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol1 = 2.0 * eps * std::abs(b) + 0.5 * tol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) break;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double p;
            double q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
            const double min2 = std::abs(e * q);
            if (2.0 * p < std::min(min1, min2)) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += std::abs(d) > tol1 ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = score(b);
        ++res.evaluations;
    }
    res.beta_hat = b;
    res.lo = fb == 0.0 ? b : std::min(b, c);
    res.hi = fb == 0.0 ? b : std::max(b, c);
    return res;
}

}  // namespace cslr
