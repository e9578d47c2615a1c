#pragma once

#include <functional>
#include <string>

namespace cslr {

using ScalarFunction = std::function<double(double)>;

// Outcome of a one-dimensional crossing or root search. The bracket always
// satisfies score(lo) * score(hi) <= 0 on return.
struct CrossingResult {
    double beta_hat = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    int evaluations = 0;
    int crossings = 0;  // distinct sign changes found on the grid
    std::string method;
};

// Grid scan shared by the crossing search and the bracketed Brent search.
struct GridBracket {
    double lo = 0.0;
    double hi = 0.0;
    double f_lo = 0.0;
    double f_hi = 0.0;
    int evaluations = 0;
    int crossings = 0;
};

// Evaluates `grid_points` equally spaced points of [lo, hi] and returns the
// sign-change cell whose midpoint is closest to the interval midpoint.
// Throws NoCrossing if there is none.
GridBracket bracket_on_grid(const ScalarFunction& score, double lo, double hi, int grid_points);

// Scans `grid_points` equally spaced points of [lo, hi] (endpoints included)
// for a sign change or an exact zero, then bisects the bracketing cell on
// the sign until its width is at most `refine_tol`. With several crossings,
// the one whose cell midpoint is closest to the interval midpoint wins.
// Throws NoCrossing when the score keeps one nonzero sign on the grid.
CrossingResult find_zero_crossing(const ScalarFunction& score, double lo, double hi,
                                  int grid_points = 100, double refine_tol = 1e-6);

// Brent's method on a bracket with score(lo) * score(hi) <= 0. Throws
// BracketInvalid otherwise.
CrossingResult find_root_brent(const ScalarFunction& score, double lo, double hi, double tol = 1e-6);

}  // namespace cslr
