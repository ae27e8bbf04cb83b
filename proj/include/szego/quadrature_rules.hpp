#pragma once

#include <vector>

namespace szego {

struct Rule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1]; exact for polynomials of degree 2n-1.
Rule1D gauss_legendre(int n);

/// Composite Gauss-Legendre on [lo, hi] with `panels` equal panels of `order` points.
Rule1D composite_gauss_legendre(double lo, double hi, int panels, int order);

/// P-point trapezoid rule for a periodic function on [lo, hi): nodes lo + (j + 1/2) h.
Rule1D periodic_trapezoid(double lo, double hi, int points);

/// Generalized Gauss-Laguerre rule for the weight x^a e^{-x} on (0, inf), a > -1,
/// built with the Golub-Welsch eigenvalue method.
Rule1D gauss_laguerre(int n, double a);

}  // namespace szego
