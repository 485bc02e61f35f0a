// Shared 1D numerics: Gauss-Legendre panel rules, adaptive Simpson
// integration, golden-section minimization, and bisection.
#pragma once

#include <functional>
#include <vector>

namespace scramble::numerics {

struct GaussLegendre {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Cached rule of order n (any n >= 2; nodes by Newton iteration).
const GaussLegendre& gauss_legendre(int n);

// int_a^b f, single panel of order n.
double gl_panel(const std::function<double(double)>& f, double a, double b, int n);

// int_a^b f over `panels` equal panels of order n.
double gl_composite(const std::function<double(double)>& f, double a, double b, int panels, int n);

// Adaptive Simpson with Richardson correction; absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double abs_tol,
                        int max_depth = 52);

// Golden-section minimum of a unimodal f on [a, b] to x-tolerance xtol;
// returns the abscissa.
double golden_section_min(const std::function<double(double)>& f, double a, double b, double xtol);

// Root of f on [a, b] (f(a), f(b) of opposite sign) by bisection.
double bisect(const std::function<double(double)>& f, double a, double b, double xtol);

}  // namespace scramble::numerics
