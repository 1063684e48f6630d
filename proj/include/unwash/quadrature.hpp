#pragma once

#include <cmath>
#include <functional>

namespace unwash {

// Adaptive Simpson integration of f over [a, b].
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-10,
                 int max_depth = 60);

}  // namespace unwash
