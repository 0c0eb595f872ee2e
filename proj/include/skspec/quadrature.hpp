#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace skspec {

/// Adaptive Gauss-Legendre integration: 15-point rule per panel, bisecting
/// until the 7-vs-15 point estimates agree within the absolute tolerance
/// share assigned to the panel. Depth cap 40.
class AdaptiveGL {
public:
    struct Result {
        double value;
        int evaluations;
    };

    template <class F>
    static Result integrate(F&& f, double a, double b, double abs_tol = 1e-12) {
        Result r{0.0, 0};
        if (a == b) return r;
        r.value = recurse(f, a, b, abs_tol, 0, r.evaluations);
        return r;
    }

private:
    // nodes/weights on [-1,1]
    static constexpr int kN15 = 15;
    static const double* nodes15() {
        static const double x[kN15] = {
            -0.9879925180204854, -0.9372733924007060, -0.8482065834104272,
            -0.7244177313601701, -0.5709721726085388, -0.3941513470775634,
            -0.2011940939974345, 0.0,                  0.2011940939974345,
            0.3941513470775634,  0.5709721726085388,  0.7244177313601701,
            0.8482065834104272,  0.9372733924007060,  0.9879925180204854};
        return x;
    }
    static const double* weights15() {
        static const double w[kN15] = {
            0.0307532419961173, 0.0703660474881081, 0.1071592204671719,
            0.1395706779261543, 0.1662692058169939, 0.1861610000155622,
            0.1984314853271116, 0.2025782419255613, 0.1984314853271116,
            0.1861610000155622, 0.1662692058169939, 0.1395706779261543,
            0.1071592204671719, 0.0703660474881081, 0.0307532419961173};
        return w;
    }
    static constexpr int kN7 = 7;
    static const double* nodes7() {
        static const double x[kN7] = {-0.9491079123427585, -0.7415311855993945,
                                      -0.4058451513773972, 0.0,
                                      0.4058451513773972,  0.7415311855993945,
                                      0.9491079123427585};
        return x;
    }
    static const double* weights7() {
        static const double w[kN7] = {0.1294849661688697, 0.2797053914892766,
                                      0.3818300505051189, 0.4179591836734694,
                                      0.3818300505051189, 0.2797053914892766,
                                      0.1294849661688697};
        return w;
    }

    template <class F>
    static double panel(F&& f, double a, double b, const double* xs, const double* ws, int n,
                        int& evals) {
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += ws[i] * f(mid + half * xs[i]);
        evals += n;
        return acc * half;
    }

    template <class F>
    static double recurse(F&& f, double a, double b, double tol, int depth, int& evals) {
        const double coarse = panel(f, a, b, nodes7(), weights7(), kN7, evals);
        const double fine = panel(f, a, b, nodes15(), weights15(), kN15, evals);
        if (std::abs(fine - coarse) <= tol || depth >= 40) {
            if (depth >= 40 && std::abs(fine - coarse) > 1e3 * tol)
                throw std::runtime_error("quadrature: no convergence at max depth");
            return fine;
        }
        const double mid = 0.5 * (a + b);
        return recurse(f, a, mid, tol * 0.5, depth + 1, evals) +
               recurse(f, mid, b, tol * 0.5, depth + 1, evals);
    }
};

template <class F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-12) {
    return AdaptiveGL::integrate(std::forward<F>(f), a, b, abs_tol).value;
}

}  // namespace skspec
