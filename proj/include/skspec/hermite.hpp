#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace skspec {

/// Hermite polynomial H_l(x; sigma) with variance parameter, from the
/// generating function e^{tx - sigma t^2/2}: three-term recurrence
/// H_{l+1} = x H_l - l sigma H_{l-1}, H_0 = 1, H_1 = x.
inline double hermite(int l, double x, double sigma) {
    if (l < 0) throw std::invalid_argument("hermite: degree must be >= 0");
    if (l == 0) return 1.0;
    double prev = 1.0, cur = x;
    for (int m = 1; m < l; ++m) {
        const double next = x * cur - double(m) * sigma * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

/// All degrees 0..l at once (the Wick evaluation wants the whole ladder).
inline void hermite_ladder(int l, double x, double sigma, std::vector<double>& out) {
    out.resize(std::size_t(l) + 1);
    out[0] = 1.0;
    if (l == 0) return;
    out[1] = x;
    for (int m = 1; m < l; ++m) out[m + 1] = x * out[m] - double(m) * sigma * out[m - 1];
}

inline double binomial(int n, int k) {
    double v = 1.0;
    for (int i = 1; i <= k; ++i) v = v * double(n - k + i) / double(i);
    return v;
}

/// Residual of the shift identity
///   H_k(x+y; sigma) = sum_{l=0}^{k} C(k,l) x^{k-l} H_l(y; sigma),
/// which should vanish up to rounding (|residual| <= 1e-10 (1+|x|+|y|)^k).
inline double hermite_shift_residual(int k, double x, double y, double sigma) {
    double rhs = 0.0;
    for (int l = 0; l <= k; ++l)
        rhs += binomial(k, l) * std::pow(x, k - l) * hermite(l, y, sigma);
    return hermite(k, x + y, sigma) - rhs;
}

}  // namespace skspec
