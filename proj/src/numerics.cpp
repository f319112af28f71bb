#include "hjlab/numerics.hpp"

#include "hjlab/params.hpp"

#include <algorithm>
#include <cmath>

namespace hjlab {

namespace {

double simpson(double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                            double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
    if (depth > 60)
        throw numerical_error("adaptive quadrature failed to converge (depth limit)");
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(fa, flm, fm, m - a);
    const double right = simpson(fm, frm, fb, b - m);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = simpson(fa, fm, fb, b - a);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 0);
}

double find_root(const std::function<double(double)>& f, double a, double b,
                 double tol) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0))
        throw numerical_error("find_root: endpoints do not bracket a sign change");
    for (int it = 0; it < 200 && b - a > tol; ++it) {
        // secant candidate, clipped into the middle 90% of the bracket
        double m = (a * fb - b * fa) / (fb - fa);
        const double lo = a + 0.05 * (b - a), hi = b - 0.05 * (b - a);
        if (!(m > lo && m < hi)) m = 0.5 * (a + b);
        const double fmv = f(m);
        if (fmv == 0.0) return m;
        if ((fmv > 0.0) == (fa > 0.0)) {
            a = m; fa = fmv;
        } else {
            b = m; fb = fmv;
        }
    }
    return 0.5 * (a + b);
}

double golden_max(const std::function<double(double)>& f, double a, double b,
                  int max_iter) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0); // 0.618...
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < max_iter; ++it) {
        if (f1 < f2) {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + phi * (b - a); f2 = f(x2);
        } else {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - phi * (b - a); f1 = f(x1);
        }
    }
    return f1 > f2 ? x1 : x2;
}

double lerp_uniform(double x0, double dx, const std::vector<double>& v, double x) {
    const int n = static_cast<int>(v.size());
    const double s = (x - x0) / dx;
    if (s <= 0.0) return v.front();
    if (s >= n - 1) return v.back();
    const int i = static_cast<int>(s);
    const double w = s - i;
    return v[i] + w * (v[i + 1] - v[i]);
}

double lerp_sorted(const std::vector<double>& x, const std::vector<double>& v,
                   double xq) {
    if (xq <= x.front()) return v.front();
    if (xq >= x.back()) return v.back();
    const auto it = std::upper_bound(x.begin(), x.end(), xq);
    const size_t i = static_cast<size_t>(it - x.begin()) - 1;
    const double w = (xq - x[i]) / (x[i + 1] - x[i]);
    return v[i] + w * (v[i + 1] - v[i]);
}

Fit2 fit_const_plus_basis(const std::vector<double>& basis,
                          const std::vector<double>& data) {
    const size_t n = data.size();
    double sb = 0, sbb = 0, sd = 0, sbd = 0;
    for (size_t i = 0; i < n; ++i) {
        sb += basis[i];
        sbb += basis[i] * basis[i];
        sd += data[i];
        sbd += basis[i] * data[i];
    }
    const double det = n * sbb - sb * sb;
    Fit2 fit{};
    if (std::abs(det) < 1e-300) {
        // basis is (numerically) constant: fall back to the mean
        fit.c0 = sd / n;
        fit.c1 = 0.0;
    } else {
        fit.c0 = (sd * sbb - sb * sbd) / det;
        fit.c1 = (n * sbd - sb * sd) / det;
    }
    double ss = 0;
    for (size_t i = 0; i < n; ++i) {
        const double e = fit.c0 + fit.c1 * basis[i] - data[i];
        ss += e * e;
    }
    fit.rms = std::sqrt(ss / n);
    return fit;
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double beta_function(double a, double b) {
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

} // namespace hjlab
