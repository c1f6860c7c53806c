#pragma once

#include <cmath>
#include <stdexcept>

namespace uwbpc {

struct RootResult {
    double x = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Plain bisection on a bracketing interval [lo, hi] with g(lo)*g(hi) <= 0.
template <typename F>
RootResult bisect(F&& g, double lo, double hi, double tol_x, int max_iter = 200) {
    double glo = g(lo);
    double ghi = g(hi);
    if (glo == 0.0) return {lo, 0, true};
    if (ghi == 0.0) return {hi, 0, true};
    if (glo * ghi > 0.0)
        throw std::invalid_argument("bisect: root not bracketed");
    RootResult r;
    for (r.iterations = 0; r.iterations < max_iter; ++r.iterations) {
        double mid = 0.5 * (lo + hi);
        double gmid = g(mid);
        if (gmid == 0.0 || hi - lo < tol_x) {
            r.x = mid;
            r.converged = true;
            return r;
        }
        if (glo * gmid < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            glo = gmid;
        }
    }
    r.x = 0.5 * (lo + hi);
    r.converged = (hi - lo < tol_x * 16);
    return r;
}

/// Safeguarded Newton: takes Newton steps while they stay inside the current
/// bracket, otherwise falls back to bisection (rtsafe scheme). dg is the
/// derivative of g.
template <typename F, typename DF>
RootResult newton_bracketed(F&& g, DF&& dg, double lo, double hi, double tol_x,
                            int max_iter = 100) {
    double glo = g(lo);
    double ghi = g(hi);
    if (glo == 0.0) return {lo, 0, true};
    if (ghi == 0.0) return {hi, 0, true};
    if (glo * ghi > 0.0)
        throw std::invalid_argument("newton_bracketed: root not bracketed");
    if (glo > 0.0) std::swap(lo, hi);  // keep g(lo) < 0 < g(hi)

    double x = 0.5 * (lo + hi);
    double dxold = std::fabs(hi - lo);
    double dx = dxold;
    double gx = g(x);
    double dgx = dg(x);
    RootResult r;
    for (r.iterations = 0; r.iterations < max_iter; ++r.iterations) {
        bool newton_ok = std::fabs(2.0 * gx) <= std::fabs(dxold * dgx) &&
                         ((x - hi) * dgx - gx) * ((x - lo) * dgx - gx) < 0.0;
        dxold = dx;
        if (newton_ok) {
            dx = gx / dgx;
            x -= dx;
        } else {
            dx = 0.5 * (hi - lo);
            x = lo + dx;
        }
        if (std::fabs(dx) < tol_x) {
            r.x = x;
            r.converged = true;
            return r;
        }
        gx = g(x);
        dgx = dg(x);
        if (gx < 0.0)
            lo = x;
        else
            hi = x;
    }
    r.x = x;
    return r;
}

}  // namespace uwbpc
