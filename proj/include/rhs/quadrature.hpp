#pragma once

// Adaptive 1-D Gauss-Kronrod quadrature (G7/K15 pair) with globally driven
// panel refinement, plus a nested helper for rectangle domains. All integrands
// in this project are smooth, so the plain |K15 - G7| panel error estimate is
// a conservative bound and the refinement loop is deterministic: same
// integrand, same limits, same options, same result, bit for bit.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rhs {

struct QuadOptions {
    double rel_tol = 1e-6;
    double abs_tol = 0.0;    // used when the integral is genuinely ~0
    int max_panels = 4000;   // refinement budget (total panels kept)
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;      // estimated absolute error
    int panels = 1;
};

// Thrown when the refinement budget runs out before the tolerance is met.
// Carries the best estimate so callers can decide whether it is usable.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, QuadResult best)
        : std::runtime_error(what), best_(best) {}
    const QuadResult& best() const { return best_; }

private:
    QuadResult best_;
};

namespace detail {

// Kronrod-15 abscissae (positive half) and weights; the embedded Gauss-7 rule
// uses the odd-indexed abscissae. Constants as tabulated in QUADPACK's qk15.
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    double value;   // K15 estimate
    double error;   // |K15 - G7|
};

template <class F>
Panel eval_panel(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kronrod = kWgk[7] * fc;
    double gauss = kWg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kXgk[i];
        const double fsum = f(c - dx) + f(c + dx);
        kronrod += kWgk[i] * fsum;
        if (i % 2 == 1) gauss += kWg[i / 2] * fsum;
    }
    kronrod *= h;
    gauss *= h;
    double err = std::abs(kronrod - gauss);
    // Guard against a spuriously zero error estimate on exact cases.
    err = std::max(err, std::abs(kronrod) * 1e-16);
    return Panel{a, b, kronrod, err};
}

} // namespace detail

// Integrate f over [a, b]. Refines the worst panel until the summed error
// estimate meets max(abs_tol, rel_tol * |value|) or the panel budget is spent.
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadOptions& opt = {}) {
    if (!(b > a)) {
        if (a == b) return QuadResult{0.0, 0.0, 0};
        throw std::invalid_argument("integrate: inverted interval");
    }
    std::vector<detail::Panel> panels;
    panels.reserve(64);
    panels.push_back(detail::eval_panel(f, a, b));

    auto totals = [&panels] {
        double v = 0.0, e = 0.0;
        for (const auto& p : panels) {
            v += p.value;
            e += p.error;
        }
        return std::pair<double, double>{v, e};
    };

    for (;;) {
        auto [value, error] = totals();
        const double goal = std::max(opt.abs_tol, opt.rel_tol * std::abs(value));
        if (error <= goal) {
            return QuadResult{value, error, static_cast<int>(panels.size())};
        }
        if (static_cast<int>(panels.size()) >= opt.max_panels) {
            throw QuadratureError(
                "quadrature budget exhausted (" + std::to_string(panels.size()) +
                    " panels, error estimate " + std::to_string(error) + ")",
                QuadResult{value, error, static_cast<int>(panels.size())});
        }
        std::size_t worst = 0;
        for (std::size_t i = 1; i < panels.size(); ++i) {
            if (panels[i].error > panels[worst].error) worst = i;
        }
        const detail::Panel split = panels[worst];
        const double mid = 0.5 * (split.a + split.b);
        if (!(split.a < mid && mid < split.b)) {
            // Interval no longer splittable in double precision; accept it.
            auto [v, e] = totals();
            return QuadResult{v, e, static_cast<int>(panels.size())};
        }
        panels[worst] = detail::eval_panel(f, split.a, mid);
        panels.push_back(detail::eval_panel(f, mid, split.b));
    }
}

// Nested 2-D integral over [ax,bx] x [ay,by]. The inner sweep runs one decade
// tighter so its error stays small against the outer estimate; the reported
// error is the outer rule's estimate and is therefore approximate, which is
// adequate for the smooth kernels used here.
template <class F>
QuadResult integrate2(F&& f, double ax, double bx, double ay, double by,
                      const QuadOptions& opt = {}) {
    QuadOptions inner = opt;
    inner.rel_tol = opt.rel_tol * 0.1;
    inner.abs_tol = opt.abs_tol * 0.1;
    auto outer = [&](double x) {
        return integrate([&](double y) { return f(x, y); }, ay, by, inner).value;
    };
    return integrate(outer, ax, bx, opt);
}

} // namespace rhs
