#pragma once
// Deterministic Nelder-Mead simplex minimizer. All the optimizations in this
// library are low-dimensional (2-12 angles) and smooth, so the classic
// reflect/expand/contract/shrink scheme with a simplex-diameter stop is enough.

#include <algorithm>
#include <cmath>
#include <vector>

namespace entloc {

struct NelderMeadResult {
    std::vector<double> x;
    double              value = 0.0;
    int                 evals = 0;
};

template<typename F>
NelderMeadResult nelder_mead(F&& f, const std::vector<double>& x0, double step, double diam_tol, int max_evals) {
    const int n = static_cast<int>(x0.size());
    struct Vertex {
        std::vector<double> x;
        double              v;
    };
    int  evals = 0;
    auto eval  = [&](const std::vector<double>& x) {
        ++evals;
        return f(x.data());
    };

    std::vector<Vertex> s;
    s.reserve(n + 1);
    s.push_back({x0, eval(x0)});
    for(int i = 0; i < n; ++i) {
        std::vector<double> x = x0;
        x[i] += step;
        s.push_back({x, eval(x)});
    }

    const auto by_value = [](const Vertex& a, const Vertex& b) { return a.v < b.v; };
    while(evals < max_evals) {
        std::stable_sort(s.begin(), s.end(), by_value);

        double diam = 0.0;
        for(int i = 1; i <= n; ++i)
            for(int d = 0; d < n; ++d) diam = std::max(diam, std::abs(s[i].x[d] - s[0].x[d]));
        if(diam < diam_tol) break;

        std::vector<double> centroid(n, 0.0); // of all but the worst vertex
        for(int i = 0; i < n; ++i)
            for(int d = 0; d < n; ++d) centroid[d] += s[i].x[d] / n;

        auto blend = [&](double coef) {
            std::vector<double> x(n);
            for(int d = 0; d < n; ++d) x[d] = centroid[d] + coef * (s[n].x[d] - centroid[d]);
            return x;
        };

        std::vector<double> xr = blend(-1.0);
        const double        vr = eval(xr);
        if(vr < s[0].v) {
            std::vector<double> xe = blend(-2.0);
            const double        ve = eval(xe);
            s[n] = (ve < vr) ? Vertex{std::move(xe), ve} : Vertex{std::move(xr), vr};
        } else if(vr < s[n - 1].v) {
            s[n] = Vertex{std::move(xr), vr};
        } else {
            const bool          outside = vr < s[n].v;
            std::vector<double> xc      = blend(outside ? -0.5 : 0.5);
            const double        vc      = eval(xc);
            if(vc < (outside ? vr : s[n].v)) {
                s[n] = Vertex{std::move(xc), vc};
            } else { // shrink toward the best vertex
                for(int i = 1; i <= n; ++i) {
                    for(int d = 0; d < n; ++d) s[i].x[d] = s[0].x[d] + 0.5 * (s[i].x[d] - s[0].x[d]);
                    s[i].v = eval(s[i].x);
                }
            }
        }
    }

    std::stable_sort(s.begin(), s.end(), by_value);
    return NelderMeadResult{s[0].x, s[0].v, evals};
}

}
