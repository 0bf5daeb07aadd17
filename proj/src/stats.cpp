#include "scicert/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "scicert/util.hpp"

namespace scicert {

namespace {

// Continued-fraction evaluation of the regularized incomplete beta function.
double betacf(double a, double b, double x) {
    const int kMaxIter = 300;
    const double kEps = 3e-16, kFpMin = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

double betai(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double lbeta = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    double bt = std::exp(lbeta + a * std::log(x) + b * std::log(1.0 - x));
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    k = std::min(k, n - k);
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return std::round(r);
}

}  // namespace

double student_t_two_sided_p(double t, double df) {
    if (df <= 0) return 1.0;
    if (!std::isfinite(t)) return 0.0;
    return betai(df / 2.0, 0.5, df / (df + t * t));
}

double normal_two_sided_p(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

std::vector<double> midranks(const std::vector<double>& x) {
    std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
        double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.empty()) throw PipelineError("pearson: bad series lengths");
    double n = static_cast<double>(x.size());
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw PipelineError("pearson: zero variance");
    return sxy / std::sqrt(sxx * syy);
}

CorrResult spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw PipelineError("spearman: length mismatch");
    if (x.size() < 3) throw PipelineError("spearman: need n >= 3");
    CorrResult res;
    res.n = x.size();
    auto rx = midranks(x), ry = midranks(y);
    auto constant = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [&](double a) { return a == v[0]; });
    };
    if (constant(rx) || constant(ry)) {
        res.defined = false;
        warn("spearman undefined: zero variance in ranks");
        return res;
    }
    res.coefficient = pearson(rx, ry);
    double r = std::clamp(res.coefficient, -1.0, 1.0);
    if (std::fabs(r) == 1.0) {
        res.p_value = 0.0;
    } else {
        double df = static_cast<double>(res.n) - 2.0;
        double t = r * std::sqrt(df / (1.0 - r * r));
        res.p_value = student_t_two_sided_p(t, df);
    }
    return res;
}

namespace {

// Least-squares residuals of v regressed on [1 | controls]; throws on a
// rank-deficient design naming the collinear column.
std::vector<double> ols_residuals(const std::vector<double>& v,
                                  const std::vector<std::vector<double>>& controls,
                                  const std::vector<std::string>& names) {
    std::size_t n = v.size(), k = controls.size();
    std::size_t p = k + 1;
    // Normal equations A beta = b with A = Z'Z.
    std::vector<std::vector<double>> a(p, std::vector<double>(p, 0.0));
    std::vector<double> b(p, 0.0);
    auto col = [&](std::size_t j, std::size_t i) -> double {
        return j == 0 ? 1.0 : controls[j - 1][i];
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t r = 0; r < p; ++r) {
            b[r] += col(r, i) * v[i];
            for (std::size_t c = 0; c < p; ++c) a[r][c] += col(r, i) * col(c, i);
        }
    }
    // Gaussian elimination with partial pivoting.
    std::vector<std::size_t> colmap(p);
    std::iota(colmap.begin(), colmap.end(), std::size_t{0});
    double scale = 0.0;
    for (const auto& row : a)
        for (double x : row) scale = std::max(scale, std::fabs(x));
    const double tol = 1e-10 * std::max(scale, 1.0);
    for (std::size_t c = 0; c < p; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < p; ++r)
            if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
        std::swap(a[c], a[piv]);
        std::swap(b[c], b[piv]);
        if (std::fabs(a[c][c]) < tol) {
            std::string name = c == 0 ? "intercept"
                               : (c - 1 < names.size() ? names[c - 1]
                                                       : "control " + std::to_string(c));
            throw PipelineError("partial correlation: rank-deficient controls (collinear column: " +
                                name + ")");
        }
        for (std::size_t r = c + 1; r < p; ++r) {
            double f = a[r][c] / a[c][c];
            for (std::size_t cc = c; cc < p; ++cc) a[r][cc] -= f * a[c][cc];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> beta(p, 0.0);
    for (std::size_t c = p; c-- > 0;) {
        double s = b[c];
        for (std::size_t cc = c + 1; cc < p; ++cc) s -= a[c][cc] * beta[cc];
        beta[c] = s / a[c][c];
    }
    std::vector<double> resid(n);
    for (std::size_t i = 0; i < n; ++i) {
        double fit = 0.0;
        for (std::size_t j = 0; j < p; ++j) fit += col(j, i) * beta[j];
        resid[i] = v[i] - fit;
    }
    return resid;
}

}  // namespace

CorrResult partial_pearson(const std::vector<double>& x, const std::vector<double>& y,
                           const std::vector<std::vector<double>>& controls,
                           const std::vector<std::string>& control_names) {
    if (x.size() != y.size()) throw PipelineError("partial_pearson: length mismatch");
    for (const auto& c : controls)
        if (c.size() != x.size()) throw PipelineError("partial_pearson: control length mismatch");
    std::size_t n = x.size(), k = controls.size();
    if (n <= k + 2) throw PipelineError("partial_pearson: need n > #controls + 2");

    CorrResult res;
    res.n = n;
    for (std::size_t i = 0; i < k; ++i)
        res.controlled_for.push_back(i < control_names.size() ? control_names[i]
                                                              : "control " + std::to_string(i + 1));
    auto ex = ols_residuals(x, controls, control_names);
    auto ey = ols_residuals(y, controls, control_names);
    res.coefficient = pearson(ex, ey);
    double r = std::clamp(res.coefficient, -1.0, 1.0);
    double df = static_cast<double>(n) - 2.0 - static_cast<double>(k);
    if (std::fabs(r) == 1.0) {
        res.p_value = 0.0;
    } else {
        double t = r * std::sqrt(df / (1.0 - r * r));
        res.p_value = student_t_two_sided_p(t, df);
    }
    return res;
}

MannWhitneyResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b,
                                 std::size_t exact_threshold) {
    if (a.empty() || b.empty()) throw PipelineError("mann_whitney_u: empty sample");
    std::size_t na = a.size(), nb = b.size(), n = na + nb;
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    auto ranks = midranks(pooled);
    double ra = 0.0;
    for (std::size_t i = 0; i < na; ++i) ra += ranks[i];
    MannWhitneyResult res;
    res.u = ra - static_cast<double>(na) * (static_cast<double>(na) + 1.0) / 2.0;

    if (na * nb <= exact_threshold) {
        // Exact permutation distribution of 2U (integers), DP over tied
        // blocks: choosing j group-a members in a block of size m adds
        // 2*j*(b's before) + j*(m-j) to 2U.
        std::vector<double> sorted(pooled);
        std::sort(sorted.begin(), sorted.end());
        std::vector<std::size_t> blocks;
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
            blocks.push_back(j - i + 1);
            i = j + 1;
        }
        std::size_t umax = 2 * na * nb;
        // dp[a_used][u2] = number of labelings; counts fit exactly in double
        // for n <= ~50.
        std::vector<std::vector<double>> dp(na + 1, std::vector<double>(umax + 1, 0.0));
        dp[0][0] = 1.0;
        std::size_t processed = 0;
        for (std::size_t m : blocks) {
            std::vector<std::vector<double>> next(na + 1, std::vector<double>(umax + 1, 0.0));
            for (std::size_t used = 0; used <= std::min(na, processed); ++used) {
                std::size_t b_before = processed - used;
                for (std::size_t u2 = 0; u2 <= umax; ++u2) {
                    double ways = dp[used][u2];
                    if (ways == 0.0) continue;
                    for (std::size_t j = 0; j <= m && used + j <= na; ++j) {
                        std::size_t add = 2 * j * b_before + j * (m - j);
                        if (u2 + add > umax) continue;
                        next[used + j][u2 + add] +=
                            ways * binom(static_cast<int>(m), static_cast<int>(j));
                    }
                }
            }
            dp.swap(next);
            processed += m;
        }
        const std::vector<double>& dist = dp[na];
        double total = 0.0;
        for (double w : dist) total += w;
        long u2_obs = std::lround(2.0 * res.u);
        long center = static_cast<long>(na * nb);
        long extremity = std::labs(u2_obs - center);
        double tail = 0.0;
        for (std::size_t u2 = 0; u2 <= umax; ++u2) {
            if (std::labs(static_cast<long>(u2) - center) >= extremity) tail += dist[u2];
        }
        res.p_value = tail / total;
        res.exact = true;
    } else {
        double mu = static_cast<double>(na) * static_cast<double>(nb) / 2.0;
        // Tie correction over the pooled sample.
        double tie_sum = 0.0;
        std::vector<double> sorted(pooled);
        std::sort(sorted.begin(), sorted.end());
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
            double t = static_cast<double>(j - i + 1);
            tie_sum += t * t * t - t;
            i = j + 1;
        }
        double nn = static_cast<double>(n);
        double var = static_cast<double>(na) * static_cast<double>(nb) / 12.0 *
                     ((nn + 1.0) - tie_sum / (nn * (nn - 1.0)));
        if (var <= 0.0) {
            res.p_value = 1.0;  // all values tied
        } else {
            double z = (res.u - mu) / std::sqrt(var);
            res.p_value = normal_two_sided_p(z);
        }
    }
    return res;
}

void mask_significance(std::vector<CorrResult>& series, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw PipelineError("alpha must lie in (0,1)");
    for (auto& r : series) r.masked = r.p_value > alpha;  // p == alpha stays significant
}

}  // namespace scicert
