#include "mctr/centerline.hpp"

#include <cmath>
#include <stdexcept>

#include "mctr/banded.hpp"

namespace mctr {

namespace {

// Dense symmetric solve by Gaussian elimination with partial pivoting.
// Only used for the tiny (order+1) Savitzky-Golay normal equations.
std::vector<double> solve_small(std::vector<std::vector<double>> a, std::vector<double> b) {
    const size_t n = b.size();
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        for (size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        if (a[col][col] == 0.0) throw std::runtime_error("singular SG system");
        for (size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (size_t i = n; i-- > 0;) {
        double s = b[i];
        for (size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
        x[i] = s / a[i][i];
    }
    return x;
}

// Row of smoothing weights that evaluates the window's least-squares
// polynomial of degree `order` at position t_eval (indices 0..window-1).
std::vector<double> sg_row(int window, int order, int t_eval) {
    const int m = order + 1;
    std::vector<std::vector<double>> ata(static_cast<size_t>(m),
                                         std::vector<double>(static_cast<size_t>(m), 0.0));
    for (int t = 0; t < window; ++t) {
        double pi = 1.0;
        std::vector<double> pow(static_cast<size_t>(m));
        for (int k = 0; k < m; ++k) {
            pow[static_cast<size_t>(k)] = pi;
            pi *= t;
        }
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < m; ++c)
                ata[static_cast<size_t>(r)][static_cast<size_t>(c)] +=
                    pow[static_cast<size_t>(r)] * pow[static_cast<size_t>(c)];
    }
    std::vector<double> row(static_cast<size_t>(window), 0.0);
    // coefficients of (A^T A)^{-1} e_k applied per basis term
    for (int k = 0; k < m; ++k) {
        std::vector<double> ek(static_cast<size_t>(m), 0.0);
        ek[static_cast<size_t>(k)] = 1.0;
        const std::vector<double> col = solve_small(ata, ek);
        double te = 1.0;
        for (int j = 0; j < k; ++j) te *= t_eval;
        for (int t = 0; t < window; ++t) {
            double dotv = 0.0;
            double tp = 1.0;
            for (int r = 0; r < m; ++r) {
                dotv += col[static_cast<size_t>(r)] * tp;
                tp *= t;
            }
            row[static_cast<size_t>(t)] += te * dotv;
        }
    }
    return row;
}

}  // namespace

std::vector<Vec2> order_points(const RawCenterpoints& raw, const Pose& vehicle_pose,
                               double chain_break) {
    std::vector<Vec2> out;
    if (raw.points.empty()) return out;

    const Vec2 pos = vehicle_pose.position();
    const Vec2 fwd = vehicle_pose.forward();
    std::vector<bool> used(raw.points.size(), false);

    int current = -1;
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < raw.points.size(); ++i) {
        if (dot(raw.points[i] - pos, fwd) <= 0.0) continue;
        const double d = distance(raw.points[i], pos);
        if (d < best) {
            best = d;
            current = static_cast<int>(i);
        }
    }
    if (current < 0) return out;

    used[static_cast<size_t>(current)] = true;
    out.push_back(raw.points[static_cast<size_t>(current)]);
    for (;;) {
        int next = -1;
        double nd = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < raw.points.size(); ++i) {
            if (used[i]) continue;
            const double d = distance(raw.points[i], out.back());
            if (d < nd) {
                nd = d;
                next = static_cast<int>(i);
            }
        }
        if (next < 0 || nd > chain_break) break;
        used[static_cast<size_t>(next)] = true;
        out.push_back(raw.points[static_cast<size_t>(next)]);
    }
    return out;
}

std::vector<Vec2> ccma_smooth(const std::vector<Vec2>& path, const SmoothingWeights& w) {
    const size_t n = path.size();
    if (n < 5) return path;
    if (w.lambda_vel < 0.0 || w.mu_curv < 0.0)
        throw std::invalid_argument("ccma_smooth: weights must be nonnegative");
    if (w.lambda_vel == 0.0 && w.mu_curv == 0.0) return path;

    // A = I + lambda D2^T D2 + mu D4^T D4, bandwidth 4 from the 5-point stencil
    BandedSpd a(n, 4);
    for (size_t i = 0; i < n; ++i) a.at(i, i) = 1.0;

    static const double d2[3] = {1.0, -2.0, 1.0};
    static const double d4[5] = {1.0, -4.0, 6.0, -4.0, 1.0};
    for (size_t r = 1; r + 1 < n; ++r) {  // second-difference rows
        for (int u = 0; u < 3; ++u)
            for (int v = u; v < 3; ++v)
                a.at(r - 1 + static_cast<size_t>(u), r - 1 + static_cast<size_t>(v)) +=
                    w.lambda_vel * d2[u] * d2[v];
    }
    for (size_t r = 2; r + 2 < n; ++r) {  // fourth-difference rows
        for (int u = 0; u < 5; ++u)
            for (int v = u; v < 5; ++v)
                a.at(r - 2 + static_cast<size_t>(u), r - 2 + static_cast<size_t>(v)) +=
                    w.mu_curv * d4[u] * d4[v];
    }

    std::vector<double> bx(n), by(n);
    for (size_t i = 0; i < n; ++i) {
        bx[i] = path[i].x;
        by[i] = path[i].y;
    }
    const std::vector<double> qx = a.solve(std::move(bx));
    const std::vector<double> qy = a.solve(std::move(by));
    std::vector<Vec2> out(n);
    for (size_t i = 0; i < n; ++i) out[i] = {qx[i], qy[i]};
    return out;
}

double ccma_energy(const std::vector<Vec2>& q, const std::vector<Vec2>& p,
                   const SmoothingWeights& w) {
    const size_t n = p.size();
    double e = 0.0;
    for (size_t i = 0; i < n; ++i) e += (q[i] - p[i]).squared_norm();
    for (size_t i = 1; i + 1 < n; ++i)
        e += w.lambda_vel * (q[i + 1] - q[i] * 2.0 + q[i - 1]).squared_norm();
    for (size_t i = 2; i + 2 < n; ++i)
        e += w.mu_curv *
             (q[i + 2] - q[i + 1] * 4.0 + q[i] * 6.0 - q[i - 1] * 4.0 + q[i - 2]).squared_norm();
    return e;
}

std::vector<Vec2> sg_smooth(const std::vector<Vec2>& path, const SmoothingWeights& w) {
    const int n = static_cast<int>(path.size());
    const int window = w.sg_window;
    const int order = w.sg_order;
    if (window < 5 || window % 2 == 0 || order >= window)
        throw std::invalid_argument("sg_smooth: invalid window/order");
    if (n < window) return path;

    const int half = window / 2;
    std::vector<Vec2> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        int start = std::clamp(i - half, 0, n - window);
        const std::vector<double> row = sg_row(window, order, i - start);
        Vec2 s{};
        for (int t = 0; t < window; ++t) s += path[static_cast<size_t>(start + t)] * row[static_cast<size_t>(t)];
        out[static_cast<size_t>(i)] = s;
    }
    return out;
}

CenterlinePath finalize(const std::vector<Vec2>& path) {
    std::vector<Vec2> pts;
    for (const Vec2& p : path) {
        if (pts.empty() || distance(pts.back(), p) > 1e-12) pts.push_back(p);
    }
    if (pts.size() < 2) throw std::invalid_argument("finalize: fewer than 2 distinct points");

    CenterlinePath out;
    out.points = std::move(pts);
    const size_t n = out.points.size();
    out.arc_length.resize(n);
    out.curvature.resize(n);
    out.arc_length[0] = 0.0;
    for (size_t i = 1; i < n; ++i)
        out.arc_length[i] = out.arc_length[i - 1] + distance(out.points[i - 1], out.points[i]);
    for (size_t i = 1; i + 1 < n; ++i)
        out.curvature[i] = menger_curvature(out.points[i - 1], out.points[i], out.points[i + 1]);
    out.curvature[0] = n > 2 ? out.curvature[1] : 0.0;
    out.curvature[n - 1] = n > 2 ? out.curvature[n - 2] : 0.0;
    return out;
}

std::optional<CenterlinePath> build_centerline(const RawCenterpoints& raw, const Pose& pose,
                                               const ExtractionParams& params,
                                               const SmoothingWeights& weights,
                                               bool enable_ccma) {
    // the chain break only has to cut loose outliers; sparse but legitimate
    // gaps are bridged by the faraway interpolation below
    const double chain_break =
        std::max(2.0 * params.faraway_threshold, 0.5 * params.max_forward);
    std::vector<Vec2> ordered = order_points(raw, pose, chain_break);
    if (ordered.size() < 2) return std::nullopt;
    ordered = interpolate_faraway(ordered, params.faraway_threshold);
    if (enable_ccma) ordered = ccma_smooth(ordered, weights);
    ordered = sg_smooth(ordered, weights);
    try {
        return finalize(ordered);
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

}  // namespace mctr
