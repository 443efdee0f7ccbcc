#include "graphon/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "graphon/entropy.hpp"
#include "graphon/errors.hpp"

namespace graphon {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::pair<int, int>> resolved_scope(const Constraint& c, int n) {
    if (!c.scope.empty()) return c.scope;
    std::vector<std::pair<int, int>> all;
    all.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) all.emplace_back(i, j);
    return all;
}

void validate(const FiniteMeasure& nu, const ConstraintSet& cs) {
    require_input(nu.kind() == MeasureKind::probability, "minimizer: nu must be a probability");
    require_input((nu.weights().array() > 0.0).all(), "minimizer: nu must have full support");
    require_input(cs.n >= 1, "minimizer: grid size must be positive");
    require_input(cs.tolerance >= 0.0, "minimizer: tolerance must be nonnegative");
    for (const auto& c : cs.items) {
        require_input(c.f.size() == nu.size(), "minimizer: functional size does not match nu");
        require_input(c.f.allFinite(), "minimizer: functional must be finite");
        require_input(std::isfinite(c.threshold), "minimizer: threshold must be finite");
        std::set<std::pair<int, int>> seen(c.scope.begin(), c.scope.end());
        require_input(seen.size() == c.scope.size(), "minimizer: scope repeats a cell");
        for (auto [i, j] : c.scope) {
            require_input(i >= 0 && i < cs.n && j >= 0 && j < cs.n,
                          "minimizer: scope cell out of range");
            require_input(seen.count({j, i}) == 1, "minimizer: scope must be symmetric");
        }
    }
}

// Scoped mean of <f, cell> over the constraint's cells.
double scoped_mean(const StepGraphon& w, const Constraint& c,
                   const std::vector<std::pair<int, int>>& scope) {
    double acc = 0.0;
    for (auto [i, j] : scope) acc += c.f.dot(w.cell(i, j).transpose());
    return acc / static_cast<double>(scope.size());
}

// Single global constraint: closed-form exponential tilt. Works in the
// flipped frame g = s f so the constraint always reads mean >= target.
MinimizerResult solve_single_global(const FiniteMeasure& nu, const ConstraintSet& cs) {
    const Constraint& c = cs.items[0];
    const double s = c.dir == Direction::ge ? 1.0 : -1.0;
    const Eigen::VectorXd g = s * c.f;
    const double target = s * c.threshold;
    const double base = g.dot(nu.weights());

    MinimizerResult r{StepGraphon::constant(nu, cs.n), 0.0, Eigen::VectorXd::Zero(1),
                      0.0,                             true, 0,
                      "closed-form"};
    if (base >= target) {
        r.kkt_residual = kkt_check(r, nu, cs);
        return r;
    }

    const double gmax = g.maxCoeff();
    if (target > gmax)
        fail_runtime("minimizer: infeasible constraint, threshold beyond the range of f");
    if (target == gmax) {
        // Only measures carried by the argmax of g reach the threshold; the
        // entropy-minimal one is nu conditioned on that set.
        Eigen::VectorXd w = (g.array() == gmax).select(nu.weights(), 0.0);
        const double carried = w.sum();
        w /= carried;
        FiniteMeasure cond(nu.space(), w);
        r.graphon = StepGraphon::constant(cond, cs.n);
        r.value = -std::log(carried);
        r.dual[0] = s * kInf;
        r.kkt_residual = kkt_check(r, nu, cs);
        return r;
    }

    auto mean_at = [&](double theta) { return g.dot(tilt(nu, g, theta).weights()); };
    double lo = 0.0, hi = 1.0;
    while (mean_at(hi) < target) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e18) fail_runtime("minimizer: tilt bracket expansion failed");
    }
    double theta = hi;
    int used = 0;
    for (int it = 0; it < 200; ++it) {
        ++used;
        const double mid = 0.5 * (lo + hi);
        const double m = mean_at(mid);
        theta = mid;
        if (std::abs(m - target) <= 1e-12) break;
        (m < target ? lo : hi) = mid;
    }
    FiniteMeasure opt = tilt(nu, g, theta);
    if (std::abs(g.dot(opt.weights()) - target) > 1e-12)
        fail_runtime("minimizer: tilt bisection did not reach the threshold");

    r.graphon = StepGraphon::constant(opt, cs.n);
    r.value = kl_divergence(opt, nu);
    r.dual[0] = s * theta;
    r.iterations = used;
    r.kkt_residual = kkt_check(r, nu, cs);
    return r;
}

// Entropic mirror descent on every cell simplex with dual ascent on the
// multipliers; deterministic, returns the best feasible iterate.
MinimizerResult solve_descent(const FiniteMeasure& nu, const ConstraintSet& cs) {
    const int n = cs.n;
    const Eigen::Index rows = static_cast<Eigen::Index>(n) * n;
    const Eigen::Index s = nu.size();
    const int m = static_cast<int>(cs.items.size());

    std::vector<std::vector<std::pair<int, int>>> scopes;
    std::vector<double> sign(static_cast<std::size_t>(m));
    for (int cix = 0; cix < m; ++cix) {
        scopes.push_back(resolved_scope(cs.items[static_cast<std::size_t>(cix)], n));
        sign[static_cast<std::size_t>(cix)] =
            cs.items[static_cast<std::size_t>(cix)].dir == Direction::ge ? 1.0 : -1.0;
    }
    // Per-cell membership lists keep the gradient assembly linear.
    std::vector<std::vector<int>> members(static_cast<std::size_t>(rows));
    for (int cix = 0; cix < m; ++cix)
        for (auto [i, j] : scopes[static_cast<std::size_t>(cix)])
            members[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
                    static_cast<std::size_t>(j)]
                .push_back(cix);

    Eigen::MatrixXd x = nu.weights().transpose().replicate(rows, 1);
    Eigen::VectorXd mult = Eigen::VectorXd::Zero(m);  // internal multipliers, >= 0
    const Eigen::VectorXd log_nu = nu.weights().array().log();

    Eigen::MatrixXd best;
    double best_value = kInf;
    const int iters = 10000;

    Eigen::VectorXd h(m), tilt_dir(s);
    for (int k = 1; k <= iters; ++k) {
        // Constraint slacks h_c = s_c (mean_c - t_c) at the current iterate.
        for (int cix = 0; cix < m; ++cix) {
            const auto& sc = scopes[static_cast<std::size_t>(cix)];
            const Constraint& c = cs.items[static_cast<std::size_t>(cix)];
            double acc = 0.0;
            for (auto [i, j] : sc) acc += c.f.dot(x.row(static_cast<Eigen::Index>(i) * n + j));
            h[cix] = sign[static_cast<std::size_t>(cix)] *
                     (acc / static_cast<double>(sc.size()) - c.threshold);
        }
        if ((h.array() >= -cs.tolerance).all()) {
            const double value = detail::entropy_objective(x, nu);
            if (value < best_value) {
                best_value = value;
                best = x;
            }
        }

        const double step = 1.0 / std::sqrt(static_cast<double>(k));
        // Entropic primal step toward the dual-tilted cells.
        for (Eigen::Index r = 0; r < rows; ++r) {
            tilt_dir.setZero();
            for (int cix : members[static_cast<std::size_t>(r)]) {
                const auto& sc = scopes[static_cast<std::size_t>(cix)];
                tilt_dir += (mult[cix] * sign[static_cast<std::size_t>(cix)] *
                             static_cast<double>(rows) / static_cast<double>(sc.size())) *
                            cs.items[static_cast<std::size_t>(cix)].f;
            }
            Eigen::ArrayXd grad =
                x.row(r).transpose().array().log() - log_nu.array() - tilt_dir.array();
            Eigen::ArrayXd next =
                x.row(r).transpose().array() * (-step * grad).min(50.0).max(-50.0).exp();
            x.row(r) = (next / next.sum()).matrix().transpose();
        }
        // Dual ascent on the multipliers: grow on violation, decay on slack.
        for (int cix = 0; cix < m; ++cix)
            mult[cix] = std::max(0.0, mult[cix] - step * h[cix]);
    }

    if (!(best_value < kInf))
        fail_runtime("minimizer: no feasible iterate found, constraints look infeasible");

    // Exact symmetry regardless of accumulation order.
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) {
            const Eigen::Index a = static_cast<Eigen::Index>(i) * n + j;
            const Eigen::Index b = static_cast<Eigen::Index>(j) * n + i;
            const Eigen::RowVectorXd avg = 0.5 * (best.row(a) + best.row(b));
            best.row(a) = avg;
            best.row(b) = avg;
        }

    MinimizerResult r{StepGraphon(nu.space(), n, best), best_value, Eigen::VectorXd(m),
                      0.0,                               true,       iters,
                      "mirror-descent"};
    for (int cix = 0; cix < m; ++cix)
        r.dual[cix] = mult[cix] * sign[static_cast<std::size_t>(cix)] *
                      static_cast<double>(rows) /
                      static_cast<double>(scopes[static_cast<std::size_t>(cix)].size());
    r.value = graphon_entropy(r.graphon, nu);
    r.kkt_residual = kkt_check(r, nu, cs);
    return r;
}

}  // namespace

MinimizerResult minimize_rate(const FiniteMeasure& nu, const ConstraintSet& constraints) {
    validate(nu, constraints);
    if (constraints.items.empty()) {
        MinimizerResult r{StepGraphon::constant(nu, constraints.n),
                          0.0,
                          Eigen::VectorXd(0),
                          0.0,
                          true,
                          0,
                          "closed-form"};
        r.kkt_residual = kkt_check(r, nu, constraints);
        return r;
    }
    if (constraints.items.size() == 1 && constraints.items[0].scope.empty())
        return solve_single_global(nu, constraints);
    return solve_descent(nu, constraints);
}

double kkt_check(const MinimizerResult& result, const FiniteMeasure& nu,
                 const ConstraintSet& constraints) {
    const StepGraphon& w = result.graphon;
    const int n = w.n();
    const int m = static_cast<int>(constraints.items.size());
    require_input(result.dual.size() == m, "kkt: one multiplier per constraint required");
    require_input(w.space()->same_as(*nu.space()), "kkt: weight space mismatch");

    double resid = 0.0;
    std::vector<std::vector<std::pair<int, int>>> scopes;
    for (int cix = 0; cix < m; ++cix) {
        const Constraint& c = constraints.items[static_cast<std::size_t>(cix)];
        scopes.push_back(resolved_scope(c, n));
        const double s = c.dir == Direction::ge ? 1.0 : -1.0;
        const double theta = result.dual[cix];
        const double slack = s * (scoped_mean(w, c, scopes.back()) - c.threshold);
        resid = std::max(resid, std::max(0.0, -slack));       // primal feasibility
        resid = std::max(resid, std::max(0.0, -s * theta));   // dual sign
        if (std::isfinite(theta)) resid = std::max(resid, std::abs(theta * slack));
        else resid = std::max(resid, std::abs(slack));        // boundary tilt: must be active
    }

    // Stationarity: log(W_z / nu_z) - sum_c theta_c (f_c(z) - t_c) constant
    // per cell over the supported points. Subtracting t_c changes nothing
    // for finite duals (the normalizer absorbs constants) and gives the
    // boundary convention inf * 0 = 0 on active extremes.
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double lo = kInf, hi = -kInf;
            for (Eigen::Index z = 0; z < nu.size(); ++z) {
                const double wz = w.cell(i, j)[z];
                if (wz <= 0.0) continue;
                double r = std::log(wz / nu.weight(z));
                for (int cix = 0; cix < m; ++cix) {
                    const Constraint& c = constraints.items[static_cast<std::size_t>(cix)];
                    const auto& sc = scopes[static_cast<std::size_t>(cix)];
                    if (!c.scope.empty() &&
                        std::find(sc.begin(), sc.end(), std::make_pair(i, j)) == sc.end())
                        continue;
                    const double theta = result.dual[cix];
                    const double fz = c.f[z] - c.threshold;
                    if (std::isfinite(theta)) r -= theta * fz;
                    else if (std::abs(fz) > 1e-12) r -= theta * fz;  // off-extreme point: blows up
                }
                lo = std::min(lo, r);
                hi = std::max(hi, r);
            }
            if (lo <= hi) resid = std::max(resid, 0.5 * (hi - lo));
        }
    return resid;
}

namespace detail {

double entropy_objective(const Eigen::MatrixXd& cells, const FiniteMeasure& nu) {
    require_input(cells.cols() == nu.size(), "objective: column count must match nu");
    double acc = 0.0;
    for (Eigen::Index r = 0; r < cells.rows(); ++r)
        for (Eigen::Index z = 0; z < cells.cols(); ++z) {
            const double x = cells(r, z);
            if (x == 0.0) continue;
            if (x < 0.0 || nu.weight(z) == 0.0) return kInf;
            acc += x * std::log(x / nu.weight(z));
        }
    return acc / static_cast<double>(cells.rows());
}

Eigen::MatrixXd entropy_gradient(const Eigen::MatrixXd& cells, const FiniteMeasure& nu) {
    require_input(cells.cols() == nu.size(), "gradient: column count must match nu");
    Eigen::MatrixXd g(cells.rows(), cells.cols());
    const double scale = 1.0 / static_cast<double>(cells.rows());
    for (Eigen::Index r = 0; r < cells.rows(); ++r)
        for (Eigen::Index z = 0; z < cells.cols(); ++z)
            g(r, z) = scale * (std::log(cells(r, z) / nu.weight(z)) + 1.0);
    return g;
}

}  // namespace detail

}  // namespace graphon
