#include "bconvex/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "bconvex/gridops.hpp"
#include "bconvex/rng.hpp"

namespace bconvex {

namespace {

// Uniform b*-convexity gate for the cost: sampled momenta from a shrunk
// product lattice so the finite-difference stencils stay inside the range.
double bstar_convexity_gate(const ProblemSpec& spec) {
    const int n = spec.dim();
    const int per_axis = 3;
    const Box& X = spec.benefit.x_domain();
    const Box& Y = spec.benefit.y_domain();
    std::vector<Eigen::VectorXd> xs, ps;
    const std::int64_t total = static_cast<std::int64_t>(std::pow(per_axis, n));
    for (std::int64_t fx = 0; fx < total; ++fx) {
        Eigen::VectorXd x(n);
        std::int64_t rem = fx;
        for (int d = 0; d < n; ++d) {
            const int i = static_cast<int>(rem % per_axis);
            rem /= per_axis;
            x[d] = X.lower[d] + (X.upper[d] - X.lower[d]) * (0.5 + i) / per_axis;
        }
        x = X.project(x);
        for (std::int64_t fy = 0; fy < total; ++fy) {
            Eigen::VectorXd y(n);
            std::int64_t remy = fy;
            for (int d = 0; d < n; ++d) {
                const int i = static_cast<int>(remy % per_axis);
                remy /= per_axis;
                y[d] = Y.lower[d] + (Y.upper[d] - Y.lower[d]) * (0.5 + i) / per_axis;
            }
            y = Y.center() + 0.8 * (Y.project(y) - Y.center());
            xs.push_back(x);
            ps.push_back(spec.benefit.grad_x(x, y));
        }
    }
    return check_uniform_bstar_convexity(spec.benefit, spec.cost_c, xs, ps);
}

struct PieceState {
    double step = 0.0;
    int inactive_streak = 0;
};

// One block-coordinate pass on piece `index`: fd gradient on (y, a), then a
// backtracking line search. Inactive pieces see an exactly zero gradient (no
// quadrature node reacts within the fd step), so they get an activation probe
// along +a instead. Returns true when L decreased.
bool descend_piece(const ProblemSpec& spec, MenuEvaluator& E, int index, PieceState& state,
                   double& L_cur) {
    const int n = spec.dim();
    const Box& Y = spec.benefit.y_domain();
    const double diam = Y.diameter();
    const double h = spec.opts.fd_param_step_rel * diam;
    const Eigen::VectorXd y = E.pieces()[static_cast<std::size_t>(index)].y;
    const double a = E.pieces()[static_cast<std::size_t>(index)].a;

    Eigen::VectorXd grad(n + 1);
    for (int d = 0; d < n; ++d) {
        Eigen::VectorXd yp = y, ym = y;
        yp[d] += h;
        ym[d] -= h;
        grad[d] = (E.trial_L(index, yp, a) - E.trial_L(index, ym, a)) / (2.0 * h);
    }
    grad[n] = (E.trial_L(index, y, a + h) - E.trial_L(index, y, a - h)) / (2.0 * h);

    const double gnorm = grad.norm();
    const double min_step = 1e-12 * diam;
    const double max_step = 0.25 * diam;

    if (gnorm == 0.0) {
        // flat spot: probe along +a with backtracking
        double alpha = state.step;
        for (int ls = 0; ls < 25 && alpha > min_step; ++ls, alpha *= 0.5) {
            const double trial = E.trial_L(index, y, a + alpha);
            if (trial < L_cur) {
                E.apply_move(index, y, a + alpha);
                L_cur = trial;
                state.step = std::min(alpha * 1.3, max_step);
                return true;
            }
        }
        state.step = std::max(state.step * 0.5, min_step);
        return false;
    }

    const Eigen::VectorXd dir = grad / gnorm;
    double alpha = state.step;
    for (int ls = 0; ls < 25 && alpha > min_step; ++ls, alpha *= 0.5) {
        Eigen::VectorXd y_new = y - alpha * dir.head(n);
        y_new = Y.project(y_new);
        const double a_new = a - alpha * dir[n];
        const double trial = E.trial_L(index, y_new, a_new);
        if (trial < L_cur) {
            E.apply_move(index, y_new, a_new);
            L_cur = trial;
            state.step = std::min((ls == 0 ? alpha * 1.3 : alpha), max_step);
            return true;
        }
    }
    state.step = std::max(state.step * 0.5, min_step);
    return false;
}

double worst_gradient(const ProblemSpec& spec, const MenuEvaluator& E, double L_cur) {
    (void)L_cur;
    const int n = spec.dim();
    const double h = spec.opts.fd_param_step_rel * spec.benefit.y_domain().diameter();
    double worst = 0.0;
    for (int i = 1; i < E.piece_count(); ++i) {
        const Eigen::VectorXd y = E.pieces()[static_cast<std::size_t>(i)].y;
        const double a = E.pieces()[static_cast<std::size_t>(i)].a;
        for (int d = 0; d < n; ++d) {
            Eigen::VectorXd yp = y, ym = y;
            yp[d] += h;
            ym[d] -= h;
            worst = std::max(worst,
                             std::abs(E.trial_L(i, yp, a) - E.trial_L(i, ym, a)) / (2.0 * h));
        }
        worst = std::max(worst,
                         std::abs(E.trial_L(i, y, a + h) - E.trial_L(i, y, a - h)) / (2.0 * h));
    }
    return worst;
}

Eigen::VectorXd random_product(const Box& Y, Rng& rng) {
    const int n = Y.dim();
    for (int tries = 0; tries < 256; ++tries) {
        Eigen::VectorXd y(n);
        for (int d = 0; d < n; ++d) y[d] = rng.uniform(Y.lower[d], Y.upper[d]);
        if (Y.contains(y)) return y;
    }
    return Y.center();
}

} // namespace

Solution solve_single(const ProblemSpec& spec, std::uint64_t seed) {
    if (!(spec.lambda > 0.0)) throw AdmissibilityError("lambda must be positive");
    const double gate = bstar_convexity_gate(spec);
    if (!(gate > 0.0))
        throw AdmissibilityError(
            "cost is not uniformly b*-convex: sampled min p-Hessian eigenvalue " +
            std::to_string(gate));

    const Box& Y = spec.benefit.y_domain();
    const int n = spec.dim();

    // Initial menu: the null piece plus menu_size low-discrepancy products,
    // each with the touching intercept, so the initial utility is exactly the
    // null utility and all structure emerges by descent.
    BConvexFunction menu = spec.null_utility();
    {
        MenuEvaluator null_eval(spec, menu);
        std::uint64_t halton_index = 1 + seed * 131;
        while (menu.piece_count() < spec.menu_size + 1) {
            const Eigen::VectorXd unit = halton_point(halton_index++, n);
            Eigen::VectorXd y = Y.lower + unit.cwiseProduct(Y.extent());
            if (!Y.contains(y)) continue;
            BAffinePiece p;
            p.y = y;
            p.a = -null_eval.max_gain(y);
            menu.add_piece(std::move(p));
        }
    }

    MenuEvaluator E(spec, menu);
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);

    Solution sol{spec.null_utility(), {}, 0.0, 0.0, false, 0.0, seed, {}};
    double L_cur = E.current_L();
    sol.log.push_back({0, L_cur, E.piece_count()});

    std::vector<PieceState> state(static_cast<std::size_t>(E.piece_count()),
                                  PieceState{spec.opts.init_step_rel * Y.diameter(), 0});

    int flat_iters = 0;
    for (int iter = 1; iter <= spec.opts.max_outer_iters; ++iter) {
        const double L_prev = L_cur;
        for (int i = 1; i < E.piece_count(); ++i)
            descend_piece(spec, E, i, state[static_cast<std::size_t>(i)], L_cur);

        // prune pieces that stayed massless too long
        {
            const auto counts = E.winner_counts();
            for (int i = E.piece_count() - 1; i >= 1; --i) {
                auto& st = state[static_cast<std::size_t>(i)];
                if (counts[static_cast<std::size_t>(i)] == 0) {
                    if (++st.inactive_streak >= spec.opts.prune_after) {
                        E.remove_piece(i);
                        state.erase(state.begin() + i);
                    }
                } else {
                    st.inactive_streak = 0;
                }
            }
        }

        // refill: duplicate the largest-mass non-frozen piece with seeded jitter
        if (iter % spec.opts.split_period == 0 && E.piece_count() < spec.menu_size + 1) {
            const auto counts = E.winner_counts();
            int parent = -1;
            std::int64_t best_mass = 0;
            for (int i = 1; i < E.piece_count(); ++i) {
                if (counts[static_cast<std::size_t>(i)] > best_mass) {
                    best_mass = counts[static_cast<std::size_t>(i)];
                    parent = i;
                }
            }
            if (parent >= 1) {
                Eigen::VectorXd y = E.pieces()[static_cast<std::size_t>(parent)].y +
                                    0.05 * Y.extent().cwiseProduct(rng.normal_vector(n));
                y = Y.project(y);
                E.add_piece(y, -E.max_gain(y));
                state.push_back(PieceState{spec.opts.init_step_rel * Y.diameter(), 0});
            }
        }

        L_cur = E.current_L();
        sol.log.push_back({iter, L_cur, E.piece_count()});

        const double decrease = L_prev - L_cur;
        if (decrease <= spec.opts.rel_decrease_tol * std::max(1.0, std::abs(L_cur)))
            ++flat_iters;
        else
            flat_iters = 0;
        if (iter >= spec.opts.min_iters && flat_iters >= spec.opts.patience) break;
    }

    // drop massless pieces so every surviving piece carries quadrature mass
    {
        const auto counts = E.winner_counts();
        for (int i = E.piece_count() - 1; i >= 1; --i)
            if (counts[static_cast<std::size_t>(i)] == 0) E.remove_piece(i);
    }

    sol.max_grad = worst_gradient(spec, E, L_cur);
    sol.converged = sol.max_grad <= spec.opts.grad_tol;
    sol.u = E.menu();
    sol.L_value = evaluate_L(spec, sol.u);
    sol.profit = -sol.L_value;
    sol.assignment.resize(static_cast<std::size_t>(spec.x_grid.active_count()));
    for (std::int64_t j = 0; j < spec.x_grid.active_count(); ++j)
        sol.assignment[static_cast<std::size_t>(j)] = E.winner(j);
    return sol;
}

Solution solve(const ProblemSpec& spec) {
    const int starts = std::max(1, spec.opts.multi_start);
    Solution best = solve_single(spec, spec.seed);
    for (int k = 1; k < starts; ++k) {
        Solution cand = solve_single(spec, spec.seed + static_cast<std::uint64_t>(k));
        if (cand.L_value < best.L_value) best = std::move(cand);
    }
    return best;
}

double audit_margin(const ProblemSpec& spec, const BConvexFunction& u, const BAffinePiece& p) {
    MenuEvaluator E(spec, u);
    return E.trial_add_L(p.y, p.a) - E.current_L();
}

AuditResult perturbation_audit(const ProblemSpec& spec, const Solution& sol, int trials,
                               std::uint64_t seed) {
    MenuEvaluator E(spec, sol.u);
    const double base = E.current_L();
    Rng rng(seed);
    AuditResult result;
    result.trials = trials;
    result.h_max = spec.opts.audit_h_max;
    result.worst_margin = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        const Eigen::VectorXd y = random_product(spec.benefit.y_domain(), rng);
        const double height = result.h_max * (1.0 - rng.uniform()); // in (0, h_max]
        const double a = height - E.max_gain(y);
        const double margin = E.trial_add_L(y, a) - base;
        if (margin < result.worst_margin) {
            result.worst_margin = margin;
            result.worst_piece = BAffinePiece{y, a, false};
        }
    }
    if (trials == 0) result.worst_margin = 0.0;
    return result;
}

PriceMenu price_menu(const ProblemSpec& spec, const Solution& sol) {
    PriceMenu pm;
    const GridFunction ug = sample_to_grid(sol.u, spec.x_grid);
    pm.v = b_transform_v(spec.benefit, ug, spec.y_grid);
    Eigen::VectorXd row;
    spec.benefit.eval_row(spec.x_grid.nodes(), spec.y_null, row);
    pm.null_defect = (row - ug.values).maxCoeff() + spec.a_null;
    return pm;
}

} // namespace bconvex
