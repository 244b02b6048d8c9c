#include "cellmix/lp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "cellmix/error.hpp"

namespace cellmix::lp {

const char* to_string(Status s) {
    switch (s) {
        case Status::optimal: return "optimal";
        case Status::infeasible: return "infeasible";
        case Status::unbounded: return "unbounded";
    }
    return "?";
}

void validate(const Problem& p) {
    if (p.objective.size() != p.n)
        throw std::invalid_argument("lp: objective has " + std::to_string(p.objective.size()) + " entries, expected " +
                                    std::to_string(p.n));
    if (!p.lower_bounds.empty() && p.lower_bounds.size() != p.n)
        throw std::invalid_argument("lp: lower_bounds has " + std::to_string(p.lower_bounds.size()) +
                                    " entries, expected " + std::to_string(p.n));
    for (double v : p.objective)
        if (!std::isfinite(v)) throw std::invalid_argument("lp: non-finite objective coefficient");
    for (double v : p.lower_bounds)
        if (!std::isfinite(v)) throw std::invalid_argument("lp: non-finite lower bound");
    for (const auto& row : p.rows) {
        if (!std::isfinite(row.rhs)) throw std::invalid_argument("lp: non-finite rhs in row '" + row.tag + "'");
        for (const auto& [j, v] : row.coefficients) {
            if (j >= p.n)
                throw std::invalid_argument("lp: row '" + row.tag + "' refers to variable " + std::to_string(j) +
                                            " of " + std::to_string(p.n));
            if (!std::isfinite(v)) throw std::invalid_argument("lp: non-finite coefficient in row '" + row.tag + "'");
        }
    }
}

namespace {

std::vector<double> lower_of(const Problem& p) {
    return p.lower_bounds.empty() ? std::vector<double>(p.n, 0.0) : p.lower_bounds;
}

std::vector<double> dense(const Row& row, std::size_t n) {
    std::vector<double> out(n, 0.0);
    for (const auto& [j, v] : row.coefficients) out[j] += v;
    return out;
}

double row_activity(const Row& row, const std::vector<double>& x) {
    double s = 0;
    for (const auto& [j, v] : row.coefficients) s += v * x[j];
    return s;
}

double scaled(double tol, double magnitude) { return tol * std::max(1.0, std::abs(magnitude)); }

void fill_tight_rows(const Problem& p, Solution& sol, double tol) {
    for (const auto& row : p.rows) {
        if (row.rhs - row_activity(row, sol.x) <= scaled(tol, row.rhs)) sol.tight_rows.push_back(row.tag);
    }
}

// Dense simplex tableau over columns [structural | slack | artificial | rhs].
class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : m_(rows), cols_(cols), t_(rows * (cols + 1), 0.0), obj_(cols + 1, 0.0),
                                                  basis_(rows, 0), alive_(rows, 1) {}

    double& at(std::size_t r, std::size_t c) { return t_[r * (cols_ + 1) + c]; }
    double at(std::size_t r, std::size_t c) const { return t_[r * (cols_ + 1) + c]; }
    double& rhs(std::size_t r) { return at(r, cols_); }
    double rhs(std::size_t r) const { return at(r, cols_); }
    std::vector<double>& obj() { return obj_; }
    std::vector<std::size_t>& basis() { return basis_; }
    std::vector<char>& alive() { return alive_; }
    std::size_t rows() const { return m_; }
    std::size_t cols() const { return cols_; }

    void pivot(std::size_t r, std::size_t e) {
        const std::size_t w = cols_ + 1;
        double* pr = &t_[r * w];
        const double inv = 1.0 / pr[e];
        for (std::size_t c = 0; c < w; ++c) pr[c] *= inv;
        pr[e] = 1.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r || !alive_[i]) continue;
            double* pi = &t_[i * w];
            const double f = pi[e];
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < w; ++c) pi[c] -= f * pr[c];
            pi[e] = 0.0;
        }
        const double f = obj_[e];
        if (f != 0.0) {
            for (std::size_t c = 0; c < w; ++c) obj_[c] -= f * pr[c];
            obj_[e] = 0.0;
        }
        basis_[r] = e;
    }

    bool finite() const {
        for (double v : obj_)
            if (!std::isfinite(v)) return false;
        for (std::size_t r = 0; r < m_; ++r)
            if (!std::isfinite(rhs(r))) return false;
        return true;
    }

private:
    std::size_t m_;
    std::size_t cols_;
    std::vector<double> t_;
    std::vector<double> obj_;  // reduced costs; last entry holds -z
    std::vector<std::size_t> basis_;
    std::vector<char> alive_;
};

enum class PhaseOutcome { optimal, unbounded };

struct PhaseRunner {
    Tableau& tab;
    const Tolerances& tol;
    std::size_t eligible;       // columns [0, eligible) may enter
    std::size_t bland_after;    // iteration count that switches the entering rule
    std::size_t limit;
    std::size_t& iterations;

    PhaseOutcome run() {
        auto& d = tab.obj();
        while (true) {
            if (iterations >= limit)
                throw NumericalError("lp: numerically unstable (iteration limit reached without convergence)");
            const bool bland = iterations >= bland_after;
            std::size_t enter = eligible;
            double best = tol.optimality;
            for (std::size_t j = 0; j < eligible; ++j) {
                if (d[j] > best) {
                    enter = j;
                    if (bland) break;
                    best = d[j];
                }
            }
            if (enter == eligible) return PhaseOutcome::optimal;

            std::size_t leave = tab.rows();
            double best_ratio = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < tab.rows(); ++r) {
                if (!tab.alive()[r]) continue;
                const double a = tab.at(r, enter);
                if (a <= tol.pivot) continue;
                const double ratio = std::max(tab.rhs(r), 0.0) / a;
                if (leave == tab.rows()) {
                    leave = r;
                    best_ratio = ratio;
                    continue;
                }
                const double tie = 1e-12 * std::max(1.0, best_ratio);
                if (ratio < best_ratio - tie) {
                    leave = r;
                    best_ratio = ratio;
                } else if (ratio <= best_ratio + tie && tab.basis()[r] < tab.basis()[leave]) {
                    leave = r;
                    best_ratio = std::min(best_ratio, ratio);
                }
            }
            if (leave == tab.rows()) return PhaseOutcome::unbounded;
            tab.pivot(leave, enter);
            ++iterations;
            if (!tab.finite()) throw NumericalError("lp: numerically unstable (non-finite tableau entries)");
        }
    }
};

}  // namespace

Solution solve(const Problem& p, const Tolerances& tol) {
    validate(p);
    const std::size_t n = p.n;
    const std::size_t m = p.rows.size();
    const auto lower = lower_of(p);

    // Shift x = l + y; rows become a.y <= rhs - a.l.
    std::vector<double> shifted(m);
    double rhs_scale = 0;
    for (std::size_t r = 0; r < m; ++r) {
        shifted[r] = p.rows[r].rhs - row_activity(p.rows[r], lower);
        rhs_scale = std::max(rhs_scale, std::abs(shifted[r]));
    }
    std::vector<std::size_t> art_rows;
    for (std::size_t r = 0; r < m; ++r)
        if (shifted[r] < 0) art_rows.push_back(r);

    const std::size_t n_art = art_rows.size();
    const std::size_t cols = n + m + n_art;
    Tableau tab(m, cols);
    for (std::size_t r = 0; r < m; ++r) {
        const double sign = shifted[r] < 0 ? -1.0 : 1.0;
        for (const auto& [j, v] : p.rows[r].coefficients) tab.at(r, j) += sign * v;
        tab.at(r, n + r) = sign;
        tab.rhs(r) = sign * shifted[r];
        tab.basis()[r] = n + r;
    }
    for (std::size_t a = 0; a < n_art; ++a) {
        const std::size_t r = art_rows[a];
        tab.at(r, n + m + a) = 1.0;
        tab.basis()[r] = n + m + a;
    }

    Solution sol;
    std::size_t iterations = 0;
    const std::size_t bland_after = 3 * (n + m);
    const std::size_t limit = 50 * (cols + m) + 1000;

    if (n_art > 0) {
        // Phase 1: maximize -(sum of artificials).
        auto& d = tab.obj();
        std::fill(d.begin(), d.end(), 0.0);
        for (std::size_t r : art_rows) {
            for (std::size_t c = 0; c < n + m; ++c) d[c] += tab.at(r, c);
            d[cols] += tab.rhs(r);
        }
        PhaseRunner phase1{tab, tol, n + m + n_art, bland_after, limit, iterations};
        if (phase1.run() == PhaseOutcome::unbounded)
            throw NumericalError("lp: numerically unstable (phase 1 reported unbounded)");
        const double infeasibility = d[cols];  // = sum of artificials at the optimum
        if (infeasibility > scaled(tol.feasibility, rhs_scale)) {
            sol.status = Status::infeasible;
            sol.iterations = iterations;
            return sol;
        }
        // Drive remaining artificials out of the basis or retire redundant rows.
        for (std::size_t r = 0; r < m; ++r) {
            if (tab.basis()[r] < n + m) continue;
            std::size_t pick = n + m;
            double best = tol.pivot;
            for (std::size_t c = 0; c < n + m; ++c) {
                if (std::abs(tab.at(r, c)) > best) {
                    best = std::abs(tab.at(r, c));
                    pick = c;
                }
            }
            if (pick < n + m) {
                tab.pivot(r, pick);
                ++iterations;
            } else {
                tab.alive()[r] = 0;
            }
        }
    }

    // Phase 2: original objective over structural and slack columns.
    {
        auto& d = tab.obj();
        std::fill(d.begin(), d.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) d[j] = p.objective[j];
        for (std::size_t r = 0; r < m; ++r) {
            if (!tab.alive()[r]) continue;
            const std::size_t b = tab.basis()[r];
            const double cb = b < n ? p.objective[b] : 0.0;
            if (cb == 0.0) continue;
            for (std::size_t c = 0; c <= cols; ++c) d[c] -= cb * tab.at(r, c);
        }
        PhaseRunner phase2{tab, tol, n + m, bland_after, limit, iterations};
        if (phase2.run() == PhaseOutcome::unbounded) {
            sol.status = Status::unbounded;
            sol.iterations = iterations;
            return sol;
        }
    }

    std::vector<double> y(n, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        if (!tab.alive()[r]) continue;
        const std::size_t b = tab.basis()[r];
        if (b < n) y[b] = tab.rhs(r);
    }
    sol.x.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        double v = y[j];
        if (v < 0 && v > -scaled(tol.feasibility, rhs_scale)) v = 0;
        if (v < -scaled(tol.feasibility, rhs_scale))
            throw NumericalError("lp: numerically unstable (negative basic variable)");
        sol.x[j] = lower[j] + v;
    }
    for (std::size_t r = 0; r < m; ++r) {
        const double act = row_activity(p.rows[r], sol.x);
        if (act > p.rows[r].rhs + scaled(1e-6, std::max(std::abs(p.rows[r].rhs), std::abs(act))))
            throw NumericalError("lp: numerically unstable (solution violates row '" + p.rows[r].tag + "')");
    }
    sol.status = Status::optimal;
    sol.objective = std::inner_product(p.objective.begin(), p.objective.end(), sol.x.begin(), 0.0);
    sol.iterations = iterations;
    fill_tight_rows(p, sol, tol.feasibility);
    return sol;
}

PruneResult prune_dominated(const Problem& p) {
    validate(p);
    PruneResult out;
    for (const auto& row : p.rows) {
        for (const auto& [j, v] : row.coefficients) {
            if (v < 0) {
                out.problem = p;
                out.warning = "prune skipped: row '" + row.tag + "' has a negative coefficient";
                return out;
            }
        }
    }
    const std::size_t m = p.rows.size();
    std::vector<std::vector<double>> rows(m);
    std::vector<double> sums(m);
    for (std::size_t r = 0; r < m; ++r) {
        rows[r] = dense(p.rows[r], p.n);
        sums[r] = std::accumulate(rows[r].begin(), rows[r].end(), 0.0);
    }
    // A dominator has a coefficient sum at least as large; among equal
    // coefficient vectors the smallest rhs comes first.
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (sums[a] != sums[b]) return sums[a] > sums[b];
        if (p.rows[a].rhs != p.rows[b].rhs) return p.rows[a].rhs < p.rows[b].rhs;
        return a < b;
    });
    auto dominates = [&](std::size_t big, std::size_t small) {
        if (p.rows[big].rhs > p.rows[small].rhs) return false;
        for (std::size_t j = 0; j < p.n; ++j)
            if (rows[big][j] < rows[small][j]) return false;
        return true;
    };
    std::vector<std::size_t> kept;
    std::vector<char> keep(m, 0);
    for (std::size_t r : order) {
        bool dominated = false;
        for (std::size_t k : kept) {
            if (dominates(k, r)) {
                dominated = true;
                break;
            }
        }
        if (!dominated) {
            kept.push_back(r);
            keep[r] = 1;
        }
    }
    out.problem.n = p.n;
    out.problem.objective = p.objective;
    out.problem.lower_bounds = p.lower_bounds;
    for (std::size_t r = 0; r < m; ++r) {
        if (keep[r])
            out.problem.rows.push_back(p.rows[r]);
        else
            ++out.removed;
    }
    return out;
}

namespace {

// Solves the k x k system in place; false when (numerically) singular.
bool solve_square(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double>& x) {
    const std::size_t k = b.size();
    double scale = 0;
    for (const auto& row : a)
        for (double v : row) scale = std::max(scale, std::abs(v));
    if (scale == 0) return k == 0;
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < k; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        if (std::abs(a[piv][c]) <= 1e-12 * scale) return false;
        std::swap(a[piv], a[c]);
        std::swap(b[piv], b[c]);
        for (std::size_t r = 0; r < k; ++r) {
            if (r == c) continue;
            const double f = a[r][c] / a[c][c];
            if (f == 0) continue;
            for (std::size_t cc = c; cc < k; ++cc) a[r][cc] -= f * a[c][cc];
            b[r] -= f * b[c];
        }
    }
    x.assign(k, 0.0);
    for (std::size_t r = 0; r < k; ++r) x[r] = b[r] / a[r][r];
    return true;
}

// Calls visit(indices) for every k-subset of [0, total).
template <class F>
void for_each_subset(std::size_t total, std::size_t k, F&& visit) {
    if (k > total) return;
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        visit(idx);
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == total - k + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace

Solution enumerate_vertices(const Problem& p) {
    validate(p);
    if (p.n == 0 || p.n > 4 || p.rows.size() > 32)
        throw std::invalid_argument("enumerate_vertices: instance too large (needs 1 <= n <= 4 and rows <= 32)");
    const std::size_t n = p.n;
    const auto lower = lower_of(p);

    // Inequalities g.x <= h: the rows, then -x_i <= -l_i.
    std::vector<std::vector<double>> g;
    std::vector<double> h;
    double scale = 1;
    for (const auto& row : p.rows) {
        g.push_back(dense(row, n));
        h.push_back(row.rhs);
        scale = std::max(scale, std::abs(row.rhs));
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> e(n, 0.0);
        e[i] = -1.0;
        g.push_back(e);
        h.push_back(-lower[i]);
        scale = std::max(scale, std::abs(lower[i]));
    }
    const double feas = 1e-9 * scale;
    auto satisfies_all = [&](const std::vector<double>& x, const std::vector<double>& rhs) {
        for (std::size_t r = 0; r < g.size(); ++r) {
            double s = 0;
            for (std::size_t j = 0; j < n; ++j) s += g[r][j] * x[j];
            if (s > rhs[r] + feas) return false;
        }
        return true;
    };

    Solution sol;
    bool found = false;
    double best = -std::numeric_limits<double>::infinity();
    for_each_subset(g.size(), n, [&](const std::vector<std::size_t>& idx) {
        std::vector<std::vector<double>> a;
        std::vector<double> b;
        for (std::size_t r : idx) {
            a.push_back(g[r]);
            b.push_back(h[r]);
        }
        std::vector<double> x;
        if (!solve_square(a, b, x) || !satisfies_all(x, h)) return;
        const double val = std::inner_product(p.objective.begin(), p.objective.end(), x.begin(), 0.0);
        if (!found || val > best + 1e-12 * std::max(1.0, std::abs(best))) {
            found = true;
            best = val;
            sol.x = x;
        }
    });
    if (!found) {
        sol.status = Status::infeasible;
        return sol;
    }

    // Unbounded iff some direction d >= 0 with g_rows.d <= 0, sum(d) = 1 has c.d > 0.
    // Its vertices fix n-1 of the homogeneous inequalities plus the normalization.
    std::vector<double> zero(g.size(), 0.0);
    bool unbounded = false;
    for_each_subset(g.size(), n - 1, [&](const std::vector<std::size_t>& idx) {
        if (unbounded) return;
        std::vector<std::vector<double>> a;
        std::vector<double> b;
        for (std::size_t r : idx) {
            a.push_back(g[r]);
            b.push_back(0.0);
        }
        a.push_back(std::vector<double>(n, 1.0));
        b.push_back(1.0);
        std::vector<double> d;
        if (!solve_square(a, b, d)) return;
        for (std::size_t r = 0; r < g.size(); ++r) {
            double s = 0;
            for (std::size_t j = 0; j < n; ++j) s += g[r][j] * d[j];
            if (s > 1e-9) return;
        }
        const double gain = std::inner_product(p.objective.begin(), p.objective.end(), d.begin(), 0.0);
        if (gain > 1e-9) unbounded = true;
    });
    if (unbounded) {
        sol.status = Status::unbounded;
        sol.x.clear();
        return sol;
    }
    for (std::size_t j = 0; j < n; ++j) sol.x[j] = std::max(sol.x[j], lower[j]);
    sol.status = Status::optimal;
    sol.objective = std::inner_product(p.objective.begin(), p.objective.end(), sol.x.begin(), 0.0);
    fill_tight_rows(p, sol, 1e-7);
    return sol;
}

void dump(std::ostream& out, const Problem& p) {
    const auto old = out.flags();
    const auto prec = out.precision(17);
    out << "maximize";
    for (double c : p.objective) out << ' ' << c;
    out << '\n';
    for (const auto& row : p.rows) {
        const auto coeffs = dense(row, p.n);
        for (std::size_t j = 0; j < coeffs.size(); ++j) out << (j ? " " : "") << coeffs[j];
        out << " <= " << row.rhs << ' ' << row.tag << '\n';
    }
    const auto lower = lower_of(p);
    out << "lower";
    for (double l : lower) out << ' ' << l;
    out << '\n';
    out.flags(old);
    out.precision(prec);
}

}  // namespace cellmix::lp
