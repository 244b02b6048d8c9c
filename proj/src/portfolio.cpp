#include "cellmix/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "cellmix/error.hpp"

namespace cellmix {

namespace {

const FootprintTensor& load_tensor(const FootprintTensor& tensor, const PortfolioOptions& options) {
    if (!options.traffic) return tensor;
    if (!options.traffic->same_shape(tensor))
        throw InputError("traffic tensor does not share the footprint tensor's segments, cells and slots");
    return *options.traffic;
}

std::vector<double> objective_of(const FootprintTensor& tensor, const PortfolioOptions& options) {
    std::vector<double> c = tensor.totals();
    if (options.revenue_weights) {
        const auto& r = *options.revenue_weights;
        if (r.size() != c.size())
            throw InputError("revenue weights: expected " + std::to_string(c.size()) + " values, got " +
                             std::to_string(r.size()));
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (!(r[i] > 0) || !std::isfinite(r[i]))
                throw InputError("revenue weight for segment '" + tensor.segments()[i] + "' must be positive");
            c[i] *= r[i];
        }
    }
    return c;
}

void check_capacities(const FootprintTensor& tensor, std::span<const double> capacities) {
    if (capacities.size() != tensor.cell_count())
        throw std::invalid_argument("capacities: expected one value per tensor cell");
    for (double c : capacities)
        if (!(c >= 0) || !std::isfinite(c)) throw InputError("cell capacities must be finite and non-negative");
}

PortfolioOptions with_capacity(PortfolioOptions options, double capacity, bool keep_clients) {
    options.capacity_override = capacity;
    options.keep_clients = keep_clients;
    return options;
}

}  // namespace

std::vector<double> cell_capacities(const FootprintTensor& tensor, const CellRegistry& registry,
                                    const PortfolioOptions& options) {
    if (options.capacity_override) {
        const double c = *options.capacity_override;
        if (!(c >= 0) || !std::isfinite(c)) throw InputError("capacity override must be finite and non-negative");
        return std::vector<double>(tensor.cell_count(), c);
    }
    std::vector<double> out;
    out.reserve(tensor.cell_count());
    for (const auto& id : tensor.cells()) {
        const Cell* cell = registry.find(id);
        if (!cell) throw InputError("tensor cell '" + id + "' is missing from the cell registry");
        out.push_back(static_cast<double>(cell->capacity));
    }
    return out;
}

lp::Problem build_lp(const FootprintTensor& tensor, const CellRegistry& registry, const PortfolioOptions& options) {
    const auto caps = cell_capacities(tensor, registry, options);
    return build_lp(tensor, caps, options);
}

lp::Problem build_lp(const FootprintTensor& tensor, std::span<const double> capacities,
                     const PortfolioOptions& options) {
    check_capacities(tensor, capacities);
    const auto& loads = load_tensor(tensor, options);
    lp::Problem p;
    p.n = tensor.segment_count();
    p.objective = objective_of(tensor, options);
    if (options.keep_clients) p.lower_bounds.assign(p.n, 1.0);
    const std::size_t k = p.n;
    for (std::size_t r = 0; r < loads.active().size(); ++r) {
        const auto key = loads.active()[r];
        const auto slice = loads.slice(r);
        lp::Row row;
        for (std::size_t i = 0; i < k; ++i)
            if (slice[i] != 0) row.coefficients.emplace_back(i, slice[i]);
        if (row.coefficients.empty()) continue;
        row.rhs = capacities[key.cell];
        row.tag = "t" + std::to_string(key.slot) + "/" + loads.cells()[key.cell];
        p.rows.push_back(std::move(row));
    }
    return p;
}

std::vector<double> normalize_desirability(std::span<const double> x) {
    double top = 0;
    for (double v : x) {
        if (v < 0 || !std::isfinite(v)) throw std::invalid_argument("desirability: scaling coefficients must be >= 0");
        top = std::max(top, v);
    }
    std::vector<double> out(x.size(), 0.0);
    if (top == 0) return out;
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] / top;
    return out;
}

double current_objective(const FootprintTensor& tensor, const CellRegistry& registry, const PortfolioOptions& options) {
    const auto caps = cell_capacities(tensor, registry, options);
    return current_objective(tensor, caps, options);
}

double current_objective(const FootprintTensor& tensor, std::span<const double> capacities,
                         const PortfolioOptions& options) {
    check_capacities(tensor, capacities);
    const auto& loads = load_tensor(tensor, options);
    if (loads.active().empty()) throw DomainError("current objective undefined: the footprint tensor is all zero");
    double lambda = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < loads.active().size(); ++r)
        lambda = std::min(lambda, capacities[loads.active()[r].cell] / loads.load(r));
    const auto c = objective_of(tensor, options);
    return lambda * std::accumulate(c.begin(), c.end(), 0.0);
}

PortfolioResult optimize(const FootprintTensor& tensor, const CellRegistry& registry, const PortfolioOptions& options) {
    const auto caps = cell_capacities(tensor, registry, options);
    return optimize(tensor, caps, options);
}

PortfolioResult optimize(const FootprintTensor& tensor, std::span<const double> capacities,
                         const PortfolioOptions& options) {
    PortfolioResult res;
    res.segments = tensor.segments();
    res.population = tensor.totals();
    const auto problem = build_lp(tensor, capacities, options);
    res.rows_built = problem.rows.size();
    const auto pruned = lp::prune_dominated(problem);
    res.rows_after_prune = pruned.problem.rows.size();
    const auto sol = lp::solve(pruned.problem);
    res.status = sol.status;
    res.current_obj = tensor.active().empty() ? 0.0 : current_objective(tensor, capacities, options);
    if (sol.status != lp::Status::optimal) return res;
    res.x_star = sol.x;
    res.max_obj = sol.objective;
    res.tight_rows = sol.tight_rows;
    res.s_star.resize(res.x_star.size());
    for (std::size_t i = 0; i < res.x_star.size(); ++i) res.s_star[i] = res.population[i] * res.x_star[i];
    res.desirability = normalize_desirability(res.x_star);
    return res;
}

double min_feasible_capacity(const FootprintTensor& tensor) {
    if (tensor.active().empty()) throw DomainError("minimum feasible capacity undefined: the tensor is all zero");
    return tensor.peak_load();
}

std::vector<SweepPoint> capacity_sweep(const FootprintTensor& tensor, const PortfolioOptions& options, double c_from,
                                       double c_to, std::size_t steps) {
    if (!(c_from >= 0) || !(c_from < c_to) || steps < 2)
        throw std::invalid_argument("capacity sweep needs 0 <= from < to and at least 2 steps");
    std::vector<SweepPoint> out;
    out.reserve(steps);
    for (std::size_t s = 0; s < steps; ++s) {
        const double c = s + 1 == steps ? c_to
                                        : c_from + (c_to - c_from) * static_cast<double>(s) / static_cast<double>(steps - 1);
        SweepPoint pt;
        pt.capacity = c;
        const std::vector<double> caps(tensor.cell_count(), c);
        const auto free_opts = with_capacity(options, c, false);
        pt.current_obj = tensor.active().empty() ? 0.0 : current_objective(tensor, caps, free_opts);
        const auto free = optimize(tensor, caps, free_opts);
        if (free.status != lp::Status::optimal)
            throw DomainError(std::string("capacity sweep: LP is ") + lp::to_string(free.status) + " at capacity " +
                              std::to_string(c));
        pt.max_obj = free.max_obj;
        const auto kept = optimize(tensor, caps, with_capacity(options, c, true));
        if (kept.status == lp::Status::optimal) pt.keep_clients_obj = kept.max_obj;
        out.push_back(pt);
    }
    return out;
}

KeepClientsBreakpoints keep_clients_breakpoints(const FootprintTensor& tensor, const PortfolioOptions& options) {
    KeepClientsBreakpoints out;
    out.min_feasible = options.traffic ? options.traffic->peak_load() : min_feasible_capacity(tensor);
    if (out.min_feasible == 0) throw DomainError("keep-clients breakpoints undefined: the tensor is all zero");

    // At unit capacity the unrestricted optimum scales as x*(c) = c y with y on
    // the optimal face. Bounds stop binding once c * max_y(min_i y_i) >= 1, so
    // maximize s subject to the unit-capacity rows, c.y >= best, y_i >= s.
    const std::vector<double> unit(tensor.cell_count(), 1.0);
    const auto free_opts = with_capacity(options, 1.0, false);
    const auto base = build_lp(tensor, unit, free_opts);
    const auto free = lp::solve(lp::prune_dominated(base).problem);
    if (free.status != lp::Status::optimal) return out;

    const std::size_t k = base.n;
    lp::Problem p;
    p.n = k + 1;
    p.objective.assign(k + 1, 0.0);
    p.objective[k] = 1.0;
    p.rows = base.rows;
    lp::Row optimal_face;
    for (std::size_t i = 0; i < k; ++i)
        if (base.objective[i] != 0) optimal_face.coefficients.emplace_back(i, -base.objective[i]);
    optimal_face.rhs = -free.objective * (1 - 1e-10);
    optimal_face.tag = "optimal-face";
    p.rows.push_back(std::move(optimal_face));
    for (std::size_t i = 0; i < k; ++i) {
        lp::Row floor_row;
        floor_row.coefficients = {{i, -1.0}, {k, 1.0}};
        floor_row.rhs = 0;
        floor_row.tag = "floor/" + tensor.segments()[i];
        p.rows.push_back(std::move(floor_row));
    }
    const auto sol = lp::solve(p);
    if (sol.status != lp::Status::optimal || sol.objective <= 1e-12) return out;
    out.release = std::max(out.min_feasible, 1.0 / sol.objective);
    return out;
}

}  // namespace cellmix
