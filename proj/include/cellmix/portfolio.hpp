#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cellmix/footprint.hpp"
#include "cellmix/ingest.hpp"
#include "cellmix/lp.hpp"

namespace cellmix {

struct PortfolioOptions {
    /// R_i per segment (tensor order); all 1 when absent.
    std::optional<std::vector<double>> revenue_weights;
    /// Load tensor T[i][t][j] used in the capacity rows instead of headcounts.
    std::optional<FootprintTensor> traffic;
    /// Adds x >= 1: every current client is kept.
    bool keep_clients = false;
    /// Uniform capacity for every cell instead of the registry's values.
    std::optional<double> capacity_override;
};

struct PortfolioResult {
    lp::Status status = lp::Status::infeasible;
    std::vector<std::string> segments;
    std::vector<double> population;    // S_i
    std::vector<double> x_star;        // optimal scaling coefficients
    std::vector<double> s_star;        // S_i * x_i
    std::vector<double> desirability;  // x normalized by its maximum
    double max_obj = 0;
    double current_obj = 0;
    std::vector<std::string> tight_rows;
    std::size_t rows_built = 0;
    std::size_t rows_after_prune = 0;
};

/// Capacity of each tensor cell: the override when set, else the registry value.
std::vector<double> cell_capacities(const FootprintTensor& tensor, const CellRegistry& registry,
                                    const PortfolioOptions& options);

/// One row per (t, j) with a nonzero footprint, tagged "t<slot>/<cell>".
lp::Problem build_lp(const FootprintTensor& tensor, const CellRegistry& registry, const PortfolioOptions& options);
lp::Problem build_lp(const FootprintTensor& tensor, std::span<const double> capacities,
                     const PortfolioOptions& options);

PortfolioResult optimize(const FootprintTensor& tensor, const CellRegistry& registry, const PortfolioOptions& options);
PortfolioResult optimize(const FootprintTensor& tensor, std::span<const double> capacities,
                         const PortfolioOptions& options);

/// Divides by the largest entry; all zeros stay zeros. Throws on negatives.
std::vector<double> normalize_desirability(std::span<const double> x);

/// Servable clients if today's mix grows uniformly: lambda * sum(R_i S_i) with
/// lambda = min over loaded (t, j) of C_j / N[t][j]. Throws DomainError for an
/// all-zero tensor.
double current_objective(const FootprintTensor& tensor, const CellRegistry& registry, const PortfolioOptions& options);
double current_objective(const FootprintTensor& tensor, std::span<const double> capacities,
                         const PortfolioOptions& options);

struct SweepPoint {
    double capacity = 0;
    double current_obj = 0;
    double max_obj = 0;
    std::optional<double> keep_clients_obj;  // empty when keep-clients is infeasible
};

/// Uniform capacities from c_from to c_to in `steps` evenly spaced points.
std::vector<SweepPoint> capacity_sweep(const FootprintTensor& tensor, const PortfolioOptions& options, double c_from,
                                       double c_to, std::size_t steps);

/// Smallest uniform capacity at which x = 1 is feasible (the peak load).
double min_feasible_capacity(const FootprintTensor& tensor);

struct KeepClientsBreakpoints {
    double min_feasible = 0;
    /// Smallest uniform capacity from which x >= 1 no longer lowers the optimum.
    std::optional<double> release;
};

KeepClientsBreakpoints keep_clients_breakpoints(const FootprintTensor& tensor, const PortfolioOptions& options);

}  // namespace cellmix
