#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace fluxpop::ipf {

/// Dense non-negative matrix, row-major.
struct Matrix2D {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> cells;

    static Matrix2D filled(std::size_t rows, std::size_t cols, double value);
    static Matrix2D ones(std::size_t rows, std::size_t cols) { return filled(rows, cols, 1.0); }

    double& operator()(std::size_t r, std::size_t c) { return cells[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return cells[r * cols + c]; }

    std::vector<double> row_sums() const;
    std::vector<double> col_sums() const;
};

struct IpfReport {
    int iterations = 0;
    double max_row_residual = 0.0;
    double max_col_residual = 0.0;
    bool converged = false;
    /// Column residual after each full sweep; non-increasing on feasible
    /// problems.
    std::vector<double> col_residual_history;
};

struct IpfOptions {
    double tol = 1e-8;
    int max_iter = 1000;
    int threads = 1;
};

/// Rescales the column targets so their grand total equals the row targets'.
/// The two marginal families come from independent derivations and do not
/// automatically share a total; rows win.
std::vector<double> harmonize_targets(std::span<const double> row_targets,
                                      std::span<const double> col_targets);

/// Alternating row/column scaling of `seed` until both marginal residuals
/// (relative infinity norm, scaled by max(1, target)) fall under tol.
///
/// Targets must be non-negative with matching grand totals (1e-9 relative).
/// Zero seed cells stay zero. A positive target over an all-zero slice is
/// structurally infeasible and throws. Hitting max_iter returns the best
/// iterate with converged=false.
std::pair<Matrix2D, IpfReport> ipf_fit(Matrix2D seed, std::span<const double> row_targets,
                                       std::span<const double> col_targets,
                                       const IpfOptions& options = {});

} // namespace fluxpop::ipf
