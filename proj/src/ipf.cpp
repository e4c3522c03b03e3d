#include "fluxpop/ipf.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fluxpop/errors.hpp"
#include "fluxpop/parallel.hpp"

namespace fluxpop::ipf {

namespace {

void check_targets(std::span<const double> targets, const char* which) {
    for (double v : targets) {
        if (!std::isfinite(v) || v < 0.0) {
            throw std::invalid_argument(std::string("ipf: ") + which +
                                        " targets must be finite and non-negative");
        }
    }
}

double total(std::span<const double> v) {
    double sum = 0.0;
    for (double x : v) {
        sum += x;
    }
    return sum;
}

double residual(double sum, double target) {
    return std::abs(sum - target) / std::max(1.0, target);
}

double max_residual(std::span<const double> sums, std::span<const double> targets) {
    double worst = 0.0;
    for (std::size_t i = 0; i < sums.size(); ++i) {
        worst = std::max(worst, residual(sums[i], targets[i]));
    }
    return worst;
}

std::vector<double> row_sums_parallel(const Matrix2D& m, int threads) {
    std::vector<double> sums(m.rows, 0.0);
    parallel_for(m.rows, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            const double* cell = m.cells.data() + r * m.cols;
            double s = 0.0;
            for (std::size_t c = 0; c < m.cols; ++c) {
                s += cell[c];
            }
            sums[r] = s;
        }
    });
    return sums;
}

std::vector<double> col_sums_parallel(const Matrix2D& m, int threads) {
    std::vector<double> sums(m.cols, 0.0);
    // Column blocks per thread: each column is accumulated in row order, so
    // the result does not depend on the thread count.
    parallel_for(m.cols, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = 0; r < m.rows; ++r) {
            const double* cell = m.cells.data() + r * m.cols;
            for (std::size_t c = begin; c < end; ++c) {
                sums[c] += cell[c];
            }
        }
    });
    return sums;
}

} // namespace

Matrix2D Matrix2D::filled(std::size_t rows, std::size_t cols, double value) {
    Matrix2D m;
    m.rows = rows;
    m.cols = cols;
    m.cells.assign(rows * cols, value);
    return m;
}

std::vector<double> Matrix2D::row_sums() const { return row_sums_parallel(*this, 1); }

std::vector<double> Matrix2D::col_sums() const { return col_sums_parallel(*this, 1); }

std::vector<double> harmonize_targets(std::span<const double> row_targets,
                                      std::span<const double> col_targets) {
    check_targets(row_targets, "row");
    check_targets(col_targets, "column");
    const double row_total = total(row_targets);
    const double col_total = total(col_targets);
    if (row_total <= 0.0) {
        throw pipeline_error("harmonize_targets: zero total on the row side");
    }
    if (col_total <= 0.0) {
        throw pipeline_error("harmonize_targets: zero total on the column side");
    }
    const double scale = row_total / col_total;
    std::vector<double> adjusted(col_targets.begin(), col_targets.end());
    for (double& v : adjusted) {
        v *= scale;
    }
    return adjusted;
}

std::pair<Matrix2D, IpfReport> ipf_fit(Matrix2D seed, std::span<const double> row_targets,
                                       std::span<const double> col_targets,
                                       const IpfOptions& options) {
    if (seed.rows == 0 || seed.cols == 0) {
        throw std::invalid_argument("ipf: empty seed");
    }
    if (seed.cells.size() != seed.rows * seed.cols) {
        throw std::invalid_argument("ipf: seed cell count does not match its shape");
    }
    if (row_targets.size() != seed.rows || col_targets.size() != seed.cols) {
        throw std::invalid_argument("ipf: target lengths do not match the seed shape");
    }
    check_targets(row_targets, "row");
    check_targets(col_targets, "column");
    for (double v : seed.cells) {
        if (!std::isfinite(v) || v < 0.0) {
            throw std::invalid_argument("ipf: seed cells must be finite and non-negative");
        }
    }
    const double row_total = total(row_targets);
    const double col_total = total(col_targets);
    if (std::abs(row_total - col_total) > 1e-9 * std::max(1.0, row_total)) {
        throw std::invalid_argument("ipf: target totals differ; harmonize first");
    }

    // A positive target over an all-zero slice can never be met.
    {
        const auto rs = seed.row_sums();
        for (std::size_t r = 0; r < seed.rows; ++r) {
            if (row_targets[r] > 0.0 && rs[r] == 0.0) {
                throw pipeline_error("ipf: row " + std::to_string(r) +
                                     " has a positive target but an all-zero seed slice");
            }
        }
        const auto cs = seed.col_sums();
        for (std::size_t c = 0; c < seed.cols; ++c) {
            if (col_targets[c] > 0.0 && cs[c] == 0.0) {
                throw pipeline_error("ipf: column " + std::to_string(c) +
                                     " has a positive target but an all-zero seed slice");
            }
        }
    }

    IpfReport report;
    const int threads = options.threads;

    const auto scale_rows = [&](Matrix2D& m) {
        const auto sums = row_sums_parallel(m, threads);
        std::size_t dead = m.rows;
        for (std::size_t r = 0; r < m.rows; ++r) {
            if (row_targets[r] > 0.0 && sums[r] == 0.0) {
                dead = r;
            }
        }
        if (dead != m.rows) {
            throw pipeline_error("ipf: row " + std::to_string(dead) +
                                 " lost all mass; the problem is structurally infeasible");
        }
        parallel_for(m.rows, threads, [&](std::size_t begin, std::size_t end) {
            for (std::size_t r = begin; r < end; ++r) {
                double* cell = m.cells.data() + r * m.cols;
                if (row_targets[r] == 0.0) {
                    for (std::size_t c = 0; c < m.cols; ++c) {
                        cell[c] = 0.0;
                    }
                    continue;
                }
                const double factor = row_targets[r] / sums[r];
                for (std::size_t c = 0; c < m.cols; ++c) {
                    cell[c] *= factor;
                }
            }
        });
    };

    const auto scale_cols = [&](Matrix2D& m) -> double {
        const auto sums = col_sums_parallel(m, threads);
        std::size_t dead = m.cols;
        for (std::size_t c = 0; c < m.cols; ++c) {
            if (col_targets[c] > 0.0 && sums[c] == 0.0) {
                dead = c;
            }
        }
        if (dead != m.cols) {
            throw pipeline_error("ipf: column " + std::to_string(dead) +
                                 " lost all mass; the problem is structurally infeasible");
        }
        const double pre_residual = max_residual(sums, col_targets);
        std::vector<double> factors(m.cols, 0.0);
        for (std::size_t c = 0; c < m.cols; ++c) {
            factors[c] = col_targets[c] == 0.0 ? 0.0 : col_targets[c] / sums[c];
        }
        parallel_for(m.rows, threads, [&](std::size_t begin, std::size_t end) {
            for (std::size_t r = begin; r < end; ++r) {
                double* cell = m.cells.data() + r * m.cols;
                for (std::size_t c = 0; c < m.cols; ++c) {
                    cell[c] *= factors[c];
                }
            }
        });
        return pre_residual;
    };

    for (int iter = 1; iter <= options.max_iter; ++iter) {
        scale_rows(seed);
        const double col_residual_before_fix = scale_cols(seed);
        report.col_residual_history.push_back(col_residual_before_fix);
        report.iterations = iter;

        const double row_res = max_residual(row_sums_parallel(seed, threads), row_targets);
        if (row_res <= options.tol && col_residual_before_fix <= options.tol) {
            break;
        }
    }

    report.max_row_residual = max_residual(row_sums_parallel(seed, threads), row_targets);
    report.max_col_residual = max_residual(col_sums_parallel(seed, threads), col_targets);
    report.converged =
        report.max_row_residual <= options.tol && report.max_col_residual <= options.tol;
    return {std::move(seed), std::move(report)};
}

} // namespace fluxpop::ipf
