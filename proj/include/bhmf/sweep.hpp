#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "bhmf/model.hpp"
#include "bhmf/varsolve.hpp"

namespace bhmf {

struct SweepAxis {
    std::string name;  // one of beta, mu, lambda
    double start = 0.0;
    double stop = 0.0;
    int count = 1;
};

enum class OutputFormat { csv, json };

struct SweepSpec {
    std::vector<SweepAxis> axes;
    ModelParams fixed;  // parameters not overridden by an axis
    std::string out_path;
    OutputFormat format = OutputFormat::csv;
    int threads = 0;  // 0 picks the hardware concurrency
};

struct SweepRecord {
    double beta = 0.0;
    double mu = 0.0;
    double lambda = 0.0;
    VariationalSolution solution;
};

inline void validate_spec(const SweepSpec& spec) {
    std::set<std::string> seen;
    for (const SweepAxis& axis : spec.axes) {
        if (axis.name != "beta" && axis.name != "mu" && axis.name != "lambda")
            throw domain_error("sweep: unknown axis '" + axis.name + "'");
        if (!seen.insert(axis.name).second) throw domain_error("sweep: duplicate axis '" + axis.name + "'");
        if (axis.count < 1) throw domain_error("sweep: axis count must be >= 1");
    }
    if (spec.threads < 0) throw domain_error("sweep: thread count must be nonnegative");
}

// Cartesian product of the axes in declaration order, last axis fastest.
inline std::vector<ModelParams> expand_grid(const SweepSpec& spec) {
    validate_spec(spec);
    std::vector<ModelParams> grid;
    size_t total = 1;
    for (const SweepAxis& axis : spec.axes) total *= static_cast<size_t>(axis.count);
    grid.reserve(total);

    std::vector<int> idx(spec.axes.size(), 0);
    for (size_t flat = 0; flat < total; ++flat) {
        size_t rem = flat;
        for (size_t a = spec.axes.size(); a-- > 0;) {
            idx[a] = static_cast<int>(rem % spec.axes[a].count);
            rem /= spec.axes[a].count;
        }
        ModelParams p = spec.fixed;
        for (size_t a = 0; a < spec.axes.size(); ++a) {
            const SweepAxis& axis = spec.axes[a];
            const double t = (axis.count == 1) ? 0.0 : static_cast<double>(idx[a]) / (axis.count - 1);
            const double value = axis.start + t * (axis.stop - axis.start);
            if (axis.name == "beta")
                p.beta = value;
            else if (axis.name == "mu")
                p.mu = value;
            else
                p.lambda = value;
        }
        grid.push_back(p);
    }
    return grid;
}

// Parallel map over the grid with results gathered into a buffer indexed by
// grid position, so the output order never depends on scheduling.
inline std::vector<SweepRecord> run_sweep(const SweepSpec& spec) {
    const std::vector<ModelParams> grid = expand_grid(spec);
    std::vector<SweepRecord> records(grid.size());

    int threads = spec.threads;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<int>(threads, static_cast<int>(grid.size()));
    if (threads == 0) return records;

    std::atomic<size_t> next{0};
    std::vector<std::exception_ptr> failures(grid.size());
    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= grid.size()) return;
            try {
                records[i].beta = grid[i].beta;
                records[i].mu = grid[i].mu;
                records[i].lambda = grid[i].lambda;
                records[i].solution = solve(grid[i]);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };

    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    for (const std::exception_ptr& e : failures)
        if (e) std::rethrow_exception(e);
    return records;
}

// 17 significant digits round-trips a double exactly.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline constexpr const char* kCsvHeader =
    "beta,mu,lambda,r_star,pressure,density,n2_mean,condensate_fraction,degenerate_branch";

namespace detail {

inline void require_finite_fields(const SweepRecord& r) {
    const double fields[] = {r.beta,
                             r.mu,
                             r.lambda,
                             r.solution.r_star,
                             r.solution.pressure,
                             r.solution.density,
                             r.solution.number_sq_mean,
                             r.solution.condensate_fraction};
    for (double f : fields)
        if (!std::isfinite(f)) throw numerical_error("sweep: refusing to serialize a non-finite value");
}

inline std::string render_csv(const std::vector<SweepRecord>& records) {
    std::string out = kCsvHeader;
    out += '\n';
    for (const SweepRecord& r : records) {
        require_finite_fields(r);
        out += format_double(r.beta);
        out += ',';
        out += format_double(r.mu);
        out += ',';
        out += format_double(r.lambda);
        out += ',';
        out += format_double(r.solution.r_star);
        out += ',';
        out += format_double(r.solution.pressure);
        out += ',';
        out += format_double(r.solution.density);
        out += ',';
        out += format_double(r.solution.number_sq_mean);
        out += ',';
        out += format_double(r.solution.condensate_fraction);
        out += ',';
        out += r.solution.degenerate_branch ? '1' : '0';
        out += '\n';
    }
    return out;
}

inline std::string render_json(const std::vector<SweepRecord>& records) {
    std::string out = "[\n";
    for (size_t i = 0; i < records.size(); ++i) {
        const SweepRecord& r = records[i];
        require_finite_fields(r);
        out += "  {\"beta\": " + format_double(r.beta);
        out += ", \"mu\": " + format_double(r.mu);
        out += ", \"lambda\": " + format_double(r.lambda);
        out += ", \"r_star\": " + format_double(r.solution.r_star);
        out += ", \"pressure\": " + format_double(r.solution.pressure);
        out += ", \"density\": " + format_double(r.solution.density);
        out += ", \"n2_mean\": " + format_double(r.solution.number_sq_mean);
        out += ", \"condensate_fraction\": " + format_double(r.solution.condensate_fraction);
        out += std::string(", \"degenerate_branch\": ") + (r.solution.degenerate_branch ? "true" : "false");
        out += (i + 1 < records.size()) ? "},\n" : "}\n";
    }
    out += "]\n";
    return out;
}

}  // namespace detail

// Write records to spec.out_path, through a temp file renamed on success so
// a failure never leaves partial output behind.
inline void emit(const std::vector<SweepRecord>& records, const SweepSpec& spec) {
    if (records.empty()) throw domain_error("emit: no records to write");
    const std::string body =
        spec.format == OutputFormat::csv ? detail::render_csv(records) : detail::render_json(records);

    const std::string tmp_path = spec.out_path + ".tmp";
    {
        std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
        if (!out) throw numerical_error("emit: cannot open '" + tmp_path + "' for writing");
        out << body;
        if (!out) throw numerical_error("emit: write to '" + tmp_path + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp_path, spec.out_path, ec);
    if (ec) {
        std::filesystem::remove(tmp_path);
        throw numerical_error("emit: cannot move output into place at '" + spec.out_path +
                              "': " + ec.message());
    }
}

}  // namespace bhmf
