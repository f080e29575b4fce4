#include "fdrecon/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fdrecon/csv_io.hpp"
#include "fdrecon/errors.hpp"

namespace fdrecon {

void BenchConfig::validate() const {
    if (n < 2) throw ConfigError("bench: n must be >= 2");
    if (grid_points < 2) throw ConfigError("bench: grid_points must be >= 2");
    if (replicates < 1) throw ConfigError("bench: replicates must be >= 1");
    if (workers < 0) throw ConfigError("bench: workers must be >= 0");
    if (c_values.empty() || p_values.empty() || m_values.empty())
        throw ConfigError("bench: c, p, and m lists must be non-empty");
    gp.validate();
    for (double c : c_values)
        if (c < 0.0 || c > 100.0) throw ConfigError("bench: c must be in [0, 100]");
    for (double p : p_values)
        if (p <= 0.0 || p > 100.0) throw ConfigError("bench: p must be in (0, 100]");
    for (std::size_t m : m_values)
        if (m < 1) throw ConfigError("bench: m must be >= 1");
    if (!fixed_theta && theta_grid.empty()) throw ConfigError("bench: theta grid is empty");
}

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto a = item.find_first_not_of(" \t");
        const auto b = item.find_last_not_of(" \t");
        out.push_back(a == std::string::npos ? "" : item.substr(a, b - a + 1));
    }
    return out;
}

double parse_double(const std::string& v, const std::string& key) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for '" + key + "': '" + v + "'");
    }
}

std::size_t parse_size(const std::string& v, const std::string& key) {
    const double x = parse_double(v, key);
    if (x < 0 || x != std::floor(x)) throw ConfigError("'" + key + "' must be a non-negative integer");
    return static_cast<std::size_t>(x);
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "1" || v == "true" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "no") return false;
    throw ConfigError("'" + key + "' must be a boolean (0/1/true/false), got '" + v + "'");
}

}  // namespace

BenchConfig parse_bench_config(std::istream& in, const std::string& source_name) {
    BenchConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        const auto a = line.find_first_not_of(" \t\r");
        if (a == std::string::npos) continue;
        const auto b = line.find_last_not_of(" \t\r");
        line = line.substr(a, b - a + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(source_name + ":" + std::to_string(line_no) +
                              ": expected key=value, got '" + line + "'");
        auto strip = [](std::string s) {
            const auto x = s.find_first_not_of(" \t");
            if (x == std::string::npos) return std::string();
            const auto y = s.find_last_not_of(" \t");
            return s.substr(x, y - x + 1);
        };
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError(source_name + ":" + std::to_string(line_no) + ": empty key or value");

        if (key == "n") cfg.n = parse_size(value, key);
        else if (key == "grid_points" || key == "T") cfg.grid_points = parse_size(value, key);
        else if (key == "replicates") cfg.replicates = parse_size(value, key);
        else if (key == "alpha") cfg.gp.alpha = parse_double(value, key);
        else if (key == "beta") cfg.gp.beta = parse_double(value, key);
        else if (key == "sigma") cfg.gp.sigma = parse_double(value, key);
        else if (key == "ell") cfg.gp.ell = parse_double(value, key);
        else if (key == "jitter") cfg.gp.jitter = parse_double(value, key);
        else if (key == "mechanism") cfg.mechanism = missing_mechanism_from_string(value);
        else if (key == "c") {
            cfg.c_values.clear();
            for (const auto& v : split_list(value)) cfg.c_values.push_back(parse_double(v, key));
        } else if (key == "p") {
            cfg.p_values.clear();
            for (const auto& v : split_list(value)) cfg.p_values.push_back(parse_double(v, key));
        } else if (key == "m") {
            cfg.m_values.clear();
            for (const auto& v : split_list(value)) cfg.m_values.push_back(parse_size(v, key));
        } else if (key == "depth") cfg.kind = depth_kind_from_string(value);
        else if (key == "theta_grid") {
            cfg.theta_grid.clear();
            for (const auto& v : split_list(value)) cfg.theta_grid.push_back(parse_double(v, key));
        } else if (key == "theta") cfg.fixed_theta = parse_double(value, key);
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_size(value, key));
        else if (key == "workers") cfg.workers = static_cast<int>(parse_size(value, key));
        else if (key == "fix_mean") cfg.fix_mean = parse_bool(value, key);
        else if (key == "per_curve_mse") cfg.per_curve_mse = parse_bool(value, key);
        else if (key == "fallback_mean") cfg.fallback_mean = parse_bool(value, key);
        else if (key == "coverage_fallback") cfg.coverage_fallback = parse_bool(value, key);
        else if (key == "rms_distance") cfg.rms_distance = parse_bool(value, key);
        else
            throw ConfigError(source_name + ":" + std::to_string(line_no) + ": unknown key '" +
                              key + "'");
    }
    cfg.validate();
    return cfg;
}

BenchConfig parse_bench_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    return parse_bench_config(in, path);
}

std::optional<double> mse_missing(const FunctionalSample& original,
                                  const SampleReconstruction& recon, bool per_curve) {
    const Grid& g = original.grid();
    if (!(g == recon.completed.grid()))
        throw StructuralError("mse_missing: grid mismatch");
    double pooled_num = 0.0, pooled_den = 0.0;
    double curve_sum = 0.0;
    std::size_t curve_count = 0;
    for (const ReconstructionResult& r : recon.results) {
        double num = 0.0, den = 0.0;
        for (std::size_t t = 0; t < g.size(); ++t) {
            if (!r.filled_mask[t]) continue;
            const double err = r.filled_values[t] - original.curve(r.focal).value(t);
            num += err * err * g.weight(t);
            den += g.weight(t);
        }
        if (den > 0.0) {
            curve_sum += num / den;
            ++curve_count;
            pooled_num += num;
            pooled_den += den;
        }
    }
    if (per_curve) {
        if (curve_count == 0) return std::nullopt;
        return curve_sum / static_cast<double>(curve_count);
    }
    if (pooled_den == 0.0) return std::nullopt;
    return pooled_num / pooled_den;
}

double exact_median(std::vector<double> values) {
    if (values.empty()) throw StructuralError("median of an empty vector");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

BenchResult run_benchmark(const BenchConfig& config) {
    config.validate();
#ifdef _OPENMP
    if (config.workers > 0) omp_set_num_threads(config.workers);
#endif
    const auto t_start = std::chrono::steady_clock::now();

    BenchResult result;
    result.config = config;
    const Grid grid = Grid::uniform(config.grid_points);

    std::vector<double> shared_mean;
    if (config.fix_mean)
        shared_mean = gp_mean_path(grid, config.gp, config.seed, ~std::uint64_t{0});

    struct Cell {
        double c, p;
        std::size_t m;
    };
    std::vector<Cell> cells;
    for (double c : config.c_values)
        for (double p : config.p_values)
            for (std::size_t m : config.m_values) cells.push_back({c, p, m});

    result.cells.resize(cells.size());
    for (std::size_t k = 0; k < cells.size(); ++k) {
        result.cells[k].c = cells[k].c;
        result.cells[k].p = cells[k].p;
        result.cells[k].m = cells[k].m;
        result.cells[k].replicates.resize(config.replicates);
    }

    ReconstructConfig rc;
    rc.kind = config.kind;
    rc.envelope.coverage_fallback = config.coverage_fallback;
    rc.envelope.norm = config.rms_distance ? DistanceNorm::Rms : DistanceNorm::MeanL2;
    rc.theta_grid = config.theta_grid;
    rc.fixed_theta = config.fixed_theta;
    rc.fallback_mean = config.fallback_mean;

    const std::ptrdiff_t jobs =
        static_cast<std::ptrdiff_t>(cells.size() * config.replicates);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t job = 0; job < jobs; ++job) {
        const std::size_t cell_idx = static_cast<std::size_t>(job) / config.replicates;
        const std::size_t rep = static_cast<std::size_t>(job) % config.replicates;
        const Cell& cell = cells[cell_idx];
        ReplicateOutcome& out = result.cells[cell_idx].replicates[rep];
        out.replicate = rep;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const std::uint64_t gen_stream = 2 * static_cast<std::uint64_t>(rep);
            GpSample gs = config.fix_mean
                              ? gp_sample_with_mean(config.n, grid, config.gp, shared_mean,
                                                    config.seed, gen_stream)
                              : gp_sample(config.n, grid, config.gp, config.seed, gen_stream);
            MissingSpec spec;
            spec.mechanism = config.mechanism;
            spec.c_percent = cell.c;
            spec.p_percent = cell.p;
            spec.m = cell.m;
            spec.seed = config.seed;
            const FunctionalSample corrupted = apply_missing(gs.sample, spec, gen_stream + 1);
            const SampleReconstruction recon = reconstruct_sample(corrupted, rc);
            out.mse = mse_missing(gs.sample, recon, config.per_curve_mse);
            out.theta = recon.theta;
            double cov = 0.0;
            for (const auto& r : recon.results) cov += r.coverage_fraction;
            out.mean_coverage =
                recon.results.empty() ? 1.0 : cov / static_cast<double>(recon.results.size());
            out.status = "ok";
        } catch (const std::exception& e) {
            out.mse = std::nullopt;
            out.status = e.what();
        }
        out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    for (CellResult& cell : result.cells) {
        std::vector<double> mses;
        double cov = 0.0;
        std::size_t ok_count = 0;
        for (const ReplicateOutcome& r : cell.replicates) {
            cell.seconds += r.seconds;
            if (r.status != "ok") {
                ++cell.failed;
                continue;
            }
            ++ok_count;
            cov += r.mean_coverage;
            if (r.mse) mses.push_back(*r.mse);
        }
        if (!mses.empty()) cell.median_mse = exact_median(std::move(mses));
        cell.mean_coverage = ok_count ? cov / static_cast<double>(ok_count) : 0.0;
        cell.flagged = 10 * cell.failed > cell.replicates.size();
    }
    result.total_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return result;
}

namespace {

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

std::string opt_value(const std::optional<double>& v) {
    return v ? format_value(*v) : "NA";
}

}  // namespace

void write_results_csv(std::ostream& out, const BenchResult& result) {
    out << "mechanism,c,p,m,replicates,failed,flagged,median_mse,mean_coverage\n";
    for (const CellResult& cell : result.cells) {
        out << to_string(result.config.mechanism) << ',' << format_value(cell.c) << ','
            << format_value(cell.p) << ',' << cell.m << ',' << cell.replicates.size() << ','
            << cell.failed << ',' << (cell.flagged ? 1 : 0) << ',' << opt_value(cell.median_mse)
            << ',' << format_value(cell.mean_coverage) << '\n';
    }
}

void write_replicates_csv(std::ostream& out, const BenchResult& result) {
    out << "mechanism,c,p,m,replicate,mse,mean_coverage,theta,status\n";
    for (const CellResult& cell : result.cells) {
        for (const ReplicateOutcome& r : cell.replicates) {
            out << to_string(result.config.mechanism) << ',' << format_value(cell.c) << ','
                << format_value(cell.p) << ',' << cell.m << ',' << r.replicate << ','
                << opt_value(r.mse) << ',' << format_value(r.mean_coverage) << ','
                << format_value(r.theta) << ',' << csv_quote(r.status) << '\n';
        }
    }
}

std::string format_table(const BenchResult& result) {
    // Rows keyed by (depth kind, mechanism, m); columns by (c, p).
    std::ostringstream out;
    std::vector<std::pair<double, double>> cols;
    for (const CellResult& cell : result.cells) {
        const auto cp = std::make_pair(cell.c, cell.p);
        if (std::find(cols.begin(), cols.end(), cp) == cols.end()) cols.push_back(cp);
    }
    std::vector<std::size_t> m_rows;
    for (const CellResult& cell : result.cells)
        if (std::find(m_rows.begin(), m_rows.end(), cell.m) == m_rows.end())
            m_rows.push_back(cell.m);

    out << "median MSE (" << to_string(result.config.mechanism) << " missingness, "
        << result.config.replicates << " replicates)\n";
    out << "method";
    char buf[64];
    for (const auto& [c, p] : cols) {
        std::snprintf(buf, sizeof(buf), "\tc=%g p=%g", c, p);
        out << buf;
    }
    out << '\n';
    for (std::size_t m : m_rows) {
        out << "poifd-" << to_string(result.config.kind);
        if (result.config.mechanism == MissingMechanism::RandomIntervals) out << " m=" << m;
        for (const auto& [c, p] : cols) {
            const CellResult* found = nullptr;
            for (const CellResult& cell : result.cells)
                if (cell.c == c && cell.p == p && cell.m == m) found = &cell;
            if (found && found->median_mse && !found->flagged) {
                std::snprintf(buf, sizeof(buf), "\t%.3f", *found->median_mse);
                out << buf;
            } else {
                out << "\tNA";
            }
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace fdrecon
