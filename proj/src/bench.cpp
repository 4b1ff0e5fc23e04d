#include "otx/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <thread>
#include <tuple>

#include "otx/io.hpp"
#include "otx/rng.hpp"

namespace otx::bench {

namespace {

// Stream labels for rng::derive so pair and image seeds never collide.
constexpr std::uint64_t synthetic_stream = 0x53594e;   // "SYN"
constexpr std::uint64_t idx_stream = 0x494458;         // "IDX"
constexpr std::uint64_t solver_stream = 0x534f4c;      // "SOL"

std::uint32_t read_be32(const std::uint8_t* p)
{
    return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
}

double median_of(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

} // namespace

GroundMetric parse_metric(std::string_view name)
{
    if (name == "l1") return GroundMetric::L1;
    if (name == "l2") return GroundMetric::L2;
    if (name == "sql2") return GroundMetric::SqL2;
    throw Error(Errc::InvalidArgument, "unknown metric '" + std::string(name) + "' (expected l1|l2|sql2)");
}

CostMatrix grid_cost(std::size_t rows, std::size_t cols, GroundMetric metric)
{
    const auto n = static_cast<Eigen::Index>(rows * cols);
    Matrix c(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        const double ar = static_cast<double>(static_cast<std::size_t>(a) / cols);
        const double ac = static_cast<double>(static_cast<std::size_t>(a) % cols);
        for (Eigen::Index b = 0; b < n; ++b) {
            const double dr = ar - static_cast<double>(static_cast<std::size_t>(b) / cols);
            const double dc = ac - static_cast<double>(static_cast<std::size_t>(b) % cols);
            switch (metric) {
                case GroundMetric::L1: c(a, b) = std::abs(dr) + std::abs(dc); break;
                case GroundMetric::L2: c(a, b) = std::sqrt(dr * dr + dc * dc); break;
                case GroundMetric::SqL2: c(a, b) = dr * dr + dc * dc; break;
            }
        }
    }
    const double top = c.maxCoeff();
    if (top > 0.0) c /= top;
    return CostMatrix(std::move(c));
}

std::size_t foreground_side(const SyntheticImageSpec& spec)
{
    return static_cast<std::size_t>(std::lround(static_cast<double>(spec.side) * std::sqrt(spec.fg_fraction)));
}

Vector synthetic_image(const SyntheticImageSpec& spec, std::uint64_t stream)
{
    if (spec.side < 2) throw Error(Errc::InvalidArgument, "image side must be >= 2");
    if (!(spec.fg_fraction > 0.0 && spec.fg_fraction < 1.0)) {
        throw Error(Errc::InvalidArgument, "foreground fraction must lie in (0, 1)");
    }
    std::mt19937_64 gen(rng::derive(spec.seed, {synthetic_stream, stream}));
    std::uniform_real_distribution<double> bg(spec.bg_lo, spec.bg_hi);
    std::uniform_real_distribution<double> fg(spec.fg_lo, spec.fg_hi);

    const std::size_t side = spec.side;
    const std::size_t square = std::min(foreground_side(spec), side);
    Vector img(static_cast<Eigen::Index>(side * side));
    for (Eigen::Index i = 0; i < img.size(); ++i) img[i] = bg(gen);

    std::uniform_int_distribution<std::size_t> corner(0, side - square);
    const std::size_t top = corner(gen);
    const std::size_t left = corner(gen);
    for (std::size_t r = top; r < top + square; ++r) {
        for (std::size_t c = left; c < left + square; ++c) img[static_cast<Eigen::Index>(r * side + c)] = fg(gen);
    }
    return img;
}

ImagePair generate_synthetic_pair(const SyntheticImageSpec& spec, GroundMetric metric)
{
    return {make_histogram(synthetic_image(spec, 0)), make_histogram(synthetic_image(spec, 1)),
            grid_cost(spec.side, spec.side, metric)};
}

IdxImages read_idx(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() < 4) throw Error(Errc::TruncatedFile, path.string() + ": missing magic number");
    if (read_be32(bytes.data()) != 0x00000803u) throw Error(Errc::BadMagic, path.string() + ": not an IDX3 ubyte file");
    if (bytes.size() < 16) throw Error(Errc::TruncatedFile, path.string() + ": truncated header");

    IdxImages out;
    out.count = read_be32(bytes.data() + 4);
    out.rows = read_be32(bytes.data() + 8);
    out.cols = read_be32(bytes.data() + 12);
    const std::size_t need = out.count * out.rows * out.cols;
    if (bytes.size() - 16 < need) throw Error(Errc::TruncatedFile, path.string() + ": pixel data truncated");
    out.pixels.assign(bytes.begin() + 16, bytes.begin() + 16 + static_cast<std::ptrdiff_t>(need));
    return out;
}

Histogram idx_histogram(const IdxImages& images, std::size_t index, std::optional<std::size_t> resize)
{
    if (index >= images.count) {
        throw Error(Errc::IndexOutOfRange, "image " + std::to_string(index) + " of " + std::to_string(images.count));
    }
    const std::size_t rows = images.rows;
    const std::size_t cols = images.cols;
    const std::uint8_t* px = images.pixels.data() + index * rows * cols;

    Vector v;
    if (resize && (*resize != rows || *resize != cols)) {
        const std::size_t s = *resize;
        if (s == 0 || s > rows || s > cols) throw Error(Errc::InvalidArgument, "resize must lie in [1, image side]");
        v.resize(static_cast<Eigen::Index>(s * s));
        for (std::size_t a = 0; a < s; ++a) {
            const std::size_t r0 = a * rows / s;
            const std::size_t r1 = (a + 1) * rows / s;
            for (std::size_t b = 0; b < s; ++b) {
                const std::size_t c0 = b * cols / s;
                const std::size_t c1 = (b + 1) * cols / s;
                double sum = 0.0;
                for (std::size_t r = r0; r < r1; ++r) {
                    for (std::size_t c = c0; c < c1; ++c) sum += px[r * cols + c];
                }
                v[static_cast<Eigen::Index>(a * s + b)] = sum / static_cast<double>((r1 - r0) * (c1 - c0));
            }
        }
    } else {
        v.resize(static_cast<Eigen::Index>(rows * cols));
        for (std::size_t i = 0; i < rows * cols; ++i) v[static_cast<Eigen::Index>(i)] = px[i];
    }
    v.array() += 1e-6;
    return make_histogram(v);
}

std::vector<Histogram> load_idx_images(const std::filesystem::path& path, const std::vector<std::size_t>& indices,
                                       std::optional<std::size_t> resize)
{
    const IdxImages images = read_idx(path);
    std::vector<Histogram> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) out.push_back(idx_histogram(images, i, resize));
    return out;
}

double competitive_ratio(double d1, double d2)
{
    if (!(d1 > 0.0) || !(d2 > 0.0)) throw Error(Errc::NonPositiveDistance, "distances must be positive");
    return std::log(d1 / d2);
}

std::vector<ImagePair> synthetic_pairs(std::size_t count, SyntheticImageSpec spec, std::uint64_t seed,
                                       GroundMetric metric)
{
    std::vector<ImagePair> pairs;
    pairs.reserve(count);
    const CostMatrix cost = grid_cost(spec.side, spec.side, metric);
    for (std::size_t p = 0; p < count; ++p) {
        spec.seed = rng::derive(seed, {synthetic_stream, p});
        pairs.push_back({make_histogram(synthetic_image(spec, 0)), make_histogram(synthetic_image(spec, 1)), cost});
    }
    return pairs;
}

std::vector<ImagePair> idx_pairs(const IdxImages& images, std::size_t count, std::uint64_t seed, GroundMetric metric,
                                 std::optional<std::size_t> resize)
{
    if (images.count == 0) throw Error(Errc::EmptyVector, "IDX file holds no images");
    const std::size_t side_r = resize.value_or(images.rows);
    const std::size_t side_c = resize.value_or(images.cols);
    const CostMatrix cost = grid_cost(side_r, side_c, metric);
    std::vector<ImagePair> pairs;
    pairs.reserve(count);
    for (std::size_t p = 0; p < count; ++p) {
        const std::uint64_t s = rng::derive(seed, {idx_stream, p});
        const auto a = static_cast<std::size_t>(rng::uniform_index(s, 0, images.count));
        const auto b = static_cast<std::size_t>(rng::uniform_index(s, 1, images.count));
        pairs.push_back({idx_histogram(images, a, resize), idx_histogram(images, b, resize), cost});
    }
    return pairs;
}

namespace {

struct Cell
{
    std::size_t pair = 0;
    std::size_t algo = 0;
    std::size_t param = 0;
};

std::vector<ExperimentRecord> run_cell(const ImagePair& pair, const Cell& cell, const ExperimentConfig& cfg)
{
    const Algorithm algorithm = cfg.algorithms[cell.algo];
    const double param = cfg.params[cell.param];
    // Independent of the algorithm so a repeated algorithm reproduces its trace.
    const std::uint64_t seed = rng::derive(cfg.seed, {solver_stream, cell.pair, cell.param});

    SolveReport report{TransportPlan(Matrix::Zero(1, 1)), 0, 0.0, SolveStatus::Converged, {}};
    if (cfg.mode == ParamMode::Eta) {
        const RegularizedProblem prob(pair.cost, pair.r, pair.l, param);
        SolveOptions opts;
        opts.eps_prime = budget_tolerance;
        opts.max_iters = cfg.budget;
        opts.trace_every = cfg.trace_every;
        opts.seed = seed;
        opts.record_timing = cfg.record_timing;
        report = run_solver(prob, algorithm, opts);
    } else {
        ApproxConfig ac;
        ac.epsilon = param;
        ac.algorithm = algorithm;
        ac.seed = seed;
        ac.max_iters = cfg.budget;
        ac.trace_every = cfg.trace_every;
        ac.record_timing = cfg.record_timing;
        report = approximate_ot(pair.cost, pair.r, pair.l, ac).report;
    }

    std::vector<ExperimentRecord> out;
    out.reserve(report.trace.size());
    for (const auto& s : report.trace) {
        out.push_back({cell.pair, std::string(algorithm_name(algorithm)), param, s.iteration, s.violation, s.ot_value,
                       s.dual_value, s.wall_ms});
    }
    return out;
}

std::vector<RatioSummary> summarize(const std::vector<std::vector<ExperimentRecord>>& cell_records,
                                    const std::vector<Cell>& cells, std::size_t pair_count,
                                    const ExperimentConfig& cfg)
{
    // d_x by (pair, algo position, param position, iteration).
    std::map<std::tuple<std::size_t, std::size_t, std::size_t, std::uint64_t>, double> d;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        for (const auto& rec : cell_records[c]) d[{cells[c].pair, cells[c].algo, cells[c].param, rec.iteration}] = rec.d_x;
    }

    std::vector<RatioSummary> out;
    const std::size_t na = cfg.algorithms.size();
    for (std::size_t pi = 0; pi < cfg.params.size(); ++pi) {
        for (std::size_t a = 0; a < na; ++a) {
            for (std::size_t b = a + 1; b < na; ++b) {
                std::map<std::uint64_t, std::vector<double>> by_iter;
                for (std::size_t p = 0; p < pair_count; ++p) {
                    for (auto it = d.lower_bound({p, a, pi, 0}); it != d.end(); ++it) {
                        const auto& [key, da] = *it;
                        if (std::get<0>(key) != p || std::get<1>(key) != a || std::get<2>(key) != pi) break;
                        const auto other = d.find({p, b, pi, std::get<3>(key)});
                        if (other == d.end() || !(da > 0.0) || !(other->second > 0.0)) continue;
                        by_iter[std::get<3>(key)].push_back(competitive_ratio(da, other->second));
                    }
                }
                for (auto& [iter, ratios] : by_iter) {
                    RatioSummary s;
                    s.reference = std::string(algorithm_name(cfg.algorithms[a]));
                    s.other = std::string(algorithm_name(cfg.algorithms[b]));
                    s.param = cfg.params[pi];
                    s.iteration = iter;
                    s.pairs = ratios.size();
                    s.max = *std::max_element(ratios.begin(), ratios.end());
                    s.min = *std::min_element(ratios.begin(), ratios.end());
                    s.median = median_of(ratios);
                    out.push_back(s);
                }
            }
        }
    }
    return out;
}

} // namespace

ExperimentResult run_experiment(const std::vector<ImagePair>& pairs, const ExperimentConfig& cfg)
{
    if (pairs.empty() || cfg.algorithms.empty() || cfg.params.empty()) {
        throw Error(Errc::InvalidArgument, "need at least one pair, algorithm and parameter");
    }
    if (cfg.budget == 0) throw Error(Errc::InvalidArgument, "iteration budget must be positive");

    std::vector<Cell> cells;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
            for (std::size_t k = 0; k < cfg.params.size(); ++k) cells.push_back({p, a, k});
        }
    }

    std::vector<std::vector<ExperimentRecord>> cell_records(cells.size());
    std::vector<std::string> cell_errors(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t c = next++; c < cells.size(); c = next++) {
            try {
                cell_records[c] = run_cell(pairs[cells[c].pair], cells[c], cfg);
            } catch (const Error& e) {
                cell_errors[c] = e.what();
            }
        }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(cells.size())));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    ExperimentResult result;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        result.records.insert(result.records.end(), cell_records[c].begin(), cell_records[c].end());
        if (!cell_errors[c].empty()) {
            std::ostringstream msg;
            msg << "pair " << cells[c].pair << ' ' << algorithm_name(cfg.algorithms[cells[c].algo]) << " param "
                << io::format_real(cfg.params[cells[c].param]) << ": " << cell_errors[c];
            result.failures.push_back(msg.str());
        }
    }
    result.summary = summarize(cell_records, cells, pairs.size(), cfg);
    return result;
}

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records)
{
    out << records_header << '\n';
    for (const auto& r : records) {
        out << r.pair_id << ',' << r.algorithm << ',' << io::format_real(r.param) << ',' << r.iteration << ','
            << io::format_real(r.d_x) << ',' << io::format_real(r.ot_value) << ',' << io::format_real(r.dual_value)
            << ',' << io::format_real(r.wall_ms) << '\n';
    }
}

std::vector<ExperimentRecord> read_records_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != records_header) throw Error(Errc::ParseError, "missing records header");
    std::vector<ExperimentRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) f.push_back(field);
        if (f.size() != 8) throw Error(Errc::ParseError, "record row needs 8 fields: " + line);
        ExperimentRecord r;
        r.pair_id = std::stoull(f[0]);
        r.algorithm = f[1];
        r.param = io::parse_real(f[2]);
        r.iteration = std::stoull(f[3]);
        r.d_x = io::parse_real(f[4]);
        r.ot_value = io::parse_real(f[5]);
        r.dual_value = io::parse_real(f[6]);
        r.wall_ms = io::parse_real(f[7]);
        out.push_back(std::move(r));
    }
    return out;
}

void write_summary_csv(std::ostream& out, const std::vector<RatioSummary>& summary)
{
    out << summary_header << '\n';
    for (const auto& s : summary) {
        out << s.reference << ',' << s.other << ',' << io::format_real(s.param) << ',' << s.iteration << ','
            << s.pairs << ',' << io::format_real(s.max) << ',' << io::format_real(s.median) << ','
            << io::format_real(s.min) << '\n';
    }
}

} // namespace otx::bench
