#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "otx/pipeline.hpp"

namespace otx::bench {

enum class GroundMetric { L1, L2, SqL2 };

GroundMetric parse_metric(std::string_view name);

/// Pairwise pixel-grid distances, divided by the largest so ||C||_inf = 1.
CostMatrix grid_cost(std::size_t rows, std::size_t cols, GroundMetric metric);

struct SyntheticImageSpec
{
    std::size_t side = 20;
    double fg_fraction = 0.1;     // area fraction covered by the foreground square
    double bg_lo = 0.0;
    double bg_hi = 1.0;
    double fg_lo = 0.0;
    double fg_hi = 50.0;
    std::uint64_t seed = 0;
};

/// round(side * sqrt(fg_fraction)).
std::size_t foreground_side(const SyntheticImageSpec& spec);

/// Raw (unnormalized) intensities of one image, row-major. `stream` selects
/// an independent image for the same spec seed.
Vector synthetic_image(const SyntheticImageSpec& spec, std::uint64_t stream);

struct ImagePair
{
    Histogram r;
    Histogram l;
    CostMatrix cost;
};

ImagePair generate_synthetic_pair(const SyntheticImageSpec& spec, GroundMetric metric = GroundMetric::SqL2);

/// Contents of an IDX3 unsigned-byte image file (magic 0x00000803).
struct IdxImages
{
    std::size_t count = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> pixels;   // count * rows * cols, row-major per image
};

IdxImages read_idx(const std::filesystem::path& path);

/// Box-averages to resize x resize when set, adds 1e-6 to every pixel, normalizes.
Histogram idx_histogram(const IdxImages& images, std::size_t index, std::optional<std::size_t> resize = {});

std::vector<Histogram> load_idx_images(const std::filesystem::path& path, const std::vector<std::size_t>& indices,
                                       std::optional<std::size_t> resize = {});

/// ln(d1 / d2); positive when the second algorithm is closer to the polytope.
double competitive_ratio(double d1, double d2);

struct ExperimentRecord
{
    std::size_t pair_id = 0;
    std::string algorithm;
    double param = 0.0;
    std::uint64_t iteration = 0;
    double d_x = 0.0;
    double ot_value = 0.0;
    double dual_value = 0.0;
    double wall_ms = 0.0;

    bool operator==(const ExperimentRecord&) const = default;
};

enum class ParamMode { Eta, Epsilon };

struct ExperimentConfig
{
    std::vector<Algorithm> algorithms;
    std::vector<double> params;
    ParamMode mode = ParamMode::Eta;
    std::uint64_t seed = 0;
    std::uint64_t budget = 1000;
    std::uint64_t trace_every = 10;
    bool record_timing = false;
    unsigned threads = 1;
};

/// Competitive ratio statistics across pairs for one (reference, other, param, iteration).
struct RatioSummary
{
    std::string reference;
    std::string other;
    double param = 0.0;
    std::uint64_t iteration = 0;
    std::size_t pairs = 0;
    double max = 0.0;
    double median = 0.0;
    double min = 0.0;
};

struct ExperimentResult
{
    std::vector<ExperimentRecord> records;
    std::vector<RatioSummary> summary;
    std::vector<std::string> failures;    // one line per cell whose solver threw
};

/// Tolerance used in eta mode so runs consume the whole budget.
inline constexpr double budget_tolerance = 1e-12;

/// Every pair x algorithm x param cell. Eta mode solves the regularized problem
/// directly on (r, l); epsilon mode runs approximate_ot and records the inner
/// solver trace. Cells may run on `threads` workers; output order is always
/// (pair, algorithm position, param position, iteration).
ExperimentResult run_experiment(const std::vector<ImagePair>& pairs, const ExperimentConfig& cfg);

/// Synthetic pairs with per-pair seeds derived from `seed`.
std::vector<ImagePair> synthetic_pairs(std::size_t count, SyntheticImageSpec spec, std::uint64_t seed,
                                       GroundMetric metric = GroundMetric::SqL2);

/// Pairs of images drawn from an IDX file with per-pair seeds derived from `seed`.
std::vector<ImagePair> idx_pairs(const IdxImages& images, std::size_t count, std::uint64_t seed,
                                 GroundMetric metric = GroundMetric::SqL2,
                                 std::optional<std::size_t> resize = {});

inline constexpr const char* records_header = "pair_id,algorithm,param,iteration,d_x,ot_value,dual_value,wall_ms";
inline constexpr const char* summary_header = "reference,other,param,iteration,pairs,max,median,min";

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> read_records_csv(std::istream& in);
void write_summary_csv(std::ostream& out, const std::vector<RatioSummary>& summary);

} // namespace otx::bench
