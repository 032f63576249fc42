#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gak {

/// A variable-length sequence of points in R^d, stored densely row-major.
///
/// Construction validates the shape (n >= 1, d >= 1, values.size() == n*d)
/// and rejects non-finite coordinates; every DP downstream silently
/// corrupts on NaN, so they are stopped here.
class TimeSeries {
public:
    TimeSeries(std::size_t dim, std::vector<double> values);

    /// Builds from one vector per point. All points must share a dimension.
    static TimeSeries from_points(const std::vector<std::vector<double>>& points);

    std::size_t length() const noexcept { return values_.size() / dim_; }
    std::size_t dim() const noexcept { return dim_; }

    /// 0-based point access.
    std::span<const double> point(std::size_t i) const noexcept {
        return {values_.data() + i * dim_, dim_};
    }

    const std::vector<double>& values() const noexcept { return values_; }

    friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

private:
    std::size_t dim_;
    std::vector<double> values_;
};

struct LabeledItem {
    std::string id;
    std::string label;
    TimeSeries series;

    friend bool operator==(const LabeledItem&, const LabeledItem&) = default;
};

/// Ordered collection of labeled series sharing one dimension, with unique ids.
class LabeledDataset {
public:
    explicit LabeledDataset(std::vector<LabeledItem> items);

    std::size_t size() const noexcept { return items_.size(); }
    bool empty() const noexcept { return items_.empty(); }
    std::size_t dim() const noexcept { return dim_; }

    const LabeledItem& operator[](std::size_t i) const { return items_[i]; }
    const std::vector<LabeledItem>& items() const noexcept { return items_; }
    auto begin() const noexcept { return items_.begin(); }
    auto end() const noexcept { return items_.end(); }

    /// Distinct labels, sorted.
    std::vector<std::string> labels() const;
    std::vector<std::string> ids() const;

    /// Index of the item with this id, if any.
    std::optional<std::size_t> find(const std::string& id) const;

    /// Sub-dataset made of the given item indices, in that order.
    LabeledDataset subset(std::span<const std::size_t> indices) const;

    friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;

private:
    std::vector<LabeledItem> items_;
    std::size_t dim_ = 0;
};

enum class DatasetFormat { jsonl, csv_long };

/// Format implied by the file extension (.jsonl / .csv).
DatasetFormat format_from_extension(const std::filesystem::path& path);

LabeledDataset load_dataset(const std::filesystem::path& path,
                            std::optional<DatasetFormat> format = std::nullopt);
void write_dataset(const std::filesystem::path& path, const LabeledDataset& ds,
                   std::optional<DatasetFormat> format = std::nullopt);

// Stream-level variants; `source` names the input in parse errors.
LabeledDataset parse_jsonl(std::istream& in, const std::string& source = "<stream>");
LabeledDataset parse_csv_long(std::istream& in, const std::string& source = "<stream>");
void write_jsonl(std::ostream& out, const LabeledDataset& ds);
void write_csv_long(std::ostream& out, const LabeledDataset& ds);

struct SynthSpec {
    std::size_t num_classes = 3;
    std::size_t per_class = 40;
    std::size_t dim = 2;
    std::size_t base_length = 50;
    double length_jitter = 0.2;  // [0, 1)
    double noise_sigma = 0.1;    // >= 0
    double warp_strength = 0.2;  // [0, 1)
    std::uint64_t seed = 0;

    void validate() const;
};

/// Warped, noisy samples of one smooth prototype per class. Pure function of
/// the spec: the same spec yields a bit-identical dataset.
LabeledDataset generate_synthetic(const SynthSpec& spec);

/// Noise-free prototype of class `cls`, channel `channel`, at time t in [0,1].
double synthetic_prototype(std::size_t cls, std::size_t channel, double t);

/// Stratified split. Each label sends round(test_fraction * count) items to
/// the test side, clamped so both sides keep at least one. Item order within
/// each side follows the input order.
std::pair<LabeledDataset, LabeledDataset> split_train_test(const LabeledDataset& ds,
                                                           double test_fraction,
                                                           std::uint64_t seed);

}  // namespace gak
