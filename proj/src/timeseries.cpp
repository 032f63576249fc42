#include "gak/timeseries.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "gak/errors.hpp"

namespace gak {

namespace {

std::string format_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

bool parse_double(std::string_view text, double& out) {
    // from_chars rejects a leading '+', accept it for hand-written files.
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size();
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        fields.push_back(trim(line.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return fields;
}

}  // namespace

// ---------------------------------------------------------------------------
// TimeSeries

TimeSeries::TimeSeries(std::size_t dim, std::vector<double> values)
    : dim_(dim), values_(std::move(values)) {
    if (dim_ == 0) throw ValidationError("time series dimension must be >= 1");
    if (values_.empty()) throw ValidationError("empty sequence");
    if (values_.size() % dim_ != 0)
        throw ValidationError("value count " + std::to_string(values_.size()) +
                              " is not a multiple of dimension " + std::to_string(dim_));
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i]))
            throw ValidationError("non-finite coordinate at point " + std::to_string(i / dim_));
    }
}

TimeSeries TimeSeries::from_points(const std::vector<std::vector<double>>& points) {
    if (points.empty()) throw ValidationError("empty sequence");
    const std::size_t dim = points.front().size();
    std::vector<double> flat;
    flat.reserve(points.size() * dim);
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].size() != dim)
            throw DimensionMismatch("point " + std::to_string(i) + " has dimension " +
                                    std::to_string(points[i].size()) + ", expected " +
                                    std::to_string(dim));
        flat.insert(flat.end(), points[i].begin(), points[i].end());
    }
    return TimeSeries(dim, std::move(flat));
}

// ---------------------------------------------------------------------------
// LabeledDataset

LabeledDataset::LabeledDataset(std::vector<LabeledItem> items) : items_(std::move(items)) {
    std::unordered_set<std::string> seen;
    for (const auto& item : items_) {
        if (!seen.insert(item.id).second) throw ValidationError("duplicate id '" + item.id + "'");
        if (dim_ == 0) {
            dim_ = item.series.dim();
        } else if (item.series.dim() != dim_) {
            throw DimensionMismatch("series '" + item.id + "' has dimension " +
                                    std::to_string(item.series.dim()) + ", dataset has " +
                                    std::to_string(dim_));
        }
    }
}

std::vector<std::string> LabeledDataset::labels() const {
    std::set<std::string> s;
    for (const auto& item : items_) s.insert(item.label);
    return {s.begin(), s.end()};
}

std::vector<std::string> LabeledDataset::ids() const {
    std::vector<std::string> out;
    out.reserve(items_.size());
    for (const auto& item : items_) out.push_back(item.id);
    return out;
}

std::optional<std::size_t> LabeledDataset::find(const std::string& id) const {
    for (std::size_t i = 0; i < items_.size(); ++i)
        if (items_[i].id == id) return i;
    return std::nullopt;
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> indices) const {
    std::vector<LabeledItem> out;
    out.reserve(indices.size());
    for (auto i : indices) out.push_back(items_.at(i));
    return LabeledDataset(std::move(out));
}

// ---------------------------------------------------------------------------
// I/O

DatasetFormat format_from_extension(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".jsonl") return DatasetFormat::jsonl;
    if (ext == ".csv") return DatasetFormat::csv_long;
    throw ValidationError("cannot infer dataset format from extension '" + ext +
                          "' (expected .jsonl or .csv)");
}

LabeledDataset parse_jsonl(std::istream& in, const std::string& source) {
    std::vector<LabeledItem> items;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const std::string where = source + ":" + std::to_string(lineno);
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(where, std::string("malformed JSON: ") + e.what());
        }
        if (!rec.is_object()) throw ParseError(where, "record is not an object");
        for (const char* key : {"id", "label", "values"})
            if (!rec.contains(key)) throw ParseError(where, std::string("missing field '") + key + "'");
        if (!rec["id"].is_string() || !rec["label"].is_string())
            throw ParseError(where, "'id' and 'label' must be strings");
        const auto& vals = rec["values"];
        if (!vals.is_array()) throw ParseError(where, "'values' must be an array");
        std::string id = rec["id"].get<std::string>();
        if (vals.empty()) throw ValidationError("empty sequence for id '" + id + "'");

        std::vector<double> flat;
        std::size_t dim = 0;
        for (std::size_t t = 0; t < vals.size(); ++t) {
            const auto& pt = vals[t];
            if (!pt.is_array() || pt.empty())
                throw ParseError(where, "point " + std::to_string(t) + " is not a non-empty array");
            if (t == 0) dim = pt.size();
            if (pt.size() != dim)
                throw DimensionMismatch("series '" + id + "' point " + std::to_string(t) +
                                        " has dimension " + std::to_string(pt.size()) +
                                        ", expected " + std::to_string(dim));
            for (const auto& v : pt) {
                if (!v.is_number()) throw ParseError(where, "non-numeric coordinate");
                flat.push_back(v.get<double>());
            }
        }
        try {
            items.push_back({std::move(id), rec["label"].get<std::string>(),
                             TimeSeries(dim, std::move(flat))});
        } catch (const ValidationError& e) {
            throw ParseError(where, e.what());
        }
    }
    return LabeledDataset(std::move(items));
}

LabeledDataset parse_csv_long(std::istream& in, const std::string& source) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(source + ":1", "missing header");
    const auto header = split_commas(line);
    if (header.size() < 4 || header[0] != "id" || header[1] != "label" || header[2] != "t")
        throw ParseError(source + ":1", "header must be id,label,t,f1,...,fd");
    const std::size_t dim = header.size() - 3;

    struct Pending {
        std::string id, label;
        std::vector<double> flat;
        long next_t = 0;
    };
    std::vector<LabeledItem> items;
    std::optional<Pending> cur;
    std::unordered_set<std::string> finished;

    auto flush = [&] {
        if (cur) {
            finished.insert(cur->id);
            items.push_back({cur->id, cur->label, TimeSeries(dim, std::move(cur->flat))});
            cur.reset();
        }
    };

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const std::string where = source + ":" + std::to_string(lineno);
        const auto fields = split_commas(line);
        if (fields.size() != header.size()) {
            if (fields.size() > 3)
                throw DimensionMismatch("series '" + std::string(fields[0]) + "' row at " + where +
                                        " has " + std::to_string(fields.size() - 3) +
                                        " features, expected " + std::to_string(dim));
            throw ParseError(where, "expected " + std::to_string(header.size()) + " fields");
        }
        std::string id(fields[0]);
        long t = 0;
        auto [tp, tec] = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), t);
        if (tec != std::errc() || tp != fields[2].data() + fields[2].size())
            throw ParseError(where, "time index is not an integer");

        if (!cur || cur->id != id) {
            flush();
            if (finished.count(id))
                throw ParseError(where, "rows for id '" + id + "' are not contiguous");
            cur = Pending{id, std::string(fields[1]), {}, 0};
        } else if (cur->label != fields[1]) {
            throw ParseError(where, "label changes within id '" + id + "'");
        }
        if (t != cur->next_t)
            throw ParseError(where, "expected t=" + std::to_string(cur->next_t) + " for id '" + id +
                                        "', got " + std::to_string(t));
        ++cur->next_t;
        for (std::size_t k = 0; k < dim; ++k) {
            double v = 0;
            if (!parse_double(fields[3 + k], v))
                throw ParseError(where, "bad number '" + std::string(fields[3 + k]) + "'");
            if (!std::isfinite(v)) throw ParseError(where, "non-finite coordinate");
            cur->flat.push_back(v);
        }
    }
    flush();
    return LabeledDataset(std::move(items));
}

void write_jsonl(std::ostream& out, const LabeledDataset& ds) {
    for (const auto& item : ds) {
        nlohmann::json values = nlohmann::json::array();
        const auto& s = item.series;
        for (std::size_t t = 0; t < s.length(); ++t) {
            auto p = s.point(t);
            values.push_back(std::vector<double>(p.begin(), p.end()));
        }
        nlohmann::json rec = {{"id", item.id}, {"label", item.label}, {"values", std::move(values)}};
        out << rec.dump() << '\n';
    }
}

void write_csv_long(std::ostream& out, const LabeledDataset& ds) {
    out << "id,label,t";
    for (std::size_t k = 0; k < ds.dim(); ++k) out << ",f" << (k + 1);
    out << '\n';
    for (const auto& item : ds) {
        for (const auto* field : {&item.id, &item.label})
            if (field->find_first_of(",\n\r") != std::string::npos)
                throw ValidationError("id/label '" + *field + "' cannot be written as CSV");
        const auto& s = item.series;
        for (std::size_t t = 0; t < s.length(); ++t) {
            out << item.id << ',' << item.label << ',' << t;
            for (double v : s.point(t)) out << ',' << format_double(v);
            out << '\n';
        }
    }
}

LabeledDataset load_dataset(const std::filesystem::path& path, std::optional<DatasetFormat> format) {
    const auto fmt = format ? *format : format_from_extension(path);
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    return fmt == DatasetFormat::jsonl ? parse_jsonl(in, path.string())
                                       : parse_csv_long(in, path.string());
}

void write_dataset(const std::filesystem::path& path, const LabeledDataset& ds,
                   std::optional<DatasetFormat> format) {
    const auto fmt = format ? *format : format_from_extension(path);
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    if (fmt == DatasetFormat::jsonl)
        write_jsonl(out, ds);
    else
        write_csv_long(out, ds);
}

// ---------------------------------------------------------------------------
// Synthesis

void SynthSpec::validate() const {
    if (num_classes == 0) throw ValidationError("num_classes must be positive");
    if (per_class == 0) throw ValidationError("per_class must be positive");
    if (dim == 0) throw ValidationError("dim must be positive");
    if (base_length == 0) throw ValidationError("base_length must be positive");
    if (!(length_jitter >= 0.0 && length_jitter < 1.0))
        throw ValidationError("length_jitter must lie in [0, 1)");
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
        throw ValidationError("noise_sigma must be a nonnegative finite number");
    if (!(warp_strength >= 0.0 && warp_strength < 1.0))
        throw ValidationError("warp_strength must lie in [0, 1)");
}

double synthetic_prototype(std::size_t cls, std::size_t channel, double t) {
    using std::numbers::pi;
    const double f = 1.0 + 0.5 * static_cast<double>(cls);
    // Channels beyond the first are quarter-period phase shifts of channel 0.
    const double shift = 0.5 * pi * static_cast<double>(channel);
    return std::sin(2.0 * pi * f * t + shift) +
           0.5 * std::sin(2.0 * pi * 2.0 * f * t + static_cast<double>(cls) + shift);
}

LabeledDataset generate_synthetic(const SynthSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const double base = static_cast<double>(spec.base_length);
    const auto lo = std::max<long>(1, static_cast<long>(std::ceil(base * (1.0 - spec.length_jitter) - 1e-9)));
    const auto hi = std::max<long>(lo, static_cast<long>(std::floor(base * (1.0 + spec.length_jitter) + 1e-9)));
    std::uniform_int_distribution<long> length_dist(lo, hi);

    std::vector<LabeledItem> items;
    items.reserve(spec.num_classes * spec.per_class);
    for (std::size_t c = 0; c < spec.num_classes; ++c) {
        for (std::size_t r = 0; r < spec.per_class; ++r) {
            const auto len = static_cast<std::size_t>(length_dist(rng));

            // Monotone warp: normalized cumulative sum of positive increments.
            std::vector<double> times(len, 0.0);
            double total = 0.0;
            for (std::size_t i = 1; i < len; ++i) {
                total += 1.0 + spec.warp_strength * unit(rng);
                times[i] = total;
            }
            if (total > 0.0)
                for (auto& t : times) t /= total;

            std::vector<double> flat(len * spec.dim);
            for (std::size_t i = 0; i < len; ++i) {
                for (std::size_t k = 0; k < spec.dim; ++k) {
                    double v = synthetic_prototype(c, k, times[i]);
                    if (spec.noise_sigma > 0.0) v += spec.noise_sigma * gauss(rng);
                    flat[i * spec.dim + k] = v;
                }
            }
            items.push_back({"c" + std::to_string(c) + "_" + std::to_string(r),
                             "class" + std::to_string(c), TimeSeries(spec.dim, std::move(flat))});
        }
    }
    return LabeledDataset(std::move(items));
}

std::pair<LabeledDataset, LabeledDataset> split_train_test(const LabeledDataset& ds,
                                                           double test_fraction,
                                                           std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw ValidationError("test_fraction must lie in (0, 1)");
    std::map<std::string, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < ds.size(); ++i) by_label[ds[i].label].push_back(i);

    std::mt19937_64 rng(seed);
    std::vector<bool> is_test(ds.size(), false);
    for (auto& [label, idx] : by_label) {
        if (idx.size() < 2)
            throw ValidationError("label '" + label + "' has fewer than 2 items");
        std::shuffle(idx.begin(), idx.end(), rng);
        auto n_test = static_cast<std::size_t>(std::lround(test_fraction * static_cast<double>(idx.size())));
        n_test = std::clamp<std::size_t>(n_test, 1, idx.size() - 1);
        for (std::size_t k = 0; k < n_test; ++k) is_test[idx[k]] = true;
    }
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < ds.size(); ++i) (is_test[i] ? test : train).push_back(i);
    return {ds.subset(train), ds.subset(test)};
}

}  // namespace gak
