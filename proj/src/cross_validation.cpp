#include "gak/cross_validation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "gak/errors.hpp"

namespace gak {

std::vector<double> default_c_grid() {
    std::vector<double> grid;
    for (int e = -2; e <= 6; ++e) grid.push_back(std::pow(10.0, e));
    return grid;
}

double median_point_distance(const LabeledDataset& ds, std::size_t max_points) {
    std::vector<std::span<const double>> points;
    for (const auto& item : ds)
        for (std::size_t t = 0; t < item.series.length(); ++t) points.push_back(item.series.point(t));
    if (points.size() < 2) throw ValidationError("need at least two points for a median distance");
    const std::size_t stride = (points.size() + max_points - 1) / max_points;
    std::vector<std::span<const double>> sample;
    for (std::size_t k = 0; k < points.size(); k += stride) sample.push_back(points[k]);

    std::vector<double> dist;
    dist.reserve(sample.size() * (sample.size() - 1) / 2);
    for (std::size_t a = 0; a < sample.size(); ++a)
        for (std::size_t b = a + 1; b < sample.size(); ++b)
            dist.push_back(std::sqrt(squared_distance(sample[a], sample[b])));
    auto mid = dist.begin() + static_cast<std::ptrdiff_t>(dist.size() / 2);
    std::nth_element(dist.begin(), mid, dist.end());
    return *mid;
}

std::vector<double> default_sigma_grid(const LabeledDataset& ds) {
    const double med = median_point_distance(ds);
    std::vector<double> grid;
    for (double f : {0.25, 0.5, 1.0, 2.0, 4.0}) grid.push_back(med * f);
    return grid;
}

void CvConfig::validate() const {
    if (folds < 2) throw ValidationError("folds must be >= 2");
    if (repeats < 1) throw ValidationError("repeats must be >= 1");
    if (sigma_grid.empty() || c_grid.empty()) throw ValidationError("grids must be non-empty");
    for (double s : sigma_grid)
        if (!(s > 0.0) || !std::isfinite(s)) throw ValidationError("sigma grid values must be positive");
    for (double c : c_grid)
        if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("C grid values must be positive");
}

std::vector<std::vector<std::size_t>> stratified_folds(const LabeledDataset& ds, std::size_t folds,
                                                       std::size_t repeats, std::uint64_t seed) {
    std::map<std::string, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < ds.size(); ++i) by_label[ds[i].label].push_back(i);
    for (const auto& [label, idx] : by_label)
        if (idx.size() < folds)
            throw ValidationError("label '" + label + "' has " + std::to_string(idx.size()) +
                                  " items, fewer than " + std::to_string(folds) + " folds");

    std::mt19937_64 rng(seed);
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t r = 0; r < repeats; ++r) {
        std::vector<std::size_t> assign(ds.size());
        // Dealing shuffled items round-robin; the starting fold rotates per
        // label so fold sizes stay balanced overall.
        std::size_t offset = 0;
        for (auto [label, idx] : by_label) {
            std::shuffle(idx.begin(), idx.end(), rng);
            for (std::size_t k = 0; k < idx.size(); ++k) assign[idx[k]] = (offset + k) % folds;
            offset = (offset + idx.size()) % folds;
        }
        out.push_back(std::move(assign));
    }
    return out;
}

double error_rate(std::span<const std::string> predicted, std::span<const std::string> truth) {
    if (predicted.size() != truth.size()) throw ValidationError("prediction count mismatch");
    if (truth.empty()) return 0.0;
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) wrong += predicted[i] != truth[i];
    return static_cast<double>(wrong) / static_cast<double>(truth.size());
}

CvReport cross_validate(const LabeledDataset& ds, const KernelSelector& kernel, const CvConfig& cfg) {
    cfg.validate();
    const auto assignments = stratified_folds(ds, cfg.folds, cfg.repeats, cfg.seed);
    std::vector<std::string> labels;
    for (const auto& item : ds) labels.push_back(item.label);
    const auto ids = ds.ids();

    const std::vector<double> sigmas =
        kernel.uses_sigma() ? cfg.sigma_grid : std::vector<double>{std::numeric_limits<double>::quiet_NaN()};
    const std::size_t n_folds = cfg.folds * cfg.repeats;
    const std::size_t n_c = cfg.c_grid.size();

    CvReport report{kernel.family, cfg.folds, cfg.repeats, {}};
    for (double sigma : sigmas) {
        const KernelSelector k = kernel.uses_sigma() ? kernel.with_sigma(sigma) : kernel;
        const Matrix full = build_gram(ds, k, cfg.workers).values;

        // errors[fold * n_c + c]
        std::vector<double> errors(n_folds * n_c, 0.0);
        std::vector<double> shifts(n_folds, 0.0);
        std::vector<std::size_t> nonconv(n_folds * n_c, 0);

        detail::parallel_for(n_folds, cfg.workers, [&](std::size_t f) {
            const auto& assign = assignments[f / cfg.folds];
            const std::size_t fold = f % cfg.folds;
            std::vector<std::size_t> tr, te;
            for (std::size_t i = 0; i < ds.size(); ++i) (assign[i] == fold ? te : tr).push_back(i);

            Regularization reg;
            const Matrix train_gram = regularize(full.submatrix(tr, tr), &reg);
            const Matrix cross = full.submatrix(tr, te);
            shifts[f] = reg.shift_applied;

            std::vector<std::string> tr_labels, tr_ids, te_labels;
            for (auto i : tr) {
                tr_labels.push_back(labels[i]);
                tr_ids.push_back(ids[i]);
            }
            for (auto i : te) te_labels.push_back(labels[i]);

            SmoOptions opts = cfg.smo;
            opts.allow_nonconverged = true;
            for (std::size_t c = 0; c < n_c; ++c) {
                const auto model = train_ova(train_gram, tr_labels, tr_ids, cfg.c_grid[c], opts);
                for (const auto& b : model.binaries) nonconv[f * n_c + c] += !b.converged;
                errors[f * n_c + c] = error_rate(predict(model, cross), te_labels);
            }
        });

        for (std::size_t c = 0; c < n_c; ++c) {
            CvEntry e;
            e.sigma = sigma;
            e.C = cfg.c_grid[c];
            for (std::size_t f = 0; f < n_folds; ++f) {
                e.fold_errors.push_back(errors[f * n_c + c]);
                e.nonconverged += nonconv[f * n_c + c];
            }
            e.fold_shifts = shifts;
            e.mean_error = std::accumulate(e.fold_errors.begin(), e.fold_errors.end(), 0.0) /
                           static_cast<double>(n_folds);
            double ss = 0.0;
            for (double v : e.fold_errors) ss += (v - e.mean_error) * (v - e.mean_error);
            e.std_error = n_folds > 1 ? std::sqrt(ss / static_cast<double>(n_folds - 1)) : 0.0;
            report.entries.push_back(std::move(e));
        }
    }
    return report;
}

GridChoice grid_select(const CvReport& report) {
    if (report.entries.empty()) throw ValidationError("empty CV report");
    const CvEntry* best = nullptr;
    auto sigma_less = [](double a, double b) {
        // NaN (no width) compares equal to itself.
        if (std::isnan(a) || std::isnan(b)) return false;
        return a < b;
    };
    for (const auto& e : report.entries) {
        if (!best || e.mean_error < best->mean_error ||
            (e.mean_error == best->mean_error &&
             (sigma_less(e.sigma, best->sigma) ||
              (!sigma_less(best->sigma, e.sigma) && e.C < best->C))))
            best = &e;
    }
    return {best->sigma, best->C, best->mean_error};
}

ProtocolResult run_protocol(const LabeledDataset& train, const LabeledDataset& test,
                            const KernelSelector& kernel, const CvConfig& cfg, bool run_cv) {
    ProtocolResult result;
    if (run_cv) {
        result.cv = cross_validate(train, kernel, cfg);
        const auto choice = grid_select(*result.cv);
        result.sigma = choice.sigma;
        result.C = choice.C;
    } else {
        if (cfg.sigma_grid.size() != 1 || cfg.c_grid.size() != 1)
            throw ValidationError("without cross-validation exactly one sigma and one C are required");
        result.sigma = kernel.uses_sigma() ? cfg.sigma_grid.front() : std::numeric_limits<double>::quiet_NaN();
        result.C = cfg.c_grid.front();
    }

    const KernelSelector k = kernel.uses_sigma() ? kernel.with_sigma(result.sigma) : kernel;
    const GramMatrix gram = regularize(build_gram(train, k, cfg.workers));
    result.train_regularization = *gram.regularization;
    std::vector<std::string> train_labels, test_labels;
    for (const auto& item : train) train_labels.push_back(item.label);
    for (const auto& item : test) test_labels.push_back(item.label);

    const auto model = train_ova(gram, train_labels, result.C, cfg.smo);
    const CrossGram cross = build_cross_gram(train, test, k, cfg.workers);
    result.predictions = predict(model, cross);
    result.test_error = error_rate(result.predictions, test_labels);
    return result;
}

namespace {

nlohmann::json number_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

}  // namespace

nlohmann::json to_json(const CvReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& e : report.entries) {
        rows.push_back({{"sigma", number_or_null(e.sigma)},
                        {"C", e.C},
                        {"mean_error", e.mean_error},
                        {"std_error", e.std_error},
                        {"nonconverged", e.nonconverged},
                        {"fold_shifts", e.fold_shifts}});
    }
    return {{"kernel", to_string(report.family)},
            {"folds", report.folds},
            {"repeats", report.repeats},
            {"table", std::move(rows)}};
}

void write_cv_csv(std::ostream& out, const CvReport& report) {
    out << std::setprecision(12) << "sigma,C,mean_error,std_error,nonconverged\n";
    for (const auto& e : report.entries) {
        if (!std::isnan(e.sigma)) out << e.sigma;
        out << ',' << e.C << ',' << e.mean_error << ',' << e.std_error << ',' << e.nonconverged << '\n';
    }
}

}  // namespace gak
