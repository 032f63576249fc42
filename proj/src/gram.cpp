#include "gak/gram.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "gak/errors.hpp"
#include "gak/ga_kernel.hpp"

namespace gak {

std::string to_string(KernelFamily family) {
    switch (family) {
        case KernelFamily::ga_log: return "ga_log";
        case KernelFamily::ga_linear: return "ga_linear";
        case KernelFamily::dtw1: return "dtw1";
        case KernelFamily::dtw2: return "dtw2";
    }
    return "?";
}

KernelFamily kernel_family_from_string(const std::string& name) {
    if (name == "ga_log") return KernelFamily::ga_log;
    if (name == "ga_linear") return KernelFamily::ga_linear;
    if (name == "dtw1") return KernelFamily::dtw1;
    if (name == "dtw2") return KernelFamily::dtw2;
    throw ValidationError("unknown kernel family '" + name + "'");
}

KernelSelector KernelSelector::with_sigma(double sigma) const {
    KernelSelector out = *this;
    out.ground.sigma = sigma;
    return out;
}

double evaluate_kernel(const KernelSelector& kernel, const TimeSeries& x, const TimeSeries& y) {
    switch (kernel.family) {
        case KernelFamily::ga_log:
            return ga_kernel(x, y, kernel.ground).value_log;
        case KernelFamily::ga_linear: {
            const auto r = ga_kernel(x, y, kernel.ground);
            if (!r.value_linear)
                throw NotRepresentable("log K = " + std::to_string(r.value_log) +
                                       " is outside double range");
            return *r.value_linear;
        }
        case KernelFamily::dtw1:
            return kdtw1(x, y, kernel.mean_mode).value;
        case KernelFamily::dtw2:
            return kdtw2(x, y, kernel.ground.sigma, kernel.mean_mode).value;
    }
    return 0.0;
}

namespace detail {

std::size_t resolve_workers(std::size_t workers) {
    if (workers != 0) return workers;
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn) {
    workers = std::min(resolve_workers(workers), std::max<std::size_t>(1, count));
    if (workers <= 1) {
        for (std::size_t k = 0; k < count; ++k) fn(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t k; (k = next.fetch_add(1)) < count;) {
                try {
                    fn(k);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next = count;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

namespace {

std::string pair_name(const LabeledItem& a, const LabeledItem& b) {
    return "('" + a.id + "', '" + b.id + "')";
}

double evaluate_pair(const KernelSelector& kernel, const LabeledItem& a, const LabeledItem& b) {
    try {
        return evaluate_kernel(kernel, a.series, b.series);
    } catch (const NotRepresentable& e) {
        throw NotRepresentable("pair " + pair_name(a, b) + ": " + e.what() +
                               "; use the log-domain kernel");
    }
}

}  // namespace

GramMatrix build_gram(const LabeledDataset& ds, const KernelSelector& kernel, std::size_t workers) {
    kernel.ground.validate();
    const std::size_t n = ds.size();
    GramMatrix g{Matrix(n, n), ds.ids(), kernel, std::nullopt};

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(n * (n + 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) pairs.emplace_back(i, j);

    detail::parallel_for(pairs.size(), workers, [&](std::size_t k) {
        const auto [i, j] = pairs[k];
        g.values(i, j) = evaluate_pair(kernel, ds[i], ds[j]);
    });
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) g.values(j, i) = g.values(i, j);
    return g;
}

CrossGram build_cross_gram(const LabeledDataset& train, const LabeledDataset& test,
                           const KernelSelector& kernel, std::size_t workers) {
    kernel.ground.validate();
    if (!train.empty() && !test.empty() && train.dim() != test.dim())
        throw DimensionMismatch("train dimension " + std::to_string(train.dim()) +
                                " differs from test dimension " + std::to_string(test.dim()));
    const std::size_t r = train.size(), c = test.size();
    CrossGram out{Matrix(r, c), train.ids(), test.ids()};
    detail::parallel_for(r * c, workers, [&](std::size_t k) {
        const std::size_t i = k / c, j = k % c;
        out.values(i, j) = evaluate_pair(kernel, train[i], test[j]);
    });
    return out;
}

double min_eigenvalue(const Matrix& g) {
    if (g.rows() == 0) throw ValidationError("empty matrix");
    return symmetric_eigenvalues(g).front();
}

Matrix regularize(const Matrix& g, Regularization* record) {
    const double lambda_min = min_eigenvalue(g);
    const double tol = 1e-12 * std::max(1.0, g.max_abs());
    Matrix out = g;
    double shift = 0.0;
    if (lambda_min < -tol) {
        shift = -lambda_min;
        for (std::size_t i = 0; i < out.rows(); ++i) out(i, i) += shift;
    }
    if (record) *record = {lambda_min, shift};
    return out;
}

GramMatrix regularize(const GramMatrix& g) {
    Regularization record;
    GramMatrix out = g;
    out.values = regularize(g.values, &record);
    out.regularization = record;
    return out;
}

PsdReport psd_check(const Matrix& g, double tol) {
    if (g.rows() == 0) throw ValidationError("empty matrix");
    const auto eig = symmetric_eigenvalues(g);
    const double radius = std::max(std::abs(eig.front()), std::abs(eig.back()));
    return {eig.front() >= -tol * std::max(1.0, radius), eig.front(), eig.back()};
}

nlohmann::json kernel_desc_json(const KernelSelector& kernel) {
    nlohmann::json desc = {{"family", to_string(kernel.family)}, {"log_domain", kernel.log_domain()}};
    if (kernel.family == KernelFamily::ga_log || kernel.family == KernelFamily::ga_linear) {
        desc["ground"] = {{"kind", to_string(kernel.ground.kind)}, {"sigma", kernel.ground.sigma}};
    } else if (kernel.family == KernelFamily::dtw2) {
        desc["ground"] = {{"kind", "gaussian"}, {"sigma", kernel.ground.sigma}};
    }
    if (kernel.mean_mode) desc["mean_mode"] = to_string(*kernel.mean_mode);
    return desc;
}

KernelSelector kernel_from_desc_json(const nlohmann::json& desc) {
    KernelSelector k;
    k.family = kernel_family_from_string(desc.at("family").get<std::string>());
    if (desc.contains("ground")) {
        k.ground.kind = ground_kind_from_string(desc["ground"].at("kind").get<std::string>());
        k.ground.sigma = desc["ground"].at("sigma").get<double>();
    }
    if (desc.contains("mean_mode")) k.mean_mode = mean_mode_from_string(desc["mean_mode"].get<std::string>());
    return k;
}

namespace {

std::filesystem::path with_suffix(const std::filesystem::path& base, const char* suffix) {
    return std::filesystem::path(base.string() + suffix);
}

}  // namespace

void write_gram(const std::filesystem::path& base, const GramMatrix& g) {
    {
        std::ofstream csv(with_suffix(base, ".gram.csv"));
        if (!csv) throw Error("cannot write '" + with_suffix(base, ".gram.csv").string() + "'");
        char buf[32];
        for (std::size_t i = 0; i < g.values.rows(); ++i) {
            for (std::size_t j = 0; j < g.values.cols(); ++j) {
                if (j) csv << ',';
                auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), g.values(i, j));
                csv.write(buf, end - buf);
            }
            csv << '\n';
        }
    }
    nlohmann::json meta = {{"ids", g.ids}, {"kernel_desc", kernel_desc_json(g.kernel)}};
    if (g.regularization)
        meta["regularization"] = {{"lambda_min_before", g.regularization->lambda_min_before},
                                  {"shift_applied", g.regularization->shift_applied}};
    else
        meta["regularization"] = nullptr;
    std::ofstream js(with_suffix(base, ".gram.json"));
    if (!js) throw Error("cannot write '" + with_suffix(base, ".gram.json").string() + "'");
    js << meta.dump(2) << '\n';
}

GramMatrix read_gram(const std::filesystem::path& base) {
    const auto json_path = with_suffix(base, ".gram.json");
    std::ifstream js(json_path);
    if (!js) throw Error("cannot open '" + json_path.string() + "'");
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(js);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(json_path.string(), e.what());
    }

    GramMatrix g;
    g.ids = meta.at("ids").get<std::vector<std::string>>();
    g.kernel = kernel_from_desc_json(meta.at("kernel_desc"));
    if (meta.contains("regularization") && !meta["regularization"].is_null())
        g.regularization = Regularization{meta["regularization"].at("lambda_min_before").get<double>(),
                                          meta["regularization"].at("shift_applied").get<double>()};

    const auto csv_path = with_suffix(base, ".gram.csv");
    std::ifstream csv(csv_path);
    if (!csv) throw Error("cannot open '" + csv_path.string() + "'");
    const std::size_t n = g.ids.size();
    g.values = Matrix(n, n);
    std::string line;
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::getline(csv, line))
            throw ParseError(csv_path.string(), "expected " + std::to_string(n) + " rows");
        const char* p = line.data();
        const char* end = line.data() + line.size();
        for (std::size_t j = 0; j < n; ++j) {
            auto [next, ec] = std::from_chars(p, end, g.values(i, j));
            if (ec != std::errc())
                throw ParseError(csv_path.string() + ":" + std::to_string(i + 1), "bad number");
            p = next;
            if (j + 1 < n) {
                if (p == end || *p != ',')
                    throw ParseError(csv_path.string() + ":" + std::to_string(i + 1),
                                     "expected " + std::to_string(n) + " columns");
                ++p;
            }
        }
    }
    return g;
}

}  // namespace gak
