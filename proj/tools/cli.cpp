#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>

#include <nlohmann/json.hpp>

#include "gak/gak.hpp"

namespace gak::cli {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::optional<DatasetFormat> parse_format(const std::string& name) {
    if (name.empty()) return std::nullopt;
    if (name == "jsonl") return DatasetFormat::jsonl;
    if (name == "csv" || name == "csv_long") return DatasetFormat::csv_long;
    throw UsageError("unknown format '" + name + "' (expected jsonl or csv)");
}

std::optional<MeanMode> parse_mean_mode(const std::string& name) {
    if (name.empty()) return std::nullopt;
    return mean_mode_from_string(name);
}

json number_or_null(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

// `ref` is an id in `data`, a dataset file (first record), or file#id.
TimeSeries resolve_series(const std::string& ref, const std::optional<LabeledDataset>& data) {
    if (data) {
        if (auto idx = data->find(ref)) return (*data)[*idx].series;
    }
    std::string path = ref, id;
    if (auto hash = ref.rfind('#'); hash != std::string::npos && !std::filesystem::exists(ref)) {
        path = ref.substr(0, hash);
        id = ref.substr(hash + 1);
    }
    if (!std::filesystem::exists(path))
        throw Error("'" + ref + "' is neither a known id nor an existing file");
    const auto ds = load_dataset(path);
    if (ds.empty()) throw Error("'" + path + "' contains no series");
    if (id.empty()) return ds[0].series;
    auto idx = ds.find(id);
    if (!idx) throw Error("no id '" + id + "' in '" + path + "'");
    return ds[*idx].series;
}

KernelFamily family_for(const std::string& kernel, bool log_domain) {
    if (kernel == "ga") return log_domain ? KernelFamily::ga_log : KernelFamily::ga_linear;
    if (kernel == "dtw1") return KernelFamily::dtw1;
    if (kernel == "dtw2") return KernelFamily::dtw2;
    throw UsageError("unknown kernel '" + kernel + "'");
}

std::vector<std::size_t> parse_lengths(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            const long v = std::stol(tok, &used);
            if (used != tok.size() || v <= 0) throw std::invalid_argument(tok);
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw UsageError("bad length '" + tok + "'");
        }
    }
    if (out.empty()) throw UsageError("no lengths given");
    return out;
}

struct CvFlags {
    std::size_t folds = 4;
    std::size_t repeats = 4;
    std::uint64_t seed = 0;
};

CvFlags parse_cv(const std::vector<std::string>& tokens) {
    CvFlags f;
    for (const auto& tok : tokens) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw UsageError("--cv expects key=value, got '" + tok + "'");
        const auto key = tok.substr(0, eq);
        unsigned long long value = 0;
        try {
            std::size_t used = 0;
            value = std::stoull(tok.substr(eq + 1), &used);
            if (used != tok.size() - eq - 1) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw UsageError("bad value in --cv '" + tok + "'");
        }
        if (key == "folds") f.folds = value;
        else if (key == "repeats") f.repeats = value;
        else if (key == "seed") f.seed = value;
        else throw UsageError("unknown --cv key '" + key + "'");
    }
    return f;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Global alignment kernels for time series", "gak"};
    app.require_subcommand(1);
    app.set_version_flag("--version",
                         json{{"tool", "gak"},
                              {"version", gak::version},
                              {"formats", {{"dataset", dataset_format_version}, {"gram", gram_format_version}}}}
                             .dump());
    bool pretty = false;
    app.add_flag("--pretty", pretty, "Human-readable output where available");

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a warped multi-class synthetic dataset");
    SynthSpec spec;
    std::string synth_out, synth_format, test_out;
    double test_fraction = 0.5;
    synth->add_option("--classes", spec.num_classes)->check(CLI::PositiveNumber);
    synth->add_option("--per-class", spec.per_class)->check(CLI::PositiveNumber);
    synth->add_option("--dim", spec.dim)->check(CLI::PositiveNumber);
    synth->add_option("--base-length", spec.base_length)->check(CLI::PositiveNumber);
    synth->add_option("--length-jitter", spec.length_jitter);
    synth->add_option("--noise", spec.noise_sigma);
    synth->add_option("--warp", spec.warp_strength);
    synth->add_option("--seed", spec.seed);
    synth->add_option("--out", synth_out, "Output file (.jsonl or .csv)")->required();
    synth->add_option("--format", synth_format, "jsonl or csv (default: from extension)");
    auto* test_out_opt = synth->add_option("--test-out", test_out, "Write a stratified test split here");
    synth->add_option("--test-fraction", test_fraction)->needs(test_out_opt);

    // kernel
    auto* kernel = app.add_subcommand("kernel", "Evaluate one kernel value between two series");
    std::string ka, kb, kdata, kname = "ga", kground = "gaussian", kmean;
    double ksigma = 1.0;
    bool log_only = false;
    kernel->add_option("--a", ka, "Series: id in --data, a dataset file, or file#id")->required();
    kernel->add_option("--b", kb, "Series: id in --data, a dataset file, or file#id")->required();
    kernel->add_option("--data", kdata, "Dataset to resolve ids against");
    kernel->add_option("--kernel", kname)->check(CLI::IsMember({"ga", "dtw1", "dtw2"}));
    kernel->add_option("--sigma", ksigma);
    kernel->add_option("--ground", kground)->check(CLI::IsMember({"gaussian", "halved_gaussian_ratio", "unit"}));
    kernel->add_flag("--log-only", log_only);
    kernel->add_option("--mean-mode", kmean)->check(CLI::IsMember({"exhaustive", "heuristic"}));

    // alignments
    auto* align = app.add_subcommand("alignments", "Count (and list) the alignments of an n x m grid");
    std::size_t an = 0, am = 0, amax = AlignmentBudget{}.max_count;
    bool alist = false;
    align->add_option("--n", an)->required()->check(CLI::PositiveNumber);
    align->add_option("--m", am)->required()->check(CLI::PositiveNumber);
    align->add_flag("--list", alist);
    align->add_option("--max-count", amax, "Listing budget");

    // gram
    auto* gram = app.add_subcommand("gram", "Build (and optionally regularize) a Gram matrix");
    std::string gdata, gname = "ga", gground = "gaussian", gout, gmean;
    double gsigma = 1.0;
    bool glog = false, greg = false;
    std::size_t gworkers = 0;
    gram->add_option("--data", gdata)->required();
    gram->add_option("--kernel", gname)->check(CLI::IsMember({"ga", "dtw1", "dtw2"}));
    gram->add_option("--sigma", gsigma);
    gram->add_option("--ground", gground)->check(CLI::IsMember({"gaussian", "halved_gaussian_ratio", "unit"}));
    gram->add_flag("--log", glog, "Store log K (ga only)");
    gram->add_option("--out", gout, "Writes <out>.gram.csv and <out>.gram.json")->required();
    gram->add_flag("--regularize", greg);
    gram->add_option("--workers", gworkers, "0 = available parallelism");
    gram->add_option("--mean-mode", gmean)->check(CLI::IsMember({"exhaustive", "heuristic"}));

    // classify
    auto* classify = app.add_subcommand("classify", "One-vs-all SVM on a precomputed kernel");
    std::string ctrain, ctest, cname = "ga", cground = "gaussian", ccsv, cmean;
    std::optional<double> csigma, cC;
    bool cgrid = false;
    std::vector<std::string> cv_tokens;
    std::size_t cworkers = 0;
    classify->add_option("--train", ctrain)->required();
    classify->add_option("--test", ctest)->required();
    classify->add_option("--kernel", cname)->check(CLI::IsMember({"ga", "dtw1", "dtw2"}));
    classify->add_option("--ground", cground)->check(CLI::IsMember({"gaussian", "halved_gaussian_ratio", "unit"}));
    classify->add_option("--sigma", csigma);
    classify->add_option("--C", cC);
    classify->add_flag("--grid", cgrid, "Grid-search whichever of sigma / C is not fixed");
    auto* cv_opt = classify->add_option("--cv", cv_tokens, "folds=4 repeats=4 seed=N")->expected(0, 3);
    classify->add_option("--cv-csv", ccsv, "Write the per-(sigma, C) CV table here");
    classify->add_option("--workers", cworkers, "0 = available parallelism");
    classify->add_option("--mean-mode", cmean)->check(CLI::IsMember({"exhaustive", "heuristic"}));

    // bench
    auto* bench = app.add_subcommand("bench", "Time the alignment kernel against sequence length");
    std::string blengths = "125,250,500,1000";
    std::size_t bdim = 13, brepeat = 3;
    std::uint64_t bseed = 0;
    bench->add_option("--lengths", blengths);
    bench->add_option("--dim", bdim)->check(CLI::PositiveNumber);
    bench->add_option("--repeat", brepeat)->check(CLI::PositiveNumber);
    bench->add_option("--seed", bseed);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::Success& e) {
        // --help / --version
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (*synth) {
            const auto ds = generate_synthetic(spec);
            const auto fmt = parse_format(synth_format);
            json result = {{"classes", spec.num_classes}, {"dim", spec.dim}, {"seed", spec.seed}};
            if (test_out.empty()) {
                write_dataset(synth_out, ds, fmt);
                result["written"] = {{{"path", synth_out}, {"count", ds.size()}}};
            } else {
                const auto [train, test] = split_train_test(ds, test_fraction, spec.seed);
                write_dataset(synth_out, train, fmt);
                write_dataset(test_out, test, fmt);
                result["written"] = {{{"path", synth_out}, {"count", train.size()}},
                                     {{"path", test_out}, {"count", test.size()}}};
            }
            result["count"] = ds.size();
            out << result.dump() << '\n';
        } else if (*kernel) {
            std::optional<LabeledDataset> data;
            if (!kdata.empty()) data = load_dataset(kdata);
            const auto x = resolve_series(ka, data);
            const auto y = resolve_series(kb, data);
            json result = {{"kernel", kname}, {"n", x.length()}, {"m", y.length()}};
            if (kname == "ga") {
                const GroundKernelSpec g{ground_kind_from_string(kground), ksigma};
                const auto r = ga_kernel(x, y, g);
                result["ground"] = {{"kind", kground}, {"sigma", ksigma}};
                result["value_log"] = r.value_log;
                if (!log_only) result["value_linear"] = r.value_linear ? json(*r.value_linear) : json(nullptr);
                result["cells_computed"] = r.cells_computed;
            } else {
                const auto mode = parse_mean_mode(kmean);
                const auto v = kname == "dtw1" ? kdtw1(x, y, mode) : kdtw2(x, y, ksigma, mode);
                if (kname == "dtw2") result["sigma"] = ksigma;
                result["value"] = v.value;
                result["mean_mode"] = to_string(v.mode);
            }
            out << result.dump() << '\n';
        } else if (*align) {
            const BigInt count = count_alignments(an, am);
            json result = {{"n", an}, {"m", am}, {"count", count.str()}};
            if (alist) {
                const auto all = enumerate(an, am, {an * am, amax});
                if (pretty) {
                    out << "count " << count.str() << '\n';
                    for (const auto& a : all) {
                        for (auto v : a.pi1) out << v << ' ';
                        out << '\n';
                        for (auto v : a.pi2) out << v << ' ';
                        out << "\n\n";
                    }
                    return 0;
                }
                json list = json::array();
                for (const auto& a : all) list.push_back({{"pi1", a.pi1}, {"pi2", a.pi2}});
                result["alignments"] = std::move(list);
            }
            out << result.dump() << '\n';
        } else if (*gram) {
            if (glog && gname != "ga") throw UsageError("--log only applies to --kernel ga");
            const auto ds = load_dataset(gdata);
            KernelSelector k{family_for(gname, glog), {ground_kind_from_string(gground), gsigma},
                             parse_mean_mode(gmean)};
            if (gname == "dtw2") k.ground = GroundKernelSpec::gaussian(gsigma);
            auto g = build_gram(ds, k, gworkers);
            json result = {{"n", ds.size()}, {"kernel_desc", kernel_desc_json(k)}};
            if (greg) {
                g = regularize(g);
                result["lambda_min"] = g.regularization->lambda_min_before;
                result["shift_applied"] = g.regularization->shift_applied;
            } else {
                result["lambda_min"] = min_eigenvalue(g);
            }
            write_gram(gout, g);
            result["files"] = {gout + ".gram.csv", gout + ".gram.json"};
            out << result.dump() << '\n';
        } else if (*classify) {
            const auto train = load_dataset(ctrain);
            const auto test = load_dataset(ctest);
            KernelSelector k{family_for(cname, true), {ground_kind_from_string(cground), 1.0},
                             parse_mean_mode(cmean)};
            if (cname == "dtw2") k.ground = GroundKernelSpec::gaussian(1.0);

            const bool cv_requested = cv_opt->count() > 0;
            const auto cvf = parse_cv(cv_tokens);
            CvConfig cfg;
            cfg.folds = cvf.folds;
            cfg.repeats = cvf.repeats;
            cfg.seed = cvf.seed;
            cfg.workers = cworkers;
            if (csigma) cfg.sigma_grid = {*csigma};
            else if (cgrid) cfg.sigma_grid = default_sigma_grid(train);
            else cfg.sigma_grid = {median_point_distance(train)};
            if (cC) cfg.c_grid = {*cC};
            else if (cgrid) cfg.c_grid = default_c_grid();
            else cfg.c_grid = {1000.0};

            const auto r = run_protocol(train, test, k, cfg, cgrid || cv_requested);
            json result = {{"kernel", to_string(k.family)},
                           {"n_train", train.size()},
                           {"n_test", test.size()},
                           {"test_error", r.test_error},
                           {"chosen_sigma", number_or_null(r.sigma)},
                           {"chosen_C", r.C},
                           {"train_shift", r.train_regularization.shift_applied},
                           {"cv_table", r.cv ? to_json(*r.cv)["table"] : json(nullptr)}};
            if (r.cv) {
                const auto best = grid_select(*r.cv);
                result["cv_error"] = best.mean_error;
                if (!ccsv.empty()) {
                    std::ofstream csv(ccsv);
                    if (!csv) throw Error("cannot write '" + ccsv + "'");
                    write_cv_csv(csv, *r.cv);
                }
            }
            out << result.dump() << '\n';
        } else if (*bench) {
            const auto report = run_bench(parse_lengths(blengths), bdim, brepeat, bseed);
            if (pretty) {
                out << std::setw(8) << "length" << std::setw(14) << "cells" << std::setw(14) << "seconds"
                    << std::setw(16) << "cells/s" << '\n';
                for (const auto& row : report.rows)
                    out << std::setw(8) << row.length << std::setw(14) << row.cells_computed << std::setw(14)
                        << row.seconds << std::setw(16) << row.cells_per_second << '\n';
                out << "log-log slope " << report.slope << '\n';
                return 0;
            }
            json rows = json::array();
            for (const auto& row : report.rows)
                rows.push_back({{"length", row.length},
                                {"cells_computed", row.cells_computed},
                                {"seconds", row.seconds},
                                {"cells_per_second", row.cells_per_second}});
            out << json{{"dim", bdim}, {"repeat", brepeat}, {"rows", rows}, {"slope", report.slope}}.dump() << '\n';
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    } catch (const std::exception& e) {
        out << json{{"error", {{"message", e.what()}}}}.dump() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace gak::cli
