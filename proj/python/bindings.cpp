#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "gak/gak.hpp"

namespace py = pybind11;
using namespace gak;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

TimeSeries series_from_array(const Array& a) {
    if (a.ndim() == 1) return TimeSeries(1, std::vector<double>(a.data(), a.data() + a.size()));
    if (a.ndim() != 2) throw ValidationError("series must be a 1-D or 2-D array");
    return TimeSeries(static_cast<std::size_t>(a.shape(1)), std::vector<double>(a.data(), a.data() + a.size()));
}

Array series_to_array(const TimeSeries& s) {
    Array out({s.length(), s.dim()});
    std::memcpy(out.mutable_data(), s.values().data(), s.values().size() * sizeof(double));
    return out;
}

Array matrix_to_array(const Matrix& m) {
    Array out({m.rows(), m.cols()});
    std::memcpy(out.mutable_data(), m.data().data(), m.data().size() * sizeof(double));
    return out;
}

Matrix matrix_from_array(const Array& a) {
    if (a.ndim() != 2) throw ValidationError("matrix must be 2-D");
    Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = a.at(i, j);
    return m;
}

GroundKernelSpec ground(const std::string& kind, double sigma) {
    GroundKernelSpec g{ground_kind_from_string(kind), sigma};
    g.validate();
    return g;
}

std::optional<MeanMode> mean_mode(const std::optional<std::string>& name) {
    if (!name) return std::nullopt;
    return mean_mode_from_string(*name);
}

KernelSelector selector(const std::string& kernel, double sigma, const std::string& ground_kind,
                        const std::optional<std::string>& mode) {
    KernelSelector k;
    k.family = kernel == "ga" ? KernelFamily::ga_log : kernel_family_from_string(kernel);
    k.ground = k.family == KernelFamily::dtw1 ? GroundKernelSpec::gaussian(1.0) : ground(ground_kind, sigma);
    k.mean_mode = mean_mode(mode);
    return k;
}

py::dict alignment_dict(const Alignment& a) {
    py::dict d;
    d["pi1"] = a.pi1;
    d["pi2"] = a.pi2;
    return d;
}

}  // namespace

PYBIND11_MODULE(_gak, m) {
    m.doc() = "Global alignment kernels for time series";
    m.attr("__version__") = version;

    // Translators run last-registered first, so the base class goes first.
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);
    py::register_exception<NotRepresentable>(m, "NotRepresentable", PyExc_OverflowError);

    py::class_<TimeSeries>(m, "TimeSeries")
        .def(py::init(&series_from_array), py::arg("values"))
        .def_property_readonly("length", &TimeSeries::length)
        .def_property_readonly("dim", &TimeSeries::dim)
        .def("to_numpy", &series_to_array)
        .def("__len__", &TimeSeries::length)
        .def("__eq__", [](const TimeSeries& a, const TimeSeries& b) { return a == b; });
    py::implicitly_convertible<py::array, TimeSeries>();
    py::implicitly_convertible<py::list, TimeSeries>();

    py::class_<LabeledDataset>(m, "Dataset")
        .def(py::init([](const std::vector<std::tuple<std::string, std::string, TimeSeries>>& rows) {
                 std::vector<LabeledItem> items;
                 for (const auto& [id, label, s] : rows) items.push_back({id, label, s});
                 return LabeledDataset(std::move(items));
             }),
             py::arg("items"))
        .def("__len__", &LabeledDataset::size)
        .def_property_readonly("dim", &LabeledDataset::dim)
        .def_property_readonly("ids", &LabeledDataset::ids)
        .def_property_readonly("labels", &LabeledDataset::labels)
        .def("item_labels",
             [](const LabeledDataset& ds) {
                 std::vector<std::string> out;
                 for (const auto& it : ds) out.push_back(it.label);
                 return out;
             })
        .def("series", [](const LabeledDataset& ds, std::size_t i) { return ds[i].series; })
        .def("save", [](const LabeledDataset& ds, const std::filesystem::path& p) { write_dataset(p, ds); });

    m.def("load_dataset", [](const std::filesystem::path& p) { return load_dataset(p); }, py::arg("path"));

    m.def(
        "generate_synthetic",
        [](std::size_t classes, std::size_t per_class, std::size_t dim, std::size_t base_length, double jitter,
           double noise, double warp, std::uint64_t seed) {
            SynthSpec s{classes, per_class, dim, base_length, jitter, noise, warp, seed};
            return generate_synthetic(s);
        },
        py::arg("classes") = 3, py::arg("per_class") = 40, py::arg("dim") = 2, py::arg("base_length") = 50,
        py::arg("length_jitter") = 0.2, py::arg("noise") = 0.1, py::arg("warp") = 0.2, py::arg("seed") = 0);

    m.def("split_train_test", &split_train_test, py::arg("dataset"), py::arg("test_fraction"), py::arg("seed") = 0);

    m.def(
        "ga_kernel",
        [](const TimeSeries& x, const TimeSeries& y, double sigma, const std::string& kind) {
            const auto r = ga_kernel(x, y, ground(kind, sigma));
            py::dict d;
            d["value_log"] = r.value_log;
            d["value_linear"] = r.value_linear ? py::cast(*r.value_linear) : py::none();
            d["cells_computed"] = r.cells_computed;
            return d;
        },
        py::arg("x"), py::arg("y"), py::arg("sigma") = 1.0, py::arg("ground") = "gaussian");

    m.def(
        "ga_kernel_bruteforce",
        [](const TimeSeries& x, const TimeSeries& y, double sigma, const std::string& kind) {
            return ga_kernel_bruteforce(x, y, ground(kind, sigma));
        },
        py::arg("x"), py::arg("y"), py::arg("sigma") = 1.0, py::arg("ground") = "gaussian");

    m.def(
        "count_alignments",
        [](std::size_t n, std::size_t mm) { return py::int_(py::str(count_alignments(n, mm).str())); },
        py::arg("n"), py::arg("m"));

    m.def(
        "enumerate_alignments",
        [](std::size_t n, std::size_t mm, std::size_t max_count) {
            py::list out;
            for (const auto& a : enumerate(n, mm, {n * mm, max_count})) out.append(alignment_dict(a));
            return out;
        },
        py::arg("n"), py::arg("m"), py::arg("max_count") = AlignmentBudget{}.max_count);

    m.def(
        "dtw_best_path",
        [](const TimeSeries& x, const TimeSeries& y) {
            const auto r = dtw_best_path(x, y, CpdScoreSpec{});
            py::dict d;
            d["best_score_sum"] = r.best_score_sum;
            d["mean_score"] = r.mean_score;
            d["path"] = alignment_dict(r.path);
            return d;
        },
        py::arg("x"), py::arg("y"));

    m.def(
        "kdtw1",
        [](const TimeSeries& x, const TimeSeries& y, const std::optional<std::string>& mode) {
            const auto r = kdtw1(x, y, mean_mode(mode));
            return py::make_tuple(r.value, to_string(r.mode));
        },
        py::arg("x"), py::arg("y"), py::arg("mean_mode") = py::none());

    m.def(
        "kdtw2",
        [](const TimeSeries& x, const TimeSeries& y, double sigma, const std::optional<std::string>& mode) {
            const auto r = kdtw2(x, y, sigma, mean_mode(mode));
            return py::make_tuple(r.value, to_string(r.mode));
        },
        py::arg("x"), py::arg("y"), py::arg("sigma") = 1.0, py::arg("mean_mode") = py::none());

    py::class_<GramMatrix>(m, "Gram")
        .def_property_readonly("values", [](const GramMatrix& g) { return matrix_to_array(g.values); })
        .def_readonly("ids", &GramMatrix::ids)
        .def_property_readonly("shift_applied",
                               [](const GramMatrix& g) -> std::optional<double> {
                                   if (!g.regularization) return std::nullopt;
                                   return g.regularization->shift_applied;
                               })
        .def("save", [](const GramMatrix& g, const std::filesystem::path& base) { write_gram(base, g); });

    m.def(
        "build_gram",
        [](const LabeledDataset& ds, const std::string& kernel, double sigma, const std::string& kind,
           std::size_t workers, const std::optional<std::string>& mode) {
            py::gil_scoped_release release;
            return build_gram(ds, selector(kernel, sigma, kind, mode), workers);
        },
        py::arg("dataset"), py::arg("kernel") = "ga", py::arg("sigma") = 1.0, py::arg("ground") = "gaussian",
        py::arg("workers") = 1, py::arg("mean_mode") = py::none());

    m.def("read_gram", &read_gram, py::arg("base"));

    m.def(
        "min_eigenvalue", [](const Array& a) { return min_eigenvalue(matrix_from_array(a)); }, py::arg("matrix"));
    m.def(
        "eigenvalues", [](const Array& a) { return symmetric_eigenvalues(matrix_from_array(a)); },
        py::arg("matrix"));
    m.def(
        "regularize",
        [](const Array& a) {
            Regularization r;
            const auto out = regularize(matrix_from_array(a), &r);
            return py::make_tuple(matrix_to_array(out), r.shift_applied);
        },
        py::arg("matrix"));
    m.def(
        "psd_check",
        [](const Array& a, double tol) {
            const auto r = psd_check(matrix_from_array(a), tol);
            return py::make_tuple(r.is_psd, r.lambda_min, r.lambda_max);
        },
        py::arg("matrix"), py::arg("tol") = 1e-8);

    m.def(
        "classify",
        [](const LabeledDataset& train, const LabeledDataset& test, const std::string& kernel,
           std::optional<double> sigma, std::optional<double> C, std::size_t folds, std::size_t repeats,
           std::uint64_t seed, const std::string& kind, std::size_t workers) {
            CvConfig cfg;
            cfg.folds = folds;
            cfg.repeats = repeats;
            cfg.seed = seed;
            cfg.workers = workers;
            const auto family = selector(kernel, 1.0, kind, std::nullopt);
            cfg.sigma_grid = sigma ? std::vector<double>{*sigma}
                             : family.uses_sigma() ? default_sigma_grid(train)
                                                   : std::vector<double>{1.0};
            cfg.c_grid = C ? std::vector<double>{*C} : default_c_grid();
            const bool run_cv = cfg.sigma_grid.size() * cfg.c_grid.size() > 1;
            ProtocolResult r;
            {
                py::gil_scoped_release release;
                r = run_protocol(train, test, family, cfg, run_cv);
            }
            py::dict d;
            d["test_error"] = r.test_error;
            d["sigma"] = family.uses_sigma() ? py::cast(r.sigma) : py::none();
            d["C"] = r.C;
            d["predictions"] = r.predictions;
            d["cv_error"] = r.cv ? py::cast(grid_select(*r.cv).mean_error) : py::none();
            return d;
        },
        py::arg("train"), py::arg("test"), py::arg("kernel") = "ga", py::arg("sigma") = py::none(),
        py::arg("C") = py::none(), py::arg("folds") = 4, py::arg("repeats") = 4, py::arg("seed") = 0,
        py::arg("ground") = "gaussian", py::arg("workers") = 1);
}
