#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "shearmix/experiments.hpp"

namespace py = pybind11;
using namespace shearmix;

namespace {

py::array_t<double> field_values(const ScalarField& f) {
    const int N = f.size();
    py::array_t<double> out({N, N});
    auto r = out.mutable_unchecked<2>();
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) r(i, j) = f.value(i, j);
    return out;
}

py::array_t<double> psi_values(const PsiGrid& g) {
    py::array_t<double> out({g.nx, g.nx, g.ntheta});
    auto r = out.mutable_unchecked<3>();
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.nx; ++j)
            for (int t = 0; t < g.ntheta; ++t) r(i, j, t) = g.at(i, j, t);
    return out;
}

SparseInitialData make_sparse(const std::vector<std::tuple<int, int, std::complex<double>>>& modes) {
    SparseInitialData d;
    for (const auto& [k1, k2, amp] : modes) d.modes.push_back({k1, k2, amp});
    return d;
}

} // namespace

PYBIND11_MODULE(shearmix, m) {
    m.doc() = "Random alternating-shear mixing laboratory on the 2-torus";

    py::class_<TorusPoint>(m, "TorusPoint")
        .def(py::init<double, double>(), py::arg("x"), py::arg("y"))
        .def_readwrite("x", &TorusPoint::x)
        .def_readwrite("y", &TorusPoint::y)
        .def("__repr__", [](const TorusPoint& p) {
            return "TorusPoint(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")";
        });

    py::class_<ShearMapStep>(m, "ShearMapStep")
        .def(py::init<>())
        .def(py::init([](double A, double Ap, double g, double gp) {
                 return ShearMapStep{A, Ap, g, gp};
             }),
             py::arg("A"), py::arg("Aprime"), py::arg("gamma"), py::arg("gammaprime"))
        .def_readwrite("A", &ShearMapStep::A)
        .def_readwrite("Aprime", &ShearMapStep::Aprime)
        .def_readwrite("gamma", &ShearMapStep::gamma)
        .def_readwrite("gammaprime", &ShearMapStep::gammaprime);

    py::class_<Mat2>(m, "Mat2")
        .def_readonly("a", &Mat2::a)
        .def_readonly("b", &Mat2::b)
        .def_readonly("c", &Mat2::c)
        .def_readonly("d", &Mat2::d)
        .def("det", &Mat2::det);

    py::class_<MapSequence>(m, "MapSequence")
        .def_readonly("seed", &MapSequence::seed)
        .def_readonly("sample_index", &MapSequence::sample_index)
        .def_readonly("steps", &MapSequence::steps)
        .def("__len__", [](const MapSequence& s) { return s.size(); });

    m.def("sample_step",
          py::overload_cast<std::uint64_t, std::uint64_t, std::uint64_t>(&sample_step),
          py::arg("seed"), py::arg("sample"), py::arg("step"));
    m.def("sample_sequence", &sample_sequence, py::arg("seed"), py::arg("sample"),
          py::arg("n_steps"));
    m.def("apply", py::overload_cast<const ShearMapStep&, TorusPoint>(&apply));
    m.def("apply_inverse",
          py::overload_cast<const ShearMapStep&, TorusPoint>(&apply_inverse));
    m.def("jacobian", &jacobian);
    m.def("inv_transpose_jacobian", &inv_transpose_jacobian);
    m.def("cocycle", &cocycle);
    m.def("projective_step", [](const ShearMapStep& s, TorusPoint x, double v) {
        const ProjectiveStep r = projective_step(s, x, v);
        return py::make_tuple(r.x, r.angle, r.log_gain);
    });
    m.def("derivative_bound", &derivative_bound, py::arg("step"), py::arg("k"),
          py::arg("grid") = 64);

    py::class_<SparseInitialData>(m, "SparseInitialData")
        .def(py::init(&make_sparse), py::arg("modes"))
        .def("mean_zero", &SparseInitialData::mean_zero);
    m.def("cosine_mode", &cosine_mode, py::arg("k1"), py::arg("k2"),
          py::arg("phase") = 0.0);
    m.def("synthesize", &synthesize);

    py::class_<ScalarField>(m, "ScalarField")
        .def_static("from_samples",
                    [](py::array_t<double, py::array::c_style> arr) {
                        auto r = arr.unchecked<2>();
                        const int N = int(r.shape(0));
                        std::vector<double> v(std::size_t(N) * N);
                        for (int i = 0; i < N; ++i)
                            for (int j = 0; j < N; ++j) v[std::size_t(i) * N + j] = r(i, j);
                        return ScalarField::from_samples(N, std::move(v));
                    })
        .def_property_readonly("N", &ScalarField::size)
        .def_property_readonly("values", &field_values)
        .def("coeff", &ScalarField::coeff)
        .def("sobolev_norm", &ScalarField::sobolev_norm)
        .def("write_csv", &ScalarField::write_csv);
    m.def("field_from_sparse", &field_from_sparse, py::arg("data"), py::arg("N"));
    m.def("pullback", &pullback, py::arg("data"), py::arg("seq"), py::arg("N"),
          py::arg("workers") = 1);
    m.def("resolution_check", &resolution_check, py::arg("data"), py::arg("seq"),
          py::arg("s"), py::arg("N"), py::arg("workers") = 1);

    py::class_<KernelTable>(m, "KernelTable")
        .def(py::init<double, int, int>(), py::arg("s"), py::arg("K"),
             py::arg("table_n") = 1024)
        .def("eval", &KernelTable::eval)
        .def("eval_centered", &KernelTable::eval_centered)
        .def_property_readonly("at_zero", &KernelTable::at_zero);
    m.def(
        "neg_norm_kernel_mc",
        [](const SparseInitialData& d, const MapSequence& seq, const KernelTable& k,
           std::size_t pairs, std::uint64_t seed, std::uint64_t label) {
            RngStream rng = make_stream(seed, kStreamPairs, label);
            return neg_norm_kernel_mc(d, seq, k, pairs, rng);
        },
        py::arg("data"), py::arg("seq"), py::arg("kernel"), py::arg("pairs"),
        py::arg("seed"), py::arg("label") = 0);

    py::class_<LyapunovEstimate>(m, "LyapunovEstimate")
        .def_readonly("value", &LyapunovEstimate::value)
        .def_readonly("stderr", &LyapunovEstimate::stderr_)
        .def_readonly("n_steps", &LyapunovEstimate::n_steps)
        .def_readonly("n_samples", &LyapunovEstimate::n_samples);
    m.def(
        "top_lyapunov",
        [](std::size_t n_steps, std::size_t n_samples, std::uint64_t seed, int workers) {
            return top_lyapunov(n_steps, n_samples, seed, {}, workers);
        },
        py::arg("n_steps"), py::arg("n_samples"), py::arg("seed"),
        py::arg("workers") = 1);

    py::class_<MomentLyapunovEstimate>(m, "MomentLyapunovEstimate")
        .def_readonly("lambda_hat", &MomentLyapunovEstimate::lambda)
        .def_readonly("stderr", &MomentLyapunovEstimate::stderr_)
        .def_readonly("ess_fraction", &MomentLyapunovEstimate::ess_fraction)
        .def_readonly("unreliable", &MomentLyapunovEstimate::unreliable);
    m.def(
        "moment_lyapunov_direct",
        [](double p, std::size_t n_steps, std::size_t n_samples, std::uint64_t seed,
           int workers) {
            return moment_lyapunov_direct(p, n_steps, n_samples, seed, {}, workers);
        },
        py::arg("p"), py::arg("n_steps"), py::arg("n_samples"), py::arg("seed"),
        py::arg("workers") = 1);

    py::class_<PsiGrid>(m, "PsiGrid")
        .def_readonly("nx", &PsiGrid::nx)
        .def_readonly("ntheta", &PsiGrid::ntheta)
        .def_readonly("p", &PsiGrid::p)
        .def_readonly("lambda_p", &PsiGrid::lambda_p)
        .def_readonly("lambda_hat", &PsiGrid::lambda_hat)
        .def_readonly("lambda_se", &PsiGrid::lambda_se)
        .def_readonly("final_increment", &PsiGrid::final_increment)
        .def_property_readonly("values", &psi_values)
        .def("interp", &PsiGrid::interp)
        .def("min_value", &PsiGrid::min_value)
        .def("write_csv", &PsiGrid::write_csv);
    m.def(
        "psi_power_iteration",
        [](double p, int nx, int ntheta, int maps, int iters, std::uint64_t seed,
           int workers) {
            return psi_power_iteration(p, nx, ntheta, maps, iters, seed, {}, workers);
        },
        py::arg("p"), py::arg("nx") = 32, py::arg("ntheta") = 64,
        py::arg("n_maps_per_iter") = 64, py::arg("n_iters") = 60, py::arg("seed") = 1,
        py::arg("workers") = 1);

    py::class_<DyadicPartition>(m, "DyadicPartition")
        .def_readonly("n_max", &DyadicPartition::n_max)
        .def_readonly("shells", &DyadicPartition::shells)
        .def("chi", &DyadicPartition::chi)
        .def("sum_all", &DyadicPartition::sum_all);
    m.def("build_partition", &build_partition, py::arg("n_max"));

    py::class_<SymbolModel>(m, "SymbolModel")
        .def_property_readonly("p", &SymbolModel::p)
        .def_property_readonly("eps", &SymbolModel::eps)
        .def("eval", [](const SymbolModel& S, double x, double y, double k1, double k2) {
            return S.eval({x, y}, k1, k2);
        });
    m.def("build_symbol", &build_symbol, py::arg("psi"), py::arg("eps"),
          py::arg("n_max"));
    m.def("quantize_apply",
          [](const SymbolModel& S, const ScalarField& f, int workers) {
              return quantize_apply(S, f, workers);
          },
          py::arg("symbol"), py::arg("field"), py::arg("workers") = 1);
    m.def("quadratic_form",
          [](const SymbolModel& S, const ScalarField& f, int workers) {
              return quadratic_form(S, f, workers);
          },
          py::arg("symbol"), py::arg("field"), py::arg("workers") = 1);
    m.def("fit_exponential_rate", [](const std::vector<double>& ns,
                                     const std::vector<double>& vals,
                                     const std::vector<double>& ses) {
        const RateFit f = fit_exponential_rate(ns, vals, ses);
        return py::make_tuple(f.rate, f.intercept, f.r2, f.rate_se);
    });

    py::class_<EnsembleConfig>(m, "EnsembleConfig")
        .def(py::init<>())
        .def_readwrite("n_samples", &EnsembleConfig::n_samples)
        .def_readwrite("n_steps", &EnsembleConfig::n_steps)
        .def_readwrite("grid", &EnsembleConfig::grid)
        .def_readwrite("p", &EnsembleConfig::p)
        .def_readwrite("eps", &EnsembleConfig::eps)
        .def_readwrite("delta", &EnsembleConfig::delta)
        .def_readwrite("s_low", &EnsembleConfig::s_low)
        .def_readwrite("seed", &EnsembleConfig::seed)
        .def_readwrite("workers", &EnsembleConfig::workers)
        .def_readwrite("initial_data", &EnsembleConfig::initial_data)
        .def_readwrite("psi_nx", &EnsembleConfig::psi_nx)
        .def_readwrite("psi_ntheta", &EnsembleConfig::psi_ntheta)
        .def_readwrite("psi_maps", &EnsembleConfig::psi_maps)
        .def_readwrite("psi_iters", &EnsembleConfig::psi_iters)
        .def_readwrite("mc_pairs", &EnsembleConfig::mc_pairs)
        .def_readwrite("two_point_samples", &EnsembleConfig::two_point_samples)
        .def_readwrite("ly_samples", &EnsembleConfig::ly_samples)
        .def_readwrite("n_burn", &EnsembleConfig::n_burn)
        .def("use_identity_maps",
             [](EnsembleConfig& cfg) { cfg.sampler = identity_sampler(); });

    py::class_<TracePoint>(m, "TracePoint")
        .def_readonly("mean", &TracePoint::mean)
        .def_readonly("stderr", &TracePoint::se)
        .def_readonly("count", &TracePoint::count);
    py::class_<RateFit>(m, "RateFit")
        .def_readonly("rate", &RateFit::rate)
        .def_readonly("intercept", &RateFit::intercept)
        .def_readonly("r2", &RateFit::r2)
        .def_readonly("rate_se", &RateFit::rate_se);
    py::class_<MixingTrace>(m, "MixingTrace")
        .def_readonly("delta_sq", &MixingTrace::delta_sq)
        .def_readonly("low_sq", &MixingTrace::low_sq)
        .def_readonly("fit", &MixingTrace::fit)
        .def_readonly("mu_hat", &MixingTrace::mu_hat);
    m.def("run_annealed_mixing",
          [](const EnsembleConfig& cfg) { return run_annealed_mixing(cfg); },
          py::arg("config"));

    py::class_<QuenchedReport>(m, "QuenchedReport")
        .def_readonly("K", &QuenchedReport::K)
        .def_readonly("stabilization", &QuenchedReport::stabilization)
        .def_property_readonly("ekq_half",
                               [](const QuenchedReport& r) {
                                   return py::make_tuple(r.ekq_half[0], r.ekq_half[1],
                                                         r.ekq_half[2]);
                               })
        .def_property_readonly("ekq_full", [](const QuenchedReport& r) {
            return py::make_tuple(r.ekq_full[0], r.ekq_full[1], r.ekq_full[2]);
        });
    m.def("run_quenched", &run_quenched, py::arg("config"), py::arg("mu_hat"));

    m.attr("TWO_PI") = kTwoPi;
    m.attr("__version__") = "0.1.0";
}
