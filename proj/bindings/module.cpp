#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spectralfdr/ensembles.hpp"
#include "spectralfdr/errors.hpp"
#include "spectralfdr/fdr.hpp"
#include "spectralfdr/montecarlo.hpp"
#include "spectralfdr/oracle.hpp"
#include "spectralfdr/rank.hpp"
#include "spectralfdr/rng.hpp"
#include "spectralfdr/spectral.hpp"
#include "spectralfdr/transforms.hpp"

namespace py = pybind11;
using namespace spectralfdr;

namespace {

BulkSpectrum bulk_from_values(const Eigen::VectorXd& values, int source_n,
                              int source_m, int r_hat) {
    BulkSpectrum bulk;
    bulk.values = values;
    bulk.source_n = source_n > 0 ? source_n : values.size() + r_hat;
    bulk.source_m = source_m > 0 ? source_m : bulk.source_n;
    bulk.r_hat = r_hat;
    return bulk;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "FDR-controlled principal subspace selection";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    // ---- rng ----------------------------------------------------------------
    py::class_<PhiloxRng>(m, "PhiloxRng")
        .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"),
             py::arg("stream") = 0)
        .def("substream", &PhiloxRng::substream, py::arg("tag"))
        .def("next_u64", &PhiloxRng::next_u64)
        .def("uniform01", &PhiloxRng::uniform01)
        .def("gaussian", &PhiloxRng::gaussian);

    // ---- spectral -----------------------------------------------------------
    py::enum_<SpectrumKind>(m, "SpectrumKind")
        .value("eigen", SpectrumKind::eigen)
        .value("singular", SpectrumKind::singular);

    py::class_<Spectrum>(m, "Spectrum")
        .def_readonly("kind", &Spectrum::kind)
        .def_readonly("values", &Spectrum::values)
        .def_readonly("n", &Spectrum::n)
        .def_readonly("m", &Spectrum::m)
        .def_readonly("transposed", &Spectrum::transposed)
        .def_readonly("left_basis", &Spectrum::left_basis)
        .def_readonly("right_basis", &Spectrum::right_basis)
        .def_property_readonly("aspect", &Spectrum::aspect);

    py::class_<SpacingProfile>(m, "SpacingProfile")
        .def_readonly("deltas", &SpacingProfile::deltas)
        .def_readonly("n", &SpacingProfile::n);

    m.def(
        "symmetric_spectrum",
        [](const Eigen::MatrixXd& M, bool want_vectors) {
            return symmetric_spectrum(M, Tolerances{}, want_vectors);
        },
        py::arg("M"), py::arg("want_vectors") = true);
    m.def(
        "singular_spectrum",
        [](const Eigen::MatrixXd& M, bool want_vectors) {
            return singular_spectrum(M, Tolerances{}, want_vectors);
        },
        py::arg("M"), py::arg("want_vectors") = true);
    m.def("spacings", &spacings, py::arg("spectrum"));
    m.def(
        "projection_overlap",
        [](const Eigen::MatrixXd& b1, const Eigen::MatrixXd& b2) {
            return projection_overlap(b1, b2);
        },
        py::arg("basis1"), py::arg("basis2"));
    m.def("symmetrize", &symmetrize, py::arg("M"));

    // ---- transforms ---------------------------------------------------------
    py::class_<BulkSpectrum>(m, "BulkSpectrum")
        .def(py::init(&bulk_from_values), py::arg("values"), py::arg("source_n") = 0,
             py::arg("source_m") = 0, py::arg("r_hat") = 0)
        .def_readonly("values", &BulkSpectrum::values)
        .def_readonly("r_hat", &BulkSpectrum::r_hat)
        .def_property_readonly("count", &BulkSpectrum::count)
        .def_property_readonly("edge", &BulkSpectrum::edge);

    py::class_<TransformValue>(m, "TransformValue")
        .def_readonly("g", &TransformValue::g)
        .def_readonly("g_prime", &TransformValue::g_prime)
        .def_readonly("at", &TransformValue::at)
        .def("__repr__", [](const TransformValue& v) {
            return "TransformValue(g=" + std::to_string(v.g) +
                   ", g_prime=" + std::to_string(v.g_prime) + ")";
        });

    py::enum_<Side>(m, "Side").value("left", Side::left).value("right", Side::right);

    m.def("make_bulk", &make_bulk, py::arg("spectrum"), py::arg("r_hat"));
    m.def("cauchy_estimate", &cauchy_estimate, py::arg("bulk"), py::arg("y"));
    m.def("phi_estimate", &phi_estimate, py::arg("bulk"), py::arg("y"), py::arg("q"));
    m.def("d_transform_estimate", &d_transform_estimate, py::arg("bulk"),
          py::arg("y"), py::arg("aspect"));
    m.def("ratio_symmetric", &ratio_symmetric, py::arg("bulk"), py::arg("y"));
    m.def("ratio_asymmetric", &ratio_asymmetric, py::arg("bulk"), py::arg("y"),
          py::arg("aspect"), py::arg("side"));

    // ---- rank ---------------------------------------------------------------
    py::class_<RankConfig>(m, "RankConfig")
        .def(py::init([](double p) {
                 RankConfig config;
                 config.p = p;
                 return config;
             }),
             py::arg("p") = 1.0)
        .def_readonly("p", &RankConfig::p)
        .def_readonly("degenerate_fallback", &RankConfig::degenerate_fallback);

    py::class_<RankResult>(m, "RankResult")
        .def_readonly("r_hat", &RankResult::r_hat)
        .def_readonly("threshold", &RankResult::threshold)
        .def_readonly("qualifying_indices", &RankResult::qualifying_indices);

    m.def("default_threshold", &default_threshold, py::arg("spacing"), py::arg("n"));
    m.def("rank_estimate", &rank_estimate, py::arg("spectrum"), py::arg("config"));

    // ---- fdr ----------------------------------------------------------------
    py::enum_<CurveSide>(m, "CurveSide")
        .value("symmetric", CurveSide::symmetric)
        .value("left", CurveSide::left)
        .value("right", CurveSide::right)
        .value("both", CurveSide::both);

    py::class_<FdrCurve>(m, "FdrCurve")
        .def_readonly("estimates", &FdrCurve::estimates)
        .def_readonly("r_hat", &FdrCurve::r_hat)
        .def_readonly("side", &FdrCurve::side)
        .def_readonly("aspect", &FdrCurve::aspect)
        .def_readonly("k_max", &FdrCurve::k_max)
        .def("at", &FdrCurve::at, py::arg("k"));

    py::class_<SelectionResult>(m, "SelectionResult")
        .def_readonly("k_hat", &SelectionResult::k_hat)
        .def_readonly("alpha", &SelectionResult::alpha)
        .def_readonly("curve", &SelectionResult::curve)
        .def_readonly("r_hat", &SelectionResult::r_hat)
        .def_readonly("p_used", &SelectionResult::p_used);

    m.def("fdr_curve_symmetric", &fdr_curve_symmetric, py::arg("spectrum"),
          py::arg("r_hat"), py::arg("k_max"));
    m.def("fdr_curve_asymmetric", &fdr_curve_asymmetric, py::arg("spectrum"),
          py::arg("r_hat"), py::arg("k_max"), py::arg("side") = CurveSide::both);
    m.def("select_dimension", &select_dimension, py::arg("curve"), py::arg("alpha"),
          py::arg("p_used") = std::numeric_limits<double>::quiet_NaN());
    m.def("default_k_max", &default_k_max, py::arg("n"), py::arg("r_hat"));

    // ---- ensembles ----------------------------------------------------------
    py::enum_<NoiseFamily>(m, "NoiseFamily")
        .value("wigner", NoiseFamily::Wigner)
        .value("wishart", NoiseFamily::Wishart)
        .value("wishart_factor", NoiseFamily::WishartFactor)
        .value("fisher", NoiseFamily::Fisher)
        .value("fisher_factor", NoiseFamily::FisherFactor)
        .value("uniform", NoiseFamily::Uniform)
        .value("uniform_factor", NoiseFamily::UniformFactor);

    py::enum_<SignalKind>(m, "SignalKind")
        .value("well_separated", SignalKind::well_separated)
        .value("barely_separated", SignalKind::barely_separated)
        .value("entangled", SignalKind::entangled);

    py::class_<NoiseSpec>(m, "NoiseSpec")
        .def(py::init(&NoiseSpec::make), py::arg("family"), py::arg("n"),
             py::arg("m") = 0)
        .def_readonly("family", &NoiseSpec::family)
        .def_readonly("n", &NoiseSpec::n)
        .def_readonly("m", &NoiseSpec::m);

    py::class_<SignalSpec>(m, "SignalSpec")
        .def(py::init(&SignalSpec::make), py::arg("kind"), py::arg("r"),
             py::arg("bbp_estimate"))
        .def_readonly("r", &SignalSpec::r)
        .def_readonly("kind", &SignalSpec::kind)
        .def_readonly("bbp_estimate", &SignalSpec::bbp_estimate)
        .def_readonly("shift", &SignalSpec::shift)
        .def_readonly("thetas", &SignalSpec::thetas);

    py::class_<EnsembleInstance>(m, "EnsembleInstance")
        .def_readonly("X", &EnsembleInstance::X)
        .def_readonly("A", &EnsembleInstance::A)
        .def_readonly("E", &EnsembleInstance::E)
        .def_readonly("signal_left_basis", &EnsembleInstance::signal_left_basis)
        .def_readonly("signal_right_basis", &EnsembleInstance::signal_right_basis)
        .def_readonly("thetas", &EnsembleInstance::thetas)
        .def_readonly("seed", &EnsembleInstance::seed);

    m.def("parse_family", &parse_family, py::arg("name"));
    m.def("family_name", &family_name, py::arg("family"));
    m.def(
        "sample_noise",
        [](const NoiseSpec& spec, std::uint64_t seed) {
            return sample_noise(spec, seed);
        },
        py::arg("spec"), py::arg("seed"));
    m.def("signal_spectrum", &signal_spectrum, py::arg("spec"));
    m.def(
        "sample_instance",
        [](const NoiseSpec& noise, const SignalSpec& signal, std::uint64_t seed,
           double noise_scale) {
            return sample_instance(noise, signal, seed, noise_scale);
        },
        py::arg("noise"), py::arg("signal"), py::arg("seed"),
        py::arg("noise_scale") = 1.0);
    m.def("bbp_upper_estimate", &bbp_upper_estimate, py::arg("spec"));

    // ---- oracle -------------------------------------------------------------
    py::class_<LimitLaw>(m, "LimitLaw")
        .def_static("semicircle", &LimitLaw::semicircle)
        .def_static("marchenko_pastur", &LimitLaw::marchenko_pastur, py::arg("aspect"))
        .def_static("wishart_factor", &LimitLaw::wishart_factor, py::arg("aspect"))
        .def_static("tabulated", &LimitLaw::tabulated, py::arg("grid_t"),
                    py::arg("grid_f"))
        .def_static("from_sample", &LimitLaw::from_sample, py::arg("values"),
                    py::arg("bins") = 64)
        .def_property_readonly("support_lo", &LimitLaw::support_lo)
        .def_property_readonly("support_hi", &LimitLaw::support_hi)
        .def("density", &LimitLaw::density, py::arg("t"))
        .def("cdf", &LimitLaw::cdf, py::arg("t"))
        .def("tail_mass", &LimitLaw::tail_mass, py::arg("t"));

    py::enum_<LawMode>(m, "LawMode")
        .value("eigen", LawMode::eigen)
        .value("singular", LawMode::singular);

    py::class_<SpikeForecast>(m, "SpikeForecast")
        .def_readonly("theta", &SpikeForecast::theta)
        .def_readonly("location", &SpikeForecast::location)
        .def_readonly("overlap", &SpikeForecast::overlap)
        .def_readonly("above_threshold", &SpikeForecast::above_threshold);

    py::class_<BbpThreshold>(m, "BbpThreshold")
        .def_readonly("threshold", &BbpThreshold::threshold)
        .def_readonly("edge_transform_finite", &BbpThreshold::edge_transform_finite);

    m.def("law_transform", &law_transform, py::arg("law"), py::arg("z"));
    m.def("law_phi", &law_phi, py::arg("law"), py::arg("z"), py::arg("q"));
    m.def("law_d", &law_d, py::arg("law"), py::arg("z"));
    m.def("bbp_threshold", &bbp_threshold, py::arg("law"), py::arg("mode"));
    m.def("spike_forecast", &spike_forecast, py::arg("law"), py::arg("theta"),
          py::arg("mode"));
    m.def("fdr_infinity", &fdr_infinity, py::arg("law"), py::arg("thetas"),
          py::arg("k"), py::arg("mode"), py::arg("side") = Side::left);
    m.def("law_quantile", &law_quantile, py::arg("law"), py::arg("i"), py::arg("n"));

    // ---- montecarlo ---------------------------------------------------------
    py::class_<ComputeFlags>(m, "ComputeFlags")
        .def(py::init<>())
        .def_readwrite("mc_truth", &ComputeFlags::mc_truth)
        .def_readwrite("estimate", &ComputeFlags::estimate)
        .def_readwrite("oracle", &ComputeFlags::oracle);

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_readwrite("noise", &ExperimentConfig::noise)
        .def_readwrite("signal", &ExperimentConfig::signal)
        .def_readwrite("repetitions", &ExperimentConfig::repetitions)
        .def_readwrite("k_max", &ExperimentConfig::k_max)
        .def_readwrite("alpha", &ExperimentConfig::alpha)
        .def_readwrite("master_seed", &ExperimentConfig::master_seed)
        .def_readwrite("compute", &ExperimentConfig::compute)
        .def_readwrite("p", &ExperimentConfig::p)
        .def_readwrite("noise_scale", &ExperimentConfig::noise_scale);

    py::class_<ExperimentReport::Row>(m, "ExperimentRow")
        .def_readonly("k", &ExperimentReport::Row::k)
        .def_readonly("fdr_estimate_mean", &ExperimentReport::Row::fdr_estimate_mean)
        .def_readonly("fdr_mc_mean", &ExperimentReport::Row::fdr_mc_mean)
        .def_readonly("fdr_mc_stderr", &ExperimentReport::Row::fdr_mc_stderr)
        .def_readonly("fdr_mc_rstar_mean", &ExperimentReport::Row::fdr_mc_rstar_mean)
        .def_readonly("fd_mc_mean", &ExperimentReport::Row::fd_mc_mean)
        .def_readonly("fdr_oracle", &ExperimentReport::Row::fdr_oracle);

    py::class_<ExperimentReport>(m, "ExperimentReport")
        .def_readonly("rows", &ExperimentReport::rows)
        .def_readonly("rows_right", &ExperimentReport::rows_right)
        .def_readonly("rank_estimates", &ExperimentReport::rank_estimates)
        .def_readonly("p_values", &ExperimentReport::p_values)
        .def_readonly("k_hat_distribution", &ExperimentReport::k_hat_distribution)
        .def_readonly("r", &ExperimentReport::r)
        .def_readonly("r_star", &ExperimentReport::r_star)
        .def_readonly("bbp_estimate", &ExperimentReport::bbp_estimate)
        .def_readonly("n", &ExperimentReport::n)
        .def_readonly("m", &ExperimentReport::m)
        .def_readonly("alpha", &ExperimentReport::alpha)
        .def_readonly("wall_seconds", &ExperimentReport::wall_seconds);

    py::class_<TrueFdrSequences>(m, "TrueFdrSequences")
        .def_readonly("left", &TrueFdrSequences::left)
        .def_readonly("right", &TrueFdrSequences::right);

    m.def("true_fdr_trial", &true_fdr_trial, py::arg("instance"), py::arg("k_max"));
    m.def("run_experiment", &run_experiment, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
    m.def("observable_rank", &observable_rank, py::arg("noise"), py::arg("signal"));
    m.def("worker_thread_count", &worker_thread_count);
}
