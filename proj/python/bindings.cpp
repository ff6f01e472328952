#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "thzqkd/channel_model.hpp"
#include "thzqkd/cli.hpp"
#include "thzqkd/config.hpp"
#include "thzqkd/error.hpp"
#include "thzqkd/experiments.hpp"
#include "thzqkd/gaussian_core.hpp"
#include "thzqkd/keyrate.hpp"
#include "thzqkd/protocol_mc.hpp"
#include "thzqkd/units_physics.hpp"

namespace py = pybind11;
using namespace thzqkd;

namespace {

py::array_t<double> as_array(const std::vector<double>& v) {
  const std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(v.size())};
  const std::vector<py::ssize_t> strides{static_cast<py::ssize_t>(sizeof(double))};
  return py::array_t<double>(shape, strides, v.data());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Terahertz MIMO CV-QKD key rates";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  auto numerical = py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<BracketError>(m, "BracketError", numerical.ptr());

  m.attr("CONSTANTS_VERSION") = std::string(constants::version);
  m.attr("PLANCK_H") = constants::planck_h;
  m.attr("BOLTZMANN_K") = constants::boltzmann_k;
  m.attr("SPEED_OF_LIGHT") = constants::speed_of_light;

  // units
  py::class_<EnvironmentParams>(m, "EnvironmentParams")
      .def(py::init<>())
      .def(py::init([](double f, double t, double vs, double w) {
             EnvironmentParams e{f, t, vs, w};
             e.validate();
             return e;
           }),
           py::arg("carrier_frequency_hz") = 15e12, py::arg("temperature_k") = 296.0,
           py::arg("signal_variance") = 1e3, py::arg("eve_noise") = 1.0)
      .def_readwrite("carrier_frequency_hz", &EnvironmentParams::carrier_frequency_hz)
      .def_readwrite("temperature_k", &EnvironmentParams::temperature_k)
      .def_readwrite("signal_variance", &EnvironmentParams::signal_variance)
      .def_readwrite("eve_noise", &EnvironmentParams::eve_noise)
      .def("validate", &EnvironmentParams::validate);

  m.def("wavelength_m", &wavelength_m, py::arg("carrier_frequency_hz"));
  m.def("mean_thermal_photons", py::overload_cast<double, double>(&mean_thermal_photons),
        py::arg("carrier_frequency_hz"), py::arg("temperature_k"));
  m.def("vacuum_variance",
        [](double f, double t) { return vacuum_variance(EnvironmentParams{f, t, 1e3, 1.0}); },
        py::arg("carrier_frequency_hz"), py::arg("temperature_k"));
  m.def("bosonic_entropy", &bosonic_entropy, py::arg("x"));
  m.def("lambda_mix", &lambda_mix, py::arg("transmittance"), py::arg("x"), py::arg("y"));

  // channel
  py::class_<ArrayConfig>(m, "ArrayConfig")
      .def(py::init([](int n_tx, int n_rx, double g, double spacing) {
             ArrayConfig a{n_tx, n_rx, g, spacing};
             a.validate();
             return a;
           }),
           py::arg("n_tx") = 1, py::arg("n_rx") = 1, py::arg("element_gain") = 1.0,
           py::arg("element_spacing_over_lambda") = 0.5)
      .def_readwrite("n_tx", &ArrayConfig::n_tx)
      .def_readwrite("n_rx", &ArrayConfig::n_rx)
      .def_readwrite("element_gain", &ArrayConfig::element_gain)
      .def_readwrite("element_spacing_over_lambda", &ArrayConfig::element_spacing_over_lambda);

  py::class_<PathSpec>(m, "PathSpec")
      .def(py::init([](double length, double aod, double aoa, std::optional<double> delay,
                       bool is_los, double roughness, std::complex<double> fresnel) {
             PathSpec p;
             p.length_m = length;
             p.aod_rad = aod;
             p.aoa_rad = aoa;
             p.delay_s = delay ? *delay : length / constants::speed_of_light;
             p.is_los = is_los;
             p.roughness = roughness;
             p.fresnel = fresnel;
             return p;
           }),
           py::arg("length_m"), py::arg("aod_rad") = 0.0, py::arg("aoa_rad") = 0.0,
           py::arg("delay_s") = py::none(), py::arg("is_los") = true, py::arg("roughness") = 1.0,
           py::arg("fresnel") = std::complex<double>(1.0, 0.0))
      .def_readwrite("length_m", &PathSpec::length_m)
      .def_readwrite("aod_rad", &PathSpec::aod_rad)
      .def_readwrite("aoa_rad", &PathSpec::aoa_rad)
      .def_readwrite("delay_s", &PathSpec::delay_s)
      .def_readwrite("is_los", &PathSpec::is_los)
      .def_readwrite("roughness", &PathSpec::roughness)
      .def_readwrite("fresnel", &PathSpec::fresnel);

  py::class_<AbsorptionTable>(m, "AbsorptionTable")
      .def_static("default_terahertz", &AbsorptionTable::default_terahertz)
      .def_static("from_rows",
                  [](const std::vector<std::pair<double, double>>& rows) {
                    return AbsorptionTable::from_rows(rows);
                  })
      .def_static("from_csv_text", &AbsorptionTable::from_csv_text)
      .def_static("load_csv", &AbsorptionTable::load_csv)
      .def("covers", &AbsorptionTable::covers)
      .def("delta_db_per_km", &AbsorptionTable::delta_db_per_km);

  py::enum_<FresnelMode>(m, "FresnelMode")
      .value("power", FresnelMode::power)
      .value("raw", FresnelMode::raw);

  m.def("steering_vector", &steering_vector, py::arg("k"), py::arg("theta_rad"),
        py::arg("spacing_over_lambda") = 0.5);
  m.def("path_loss", &path_loss, py::arg("path"), py::arg("env"), py::arg("arrays"),
        py::arg("absorption") = AbsorptionTable::default_terahertz(),
        py::arg("fresnel_mode") = FresnelMode::power);
  m.def(
      "build_channel",
      [](const std::vector<PathSpec>& paths, const EnvironmentParams& env, const ArrayConfig& arrays,
         const AbsorptionTable& absorption, FresnelMode mode) {
        return build_channel(paths, env, arrays, absorption, mode);
      },
      py::arg("paths"), py::arg("env"), py::arg("arrays"),
      py::arg("absorption") = AbsorptionTable::default_terahertz(),
      py::arg("fresnel_mode") = FresnelMode::power);

  py::class_<ChannelDecomposition>(m, "ChannelDecomposition")
      .def_readonly("matrix_h", &ChannelDecomposition::matrix_h)
      .def_readonly("left_u", &ChannelDecomposition::left_u)
      .def_readonly("right_v", &ChannelDecomposition::right_v)
      .def_readonly("transmittances", &ChannelDecomposition::transmittances)
      .def_readonly("rank", &ChannelDecomposition::rank)
      .def_readonly("eve_mix", &ChannelDecomposition::eve_mix)
      .def("trace_hdh", &ChannelDecomposition::trace_hdh);
  m.def("decompose", &decompose, py::arg("h"), py::arg("rank_tolerance") = 1e-12);

  // gaussian core
  m.def("symplectic_eigenvalues",
        py::overload_cast<const Eigen::MatrixXd&>(&symplectic_eigenvalues), py::arg("cov"));
  m.def(
      "von_neumann_entropy", [](const Eigen::MatrixXd& cov) { return von_neumann_entropy(GaussianState(cov)); },
      py::arg("cov"));
  m.def("two_mode_squeezed", [](double v) { return two_mode_squeezed(v).cov(); }, py::arg("variance"));
  m.def("beam_splitter", [](double eta) { return beam_splitter(eta).matrix(); }, py::arg("eta"));
  m.def("holevo_exact", &holevo_exact, py::arg("transmittance"), py::arg("alice_variance"),
        py::arg("eve_noise"));

  // key rate
  py::enum_<RateMethod>(m, "RateMethod")
      .value("exact", RateMethod::exact)
      .value("large_modulation", RateMethod::large_modulation)
      .value("taylor", RateMethod::taylor);
  py::enum_<ZetaConstant>(m, "ZetaConstant")
      .value("literal", ZetaConstant::literal)
      .value("analytic", ZetaConstant::analytic);

  py::class_<KeyRateOptions>(m, "KeyRateOptions")
      .def(py::init([](bool clamp, ZetaConstant z) { return KeyRateOptions{clamp, z}; }),
           py::arg("clamp_negative_channels") = false, py::arg("zeta_constant") = ZetaConstant::literal)
      .def_readwrite("clamp_negative_channels", &KeyRateOptions::clamp_negative_channels)
      .def_readwrite("zeta_constant", &KeyRateOptions::zeta_constant);

  py::class_<ChannelRate>(m, "ChannelRate")
      .def_readonly("transmittance", &ChannelRate::transmittance)
      .def_readonly("mutual_info_bits", &ChannelRate::mutual_info_bits)
      .def_readonly("holevo_bits", &ChannelRate::holevo_bits)
      .def_readonly("rate_bits", &ChannelRate::rate_bits);
  py::class_<RateBreakdown>(m, "RateBreakdown")
      .def_readonly("per_channel", &RateBreakdown::per_channel)
      .def_readonly("total_rate_bits", &RateBreakdown::total_rate_bits)
      .def_readonly("method", &RateBreakdown::method);
  py::class_<Feasibility>(m, "Feasibility")
      .def_readonly("alpha", &Feasibility::alpha)
      .def_readonly("zeta", &Feasibility::zeta)
      .def_readonly("feasible", &Feasibility::feasible);

  m.def("mutual_information", &mutual_information, py::arg("transmittance"),
        py::arg("signal_variance"), py::arg("vacuum_variance"), py::arg("eve_noise"));
  m.def("holevo_large_modulation", &holevo_large_modulation, py::arg("transmittance"),
        py::arg("alice_variance"), py::arg("eve_noise"));
  m.def("zeta_coefficient", &zeta_coefficient, py::arg("signal_variance"),
        py::arg("vacuum_variance"), py::arg("eve_noise"), py::arg("mode") = ZetaConstant::literal);
  m.def("rate_per_channel", &rate_per_channel, py::arg("transmittance"), py::arg("signal_variance"),
        py::arg("vacuum_variance"), py::arg("eve_noise"), py::arg("method"),
        py::arg("options") = KeyRateOptions{});
  m.def(
      "rate_mimo",
      [](const std::vector<double>& t, const EnvironmentParams& env, RateMethod method,
         const KeyRateOptions& options) { return rate_mimo(t, env, method, options); },
      py::arg("transmittances"), py::arg("env"), py::arg("method"),
      py::arg("options") = KeyRateOptions{});
  m.def(
      "feasibility_threshold",
      [](const std::vector<double>& t, const EnvironmentParams& env, const KeyRateOptions& options) {
        return feasibility_threshold(t, env, options);
      },
      py::arg("transmittances"), py::arg("env"), py::arg("options") = KeyRateOptions{});

  // experiments
  py::class_<Scenario>(m, "Scenario")
      .def_readwrite("env", &Scenario::env)
      .def_readwrite("arrays", &Scenario::arrays)
      .def_readwrite("paths", &Scenario::paths)
      .def_readwrite("absorption", &Scenario::absorption)
      .def_readwrite("keyrate", &Scenario::keyrate)
      .def("validate", &Scenario::validate);
  m.def("los_scenario", &los_scenario, py::arg("carrier_frequency_hz"), py::arg("n_antennas"),
        py::arg("distance_m"));
  m.def("with_distance", &with_distance, py::arg("scenario"), py::arg("distance_m"));
  m.def("with_frequency", &with_frequency, py::arg("scenario"), py::arg("carrier_frequency_hz"));
  m.def("scenario_transmittances", &scenario_transmittances, py::arg("scenario"));
  m.def("scenario_rate", &scenario_rate, py::arg("scenario"), py::arg("method"));
  m.def("scenario_hash", &scenario_hash, py::arg("scenario"));

  py::class_<MaxDistanceResult>(m, "MaxDistanceResult")
      .def_readonly("distance_m", &MaxDistanceResult::distance_m)
      .def_readonly("rate_bits", &MaxDistanceResult::rate_bits)
      .def_readonly("iterations", &MaxDistanceResult::iterations)
      .def_readonly("residual", &MaxDistanceResult::residual)
      .def_readonly("residual_bound", &MaxDistanceResult::residual_bound);
  m.def("max_distance", &max_distance, py::arg("scenario"), py::arg("target_rate"),
        py::arg("method"), py::arg("d_lo"), py::arg("d_hi"));
  m.def("min_physical_distance", &min_physical_distance, py::arg("scenario"),
        py::arg("d_max") = 1e4);

  py::class_<FrequencyPoint>(m, "FrequencyPoint")
      .def_readonly("frequency_hz", &FrequencyPoint::frequency_hz)
      .def_readonly("zeta", &FrequencyPoint::zeta)
      .def_readonly("max_distance_m", &FrequencyPoint::max_distance_m)
      .def_readonly("status", &FrequencyPoint::status);
  m.def("frequency_profile", &frequency_profile, py::arg("scenario"), py::arg("target_rate"),
        py::arg("method"), py::arg("frequency_grid"), py::arg("d_hi") = 1e4);

  m.def(
      "zeta_temperature_sweep",
      [](double vs, double w, const std::vector<double>& f, const std::vector<double>& t,
         ZetaConstant mode) {
        py::list out;
        for (const auto& p : zeta_temperature_sweep(vs, w, f, t, mode)) {
          out.append(py::make_tuple(p.temperature_k, p.frequency_hz, p.vacuum_variance, p.zeta));
        }
        return out;
      },
      py::arg("signal_variance"), py::arg("eve_noise"), py::arg("frequencies_hz"),
      py::arg("temperatures_k"), py::arg("mode") = ZetaConstant::literal);

  // config and cli
  m.def(
      "parse_config",
      [](const std::string& text) {
        const ScenarioConfig cfg = parse_config(text);
        return py::make_tuple(cfg.scenario, cfg.method);
      },
      py::arg("text"));
  m.def(
      "load_config",
      [](const std::filesystem::path& path) {
        const ScenarioConfig cfg = load_config(path);
        return py::make_tuple(cfg.scenario, cfg.method);
      },
      py::arg("path"));
  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Returns (exit_code, stdout, stderr).");

  // monte carlo
  m.attr("RNG_ID") = std::string(kRngId);
  m.def(
      "simulate",
      [](const std::vector<double>& t, const EnvironmentParams& env, std::uint64_t n_rounds,
         std::uint64_t seed) {
        const ProtocolRun run = simulate(t, env, n_rounds, seed);
        py::list channels;
        for (const auto& ch : run.channels) {
          py::dict d;
          d["transmittance"] = ch.transmittance;
          d["x_alice"] = as_array(ch.x_alice);
          d["x_bob"] = as_array(ch.x_bob);
          d["x_eve"] = as_array(ch.x_eve);
          channels.append(d);
        }
        return channels;
      },
      py::arg("transmittances"), py::arg("env"), py::arg("n_rounds"), py::arg("seed"));
}
