#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "otfs/harness.hpp"

namespace py = pybind11;
using namespace otfs;

namespace {

using CArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

// Frames cross the boundary as (M, N) arrays indexed [k, l].
DdFrame frame_from(const CArray& a) {
  if (a.ndim() != 2) throw DimensionError("expected a 2-D (M, N) array");
  const auto m = static_cast<std::size_t>(a.shape(0));
  const auto n = static_cast<std::size_t>(a.shape(1));
  DdFrame f(m, n);
  auto r = a.unchecked<2>();
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t l = 0; l < n; ++l) {
      f(k, l) = r(static_cast<py::ssize_t>(k), static_cast<py::ssize_t>(l));
    }
  }
  return f;
}

py::array_t<cplx> frame_to(const DdFrame& f) {
  py::array_t<cplx> a({f.m(), f.n()});
  auto w = a.mutable_unchecked<2>();
  for (std::size_t k = 0; k < f.m(); ++k) {
    for (std::size_t l = 0; l < f.n(); ++l) {
      w(static_cast<py::ssize_t>(k), static_cast<py::ssize_t>(l)) = f(k, l);
    }
  }
  return a;
}

CVector vector_from(const CArray& a) {
  if (a.ndim() != 1) throw DimensionError("expected a 1-D array");
  return CVector(a.data(), a.data() + a.size());
}

py::array_t<cplx> vector_to(std::span<const cplx> v) {
  py::array_t<cplx> a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

TimeSignal signal_from(const CArray& a, const GridConfig& g) {
  return {vector_from(a), g.bandwidth()};
}

py::dict summary_dict(const BatchSummary& s) {
  py::dict d;
  d["packets"] = s.packets;
  d["failed_packets"] = s.failed_packets;
  d["ber_mean"] = s.ber_mean;
  d["ber_std"] = s.ber_std;
  d["bits_total"] = s.bits_total;
  d["bit_errors"] = s.bit_errors;
  d["mean_paths"] = s.mean_paths;
  d["throughput_mbps"] = s.throughput_mbps;
  d["latency_median_s"] = s.latency.median_s;
  d["latency_p99_s"] = s.latency.p99_s;
  d["latency_p999_s"] = s.latency.p999_s;
  d["latency_max_s"] = s.latency.max_s;
  d["deadline_s"] = s.latency.deadline_s;
  d["deadline_met_rate"] = s.latency.deadline_met_rate;
  return d;
}

}  // namespace

PYBIND11_MODULE(_zakotfs, m) {
  m.doc() = "Zak-OTFS link simulator and structured-sparse receiver";

  auto base = py::register_exception<Error>(m, "OtfsError", PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<EmptyChannelError>(m, "EmptyChannelError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

  py::class_<GridConfig>(m, "GridConfig")
      .def(py::init<std::size_t, std::size_t, double>(), py::arg("m"), py::arg("n"),
           py::arg("delta_f") = 30e3)
      .def_property_readonly("m", &GridConfig::m)
      .def_property_readonly("n", &GridConfig::n)
      .def_property_readonly("size", &GridConfig::size)
      .def_property_readonly("delta_f", &GridConfig::delta_f)
      .def_property_readonly("bandwidth", &GridConfig::bandwidth)
      .def_property_readonly("frame_duration", &GridConfig::frame_duration)
      .def_property_readonly("delay_resolution", &GridConfig::delay_resolution)
      .def_property_readonly("doppler_resolution", &GridConfig::doppler_resolution)
      .def_property_readonly("k0", &GridConfig::k0)
      .def_property_readonly("l0", &GridConfig::l0)
      .def("__repr__", [](const GridConfig& g) {
        std::ostringstream os;
        os << "GridConfig(m=" << g.m() << ", n=" << g.n() << ", delta_f=" << g.delta_f() << ")";
        return os.str();
      });

  py::enum_<Modulation>(m, "Modulation")
      .value("QPSK", Modulation::Qpsk)
      .value("QAM16", Modulation::Qam16);

  py::enum_<EqualizerKind>(m, "Equalizer")
      .value("SS_CGA", EqualizerKind::SsCga)
      .value("LMMSE", EqualizerKind::Lmmse);

  // Transforms.
  m.def("idzt", [](const CArray& frame, const GridConfig& g) {
    return vector_to(idzt(frame_from(frame), g).samples);
  }, py::arg("frame"), py::arg("grid"));
  m.def("dzt", [](const CArray& samples, const GridConfig& g) {
    return frame_to(dzt(signal_from(samples, g), g));
  }, py::arg("samples"), py::arg("grid"));
  m.def("dzt_gemm", [](const CArray& samples, const GridConfig& g) {
    return frame_to(dzt_gemm(signal_from(samples, g), build_zak_kernel(g), g));
  }, py::arg("samples"), py::arg("grid"));

  // Modulation.
  m.def("modulate", [](const std::vector<std::uint8_t>& bits, Modulation mod, const GridConfig& g) {
    return frame_to(modulate(bits, Constellation::make(mod), g));
  }, py::arg("bits"), py::arg("modulation"), py::arg("grid"));
  m.def("hard_demod", [](const CArray& frame, Modulation mod) {
    const Demodulated d = hard_demod(frame_from(frame), Constellation::make(mod));
    return py::make_tuple(frame_to(d.symbols), d.bits);
  }, py::arg("frame"), py::arg("modulation"));

  // Channel.
  py::class_<PathSpec>(m, "PathSpec")
      .def_readonly("gain", &PathSpec::gain)
      .def_readonly("delay_s", &PathSpec::delay_s)
      .def_readonly("doppler_hz", &PathSpec::doppler_hz)
      .def_readonly("delay_bin", &PathSpec::delay_bin)
      .def_readonly("doppler_frac", &PathSpec::doppler_frac)
      .def_static("on_grid", &PathSpec::on_grid, py::arg("gain"), py::arg("delay_bin"),
                  py::arg("doppler_bins"), py::arg("grid"));
  m.def("draw_veha", [](double nu_max, const GridConfig& g, std::uint64_t seed) {
    Rng rng(seed);
    return draw_veha(nu_max, g, rng).paths;
  }, py::arg("nu_max_hz"), py::arg("grid"), py::arg("seed"));
  m.def("apply_channel", [](const CArray& samples, const std::vector<PathSpec>& paths,
                            const GridConfig& g) {
    return vector_to(apply_channel(signal_from(samples, g), PathSet{paths}, g).samples);
  }, py::arg("samples"), py::arg("paths"), py::arg("grid"));
  m.def("add_awgn", [](const CArray& samples, double snr_db, const GridConfig& g,
                       std::uint64_t seed) {
    Rng rng(seed);
    return vector_to(add_awgn(signal_from(samples, g), snr_db, rng).samples);
  }, py::arg("samples"), py::arg("snr_db"), py::arg("grid"), py::arg("seed"));
  m.def("ground_truth_heff", [](const std::vector<PathSpec>& paths, const GridConfig& g) {
    return frame_to(ground_truth_heff(PathSet{paths}, g));
  }, py::arg("paths"), py::arg("grid"));

  // Estimation.
  m.def("make_pilot_frame", [](const GridConfig& g) { return frame_to(make_pilot_frame(g)); },
        py::arg("grid"));
  m.def("estimate_heff", [](const CArray& y_dd, const GridConfig& g) {
    return frame_to(estimate_heff(frame_from(y_dd), TwistKernel::build(g),
                                  default_pilot_amplitude(g)));
  }, py::arg("y_dd"), py::arg("grid"));

  // Structured-sparse channel.
  py::class_<DominantPath>(m, "DominantPath")
      .def_readonly("k", &DominantPath::k)
      .def_readonly("l", &DominantPath::l)
      .def_readonly("gain", &DominantPath::gain)
      .def_readonly("d_k", &DominantPath::d_k)
      .def_readonly("d_l", &DominantPath::d_l)
      .def_static("at", &DominantPath::at, py::arg("k"), py::arg("l"), py::arg("gain"),
                  py::arg("grid"));
  m.def("detect_paths", [](const CArray& heff, double theta) {
    return detect_paths(frame_from(heff), theta);
  }, py::arg("heff"), py::arg("theta"));
  m.def("forward_index", &forward_index, py::arg("path"), py::arg("q"), py::arg("grid"));
  m.def("inverse_index", &inverse_index, py::arg("path"), py::arg("r"), py::arg("grid"));

  py::class_<StructuredSparseChannel>(m, "SparseChannel")
      .def(py::init([](const std::vector<DominantPath>& paths, const GridConfig& g) {
        return build_ss_channel(paths, g);
      }), py::arg("paths"), py::arg("grid"))
      .def_readonly("num_paths", &StructuredSparseChannel::num_paths)
      .def_property_readonly("dim", &StructuredSparseChannel::dim)
      .def_property_readonly("entries_per_direction",
                             &StructuredSparseChannel::entries_per_direction)
      .def_property_readonly("memory_bytes", &StructuredSparseChannel::memory_bytes)
      .def_property_readonly("forward_columns", [](const StructuredSparseChannel& c) {
        py::array_t<std::uint32_t> a({c.num_paths, c.dim()});
        std::copy(c.fwd_col.begin(), c.fwd_col.end(), a.mutable_data());
        return a;
      })
      .def_property_readonly("forward_coefficients", [](const StructuredSparseChannel& c) {
        py::array_t<cplx> a({c.num_paths, c.dim()});
        std::copy(c.fwd_coef.begin(), c.fwd_coef.end(), a.mutable_data());
        return a;
      })
      .def("matvec", [](const StructuredSparseChannel& c, const CArray& v) {
        return vector_to(ss_mvm(c, vector_from(v)));
      }, py::arg("v"))
      .def("rmatvec", [](const StructuredSparseChannel& c, const CArray& v) {
        return vector_to(ss_mvm_hermitian(c, vector_from(v)));
      }, py::arg("v"));

  m.def("dense_hdd", [](const CArray& heff, const GridConfig& g) {
    const DenseChannel d = build_dense_hdd(frame_from(heff), g);
    py::array_t<cplx> a({d.h_dd.rows(), d.h_dd.cols()});
    auto w = a.mutable_unchecked<2>();
    for (Eigen::Index r = 0; r < d.h_dd.rows(); ++r) {
      for (Eigen::Index c = 0; c < d.h_dd.cols(); ++c) w(r, c) = d.h_dd(r, c);
    }
    return a;
  }, py::arg("heff"), py::arg("grid"));

  // Equalizers.
  m.def("cga_equalize", [](const StructuredSparseChannel& c, const CArray& y,
                           std::size_t iterations, double lam) {
    const CgaResult r = cga_equalize(c, vector_from(y), {iterations, lam, false});
    return py::make_tuple(vector_to(r.x_hat), r.trace.c_norm);
  }, py::arg("channel"), py::arg("y"), py::arg("iterations") = 10, py::arg("lam") = 0.0);
  m.def("lmmse_equalize", [](const CArray& heff, const GridConfig& g, const CArray& y,
                             double snr_linear) {
    return vector_to(lmmse_equalize(build_dense_hdd(frame_from(heff), g), vector_from(y),
                                    snr_linear));
  }, py::arg("heff"), py::arg("grid"), py::arg("y"), py::arg("snr_linear"));

  // Harness.
  m.def("simulate", [](std::size_t mm, std::size_t nn, Modulation mod, double snr_db,
                       double nu_max, double theta, std::size_t iterations, EqualizerKind eq,
                       std::size_t packets, std::uint64_t seed) {
    SimConfig c;
    c.grid = GridConfig(mm, nn);
    c.modulation = mod;
    c.snr_db = snr_db;
    c.nu_max_hz = nu_max;
    c.theta = theta;
    c.iterations = iterations;
    c.equalizer = eq;
    c.packets = packets;
    c.seed = seed;
    c.validate();
    BatchSummary s;
    {
      py::gil_scoped_release release;
      s = run_batch(c);
    }
    return summary_dict(s);
  }, py::arg("m") = 32, py::arg("n") = 32, py::arg("modulation") = Modulation::Qpsk,
     py::arg("snr_db") = 25.0, py::arg("nu_max_hz") = 100.0, py::arg("theta") = 0.08,
     py::arg("iterations") = 10, py::arg("equalizer") = EqualizerKind::SsCga,
     py::arg("packets") = 20, py::arg("seed") = 1);
  m.def("throughput_mbps", &throughput_mbps, py::arg("grid"), py::arg("modulation"),
        py::arg("ber"));
  m.def("oracle_check", [](std::size_t mm, std::size_t nn, std::size_t channels,
                           std::uint64_t seed) {
    OracleOptions o;
    o.grid = GridConfig(mm, nn);
    o.channels = channels;
    o.seed = seed;
    const OracleReport r = oracle_check(o);
    py::list out;
    for (const OracleCheck& c : r.checks) out.append(py::make_tuple(c.name, c.passed, c.detail));
    return out;
  }, py::arg("m") = 16, py::arg("n") = 8, py::arg("channels") = 8, py::arg("seed") = 7);
}
