// Copyright 2026 The robosetup Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "robosetup/acm_gen.hpp"
#include "robosetup/bench.hpp"
#include "robosetup/cli.hpp"
#include "robosetup/confgen.hpp"
#include "robosetup/error.hpp"
#include "robosetup/json_io.hpp"
#include "robosetup/service.hpp"
#include "robosetup/srdf.hpp"

namespace py = pybind11;
using namespace robosetup;

// Structured values cross the boundary as JSON text; the Python package
// decodes them.
namespace {

std::string fk_json(const RobotModel& model, const std::map<std::string, double>& positions) {
  RobotState state = default_state(model);
  for (const auto& [k, v] : positions) {
    if (state.values.count(k) == 0) throw Error(ErrorCode::kValidation, "unknown state variable '" + k + "'", k);
    state.values[k] = v;
  }
  Json out = Json::object();
  for (const auto& [name, pose] : forward_kinematics(model, state)) out[name] = pose_to_json(pose);
  return out.dump();
}

std::vector<std::tuple<std::string, std::string, std::string>> findings(const ValidationReport& report) {
  std::vector<std::tuple<std::string, std::string, std::string>> out;
  for (const auto& f : report.findings) out.emplace_back(std::string(to_string(f.severity)), f.element, f.message);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "robosetup native core";

  py::register_exception<Error>(m, "RobosetupError");
  // same type, message prefixed with the error code
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const py::object type = py::module_::import("robosetup._core").attr("RobosetupError");
      const std::string message = std::string(to_string(e.code())) + ": " + e.what();
      PyErr_SetString(type.ptr(), message.c_str());
    }
  });

  py::class_<RobotModel, std::shared_ptr<RobotModel>>(m, "RobotModel")
      .def_property_readonly("name", &RobotModel::name)
      .def_property_readonly("root_link", &RobotModel::root_link)
      .def_property_readonly("active_joints", &RobotModel::active_joints)
      .def_property_readonly("links", [](const RobotModel& r) {
        std::vector<std::string> out;
        for (const auto& l : r.links()) out.push_back(l.name);
        return out;
      })
      .def("validate", [](const RobotModel& r) { return findings(validate_model(r)); })
      .def("fk_json", &fk_json, py::arg("positions") = std::map<std::string, double>{});

  m.def("load_urdf", [](const std::filesystem::path& file) { return std::make_shared<RobotModel>(load_urdf_file(file)); });
  m.def("parse_urdf", [](const std::string& text) { return std::make_shared<RobotModel>(parse_urdf(text)); });

  m.def(
      "generate_acm_json",
      [](const RobotModel& model, std::uint64_t samples, std::uint64_t seed, double threshold, unsigned threads) {
        AcmGenParams p;
        p.sample_count = samples;
        p.rng_seed = seed;
        p.always_threshold = threshold;
        p.threads = threads;
        py::gil_scoped_release release;
        return acm_report_to_json(generate_acm(model, p)).dump(2) + "\n";
      },
      py::arg("model"), py::arg("samples") = 10000, py::arg("seed") = 0, py::arg("threshold") = 0.95,
      py::arg("threads") = 0);

  m.def("normalize_srdf", [](const std::string& text, const RobotModel& model) {
    return serialize_srdf(parse_srdf(text, model));
  });
  m.def("validate_srdf", [](const std::string& text, const RobotModel& model) {
    return findings(validate_semantic(model, parse_srdf(text, model)));
  });

  m.def(
      "generate_bundle_json",
      [](const RobotModel& model, const std::string& srdf, const std::string& model_path, const std::string& acm_json) {
        SemanticModel semantic = parse_srdf(srdf, model);
        GenOptions options;
        options.model_path = model_path;
        if (!acm_json.empty()) {
          const Json report = Json::parse(acm_json);
          semantic.disabled = acm_from_report_json(report);
          options.acm_seed = report.at("params").at("seed").get<std::uint64_t>();
        }
        const ConfigBundle bundle = generate_bundle(model, semantic, options);
        Json out = bundle.manifest_json();
        Json files = Json::object();
        for (const auto& [path, text] : bundle.files) files[path] = text;
        out["contents"] = files;
        return out.dump();
      },
      py::arg("model"), py::arg("srdf"), py::arg("model_path") = "", py::arg("acm_json") = "");

  m.def("sweep_values", [](const std::string& parameter, double lower, double upper, double increment) {
    return sweep_values(SweepSpec{parameter, lower, upper, increment});
  });
  m.def("expand_sweep", [](const std::vector<std::tuple<std::string, double, double, double>>& specs) {
    std::vector<SweepSpec> s;
    for (const auto& [p, lo, hi, inc] : specs) s.push_back({p, lo, hi, inc});
    return expand_sweep(s);
  });

  py::class_<Service>(m, "Service")
      .def(py::init<>())
      .def("handle", [](Service& s, const std::string& method, const std::string& path, const std::string& body) {
        py::gil_scoped_release release;
        const HttpReply r = s.handle(method, path, body);
        return std::make_tuple(r.status, r.body, r.content_type);
      }, py::arg("method"), py::arg("path"), py::arg("body") = "");

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::vector<const char*> argv{"robosetup"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = 0;
    {
      py::gil_scoped_release release;
      code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    }
    return std::make_tuple(code, out.str(), err.str());
  });
}
