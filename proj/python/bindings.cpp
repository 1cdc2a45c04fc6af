#include "grrm/classify.hpp"
#include "grrm/harness/config.hpp"
#include "grrm/harness/experiments.hpp"
#include "grrm/harness/tictactoe.hpp"
#include "grrm/objective.hpp"
#include "grrm/scheme.hpp"
#include "grrm/solver.hpp"
#include "grrm/transition.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace grrm;
using Samples = std::vector<std::size_t>;

namespace {

py::dict summary_dict(const harness::ExperimentResult& r) {
    py::list rows;
    for (const auto& s : r.summary) {
        py::dict d;
        d["method"] = s.method;
        d["param"] = s.param;
        d["mean_accuracy"] = s.mean;
        d["std"] = s.stddev;
        d["reps"] = s.reps;
        rows.append(d);
    }
    py::list runs;
    for (const auto& x : r.runs) runs.append(py::make_tuple(x.method, x.param, x.seed, x.accuracy, x.lambda));
    py::dict out;
    out["name"] = r.name;
    out["summary"] = rows;
    out["runs"] = runs;
    out["extra"] = r.extra.dump();
    out["fingerprint"] = harness::fingerprint_hex(r.config);
    return out;
}

}  // namespace

PYBIND11_MODULE(_grrm, m) {
    m.doc() = "Generalized robust risk minimization over finite spaces";
    m.attr("__version__") = "0.1.0";

    py::class_<FiniteSpace>(m, "FiniteSpace")
        .def(py::init(&make_space), py::arg("elements"))
        .def_static("product", [](const std::vector<FiniteSpace>& f) { return product_space(f); })
        .def("__len__", &FiniteSpace::size)
        .def_property_readonly("elements", &FiniteSpace::elements)
        .def_property_readonly("factors", &FiniteSpace::factors)
        .def("index_of", &FiniteSpace::index_of)
        .def("decompose", &FiniteSpace::decompose)
        .def("__eq__", [](const FiniteSpace& a, const FiniteSpace& b) { return a == b; })
        .def("__repr__", [](const FiniteSpace& s) { return "FiniteSpace(size=" + std::to_string(s.size()) + ")"; });

    py::class_<Distribution>(m, "Distribution")
        .def(py::init<FiniteSpace, Eigen::VectorXd>(), py::arg("space"), py::arg("mass"))
        .def_static("uniform", &Distribution::uniform)
        .def_property_readonly("space", &Distribution::space)
        .def_property_readonly("mass", &Distribution::mass);

    py::class_<LossMatrix>(m, "LossMatrix")
        .def(py::init<FiniteSpace, FiniteSpace, Eigen::MatrixXd>())
        .def_static("zero_one", &LossMatrix::zero_one)
        .def_property_readonly("values", &LossMatrix::values);

    py::class_<Transition>(m, "Transition")
        .def(py::init<FiniteSpace, FiniteSpace, Eigen::MatrixXd>(), py::arg("source"), py::arg("target"), py::arg("kernel"))
        .def_property_readonly("source", &Transition::source)
        .def_property_readonly("target", &Transition::target)
        .def_property_readonly("kernel", &Transition::kernel)
        .def("__call__", [](const Transition& t, const Distribution& q) { return apply(t, q); });

    m.def("binary_labels", &binary_labels);
    m.def("test_space", &test_space, py::arg("features"), py::arg("labels"));
    m.def("empirical_distribution", py::overload_cast<std::span<const std::size_t>, const FiniteSpace&>(&empirical_distribution));
    m.def("marginal", &marginal);
    m.def("identity", &identity);
    m.def("serial", &serial);
    m.def("parallel", py::overload_cast<const Transition&, const Transition&>(&parallel));
    m.def("label_noise", py::overload_cast<double, double>(&label_noise), py::arg("rho_minus"), py::arg("rho_plus"));
    m.def("symbol_noise", &symbol_noise, py::arg("space"), py::arg("flip_prob"));
    m.def("projection", [](const FiniteSpace& s, const Samples& kept) { return projection(s, kept); });
    m.def("zero_one_entropy", &zero_one_entropy);
    m.def("general_entropy", &general_entropy);

    py::class_<BridgeTriple>(m, "BridgeTriple")
        .def_readonly("kind", &BridgeTriple::kind)
        .def_readonly("weight", &BridgeTriple::weight)
        .def_readonly("sample_count", &BridgeTriple::sample_count)
        .def_readonly("test_to_bridge", &BridgeTriple::test_to_bridge)
        .def_readonly("train_to_bridge", &BridgeTriple::train_to_bridge)
        .def_readonly("empirical", &BridgeTriple::empirical);

    m.def("standard", [](const FiniteSpace& z, const Samples& s) { return standard(z, s); });
    m.def("noisy_labels", [](const FiniteSpace& z, double rm, double rp, const Samples& s) { return noisy_labels(z, rm, rp, s); },
          py::arg("test"), py::arg("rho_minus"), py::arg("rho_plus"), py::arg("samples"));
    m.def("unlabeled", [](const FiniteSpace& z, const Samples& s) { return unlabeled(z, s); });
    m.def("missing_feature", [](const FiniteSpace& z, std::size_t k, const Samples& s) { return missing_feature(z, k, s); });
    m.def("privileged", [](const FiniteSpace& z, const Transition& k, const Samples& s) { return privileged(z, k, s); });
    m.def("trs_corrupted", [](const FiniteSpace& z, const Transition& c, const Samples& s) { return trs_corrupted(z, c, s); });
    m.def("combined", [](const FiniteSpace& z, const Transition& l, const Transition& f, const Samples& s) {
        return combined(z, l, f, s);
    });
    m.def("representation_adaptation", [](const FiniteSpace& z, const Transition& a, const Transition& b, const Samples& s) {
        return representation_adaptation(z, a, b, s);
    });

    py::class_<SupervisionScheme>(m, "SupervisionScheme")
        .def(py::init(&make_scheme), py::arg("test_space"), py::arg("triples"))
        .def_property_readonly("triples", &SupervisionScheme::triples)
        .def_property_readonly("test_space", &SupervisionScheme::test_space)
        .def("with_weights", [](const SupervisionScheme& s, const std::vector<double>& w) { return s.with_weights(w); })
        .def("default_weights", [](const SupervisionScheme& s) { return default_weights(s); });

    py::enum_<NormKind>(m, "NormKind")
        .value("MAX_ABS", NormKind::MaxAbs)
        .value("SUM_ABS", NormKind::SumAbs)
        .value("EUCLIDEAN", NormKind::Euclidean);

    py::class_<GrrmSolution>(m, "GrrmSolution")
        .def_property_readonly("status", [](const GrrmSolution& s) { return std::string(status_name(s.status)); })
        .def_property_readonly("optimal", &GrrmSolution::optimal)
        .def_readonly("q_star", &GrrmSolution::q_star)
        .def_readonly("witnesses", &GrrmSolution::witnesses)
        .def_readonly("objective", &GrrmSolution::objective)
        .def_readonly("entropy", &GrrmSolution::entropy)
        .def_readonly("discrepancy_terms", &GrrmSolution::discrepancy_terms)
        .def_readonly("feasibility_residual", &GrrmSolution::feasibility_residual)
        .def_readonly("iterations", &GrrmSolution::iterations)
        .def_readonly("warnings", &GrrmSolution::warnings);

    m.def(
        "solve",
        [](const SupervisionScheme& scheme, double lambda, const std::string& norm, const std::string& statistic) {
            GrrmProblem p = make_problem(scheme, lambda, parse_norm(norm));
            if (statistic != "indicator") {
                p.statistics.clear();
                for (const auto& t : scheme.triples()) p.statistics.push_back(harness::make_statistic(statistic, t.bridge_space()));
            }
            py::gil_scoped_release release;
            return solve(p);
        },
        py::arg("scheme"), py::arg("lambda_"), py::arg("norm") = "max-abs", py::arg("statistic") = "indicator");
    m.def(
        "solve_config",
        [](const std::string& path) {
            const auto p = harness::problem_from_json(harness::load_json(path), std::filesystem::path(path).parent_path());
            py::gil_scoped_release release;
            return solve(p);
        },
        py::arg("path"));

    py::class_<ErmDiagnostic>(m, "ErmDiagnostic")
        .def_property_readonly("q", [](const ErmDiagnostic& d) { return d.q.mass(); })
        .def_readonly("negative_entries", &ErmDiagnostic::negative_entries)
        .def_readonly("min_entry", &ErmDiagnostic::min_entry);
    m.def("erm_backprojection", &erm_backprojection);

    py::class_<PosteriorRule>(m, "PosteriorRule")
        .def_readonly("decision", &PosteriorRule::decision)
        .def_readonly("fallback", &PosteriorRule::fallback)
        .def("__call__", &PosteriorRule::operator());
    m.def("posterior_rule", [](const Distribution& q) { return posterior_rule(q, LossMatrix::zero_one(q.space().factor(1))); });
    m.def("accuracy", [](const PosteriorRule& r, const Samples& s) {
        return evaluate(r, s, LossMatrix::zero_one(r.labels)).accuracy;
    });
    m.def("export_weights", [](const Distribution& q, const Samples& s) { return export_weights(q, s).weights; });

    auto tt = m.def_submodule("tictactoe", "Tic-tac-toe endgame corpus");
    tt.def("corpus", [] {
        std::vector<std::pair<std::string, bool>> out;
        for (const auto& b : harness::endgame_corpus()) out.emplace_back(std::string(b.cells.begin(), b.cells.end()), b.x_wins);
        return out;
    });
    tt.def("window_space", [](const Samples& w) { return harness::window_space(w); });

    m.def("noise_sweep", [](const std::string& config_json) {
        const auto c = harness::noise_sweep_from_json(nlohmann::json::parse(config_json));
        harness::ExperimentResult r;
        {
            py::gil_scoped_release release;
            r = harness::noise_sweep_experiment(c);
        }
        return summary_dict(r);
    });
    m.def("learning_curve", [](const std::string& config_json) {
        const auto c = harness::learning_curve_from_json(nlohmann::json::parse(config_json));
        harness::ExperimentResult r;
        {
            py::gil_scoped_release release;
            r = harness::learning_curve_experiment(c);
        }
        return summary_dict(r);
    });
    m.def("select_lambda", [](const std::vector<double>& grid, const std::function<double(double)>& f) {
        return harness::select_lambda(grid, f).lambda;
    });
}
