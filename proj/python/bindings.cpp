#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "cafe/cafe_gcn.hpp"
#include "cafe/dimred.hpp"
#include "cafe/error.hpp"
#include "cafe/io.hpp"
#include "cafe/spectral.hpp"
#include "cafe/sphere_gcn.hpp"

namespace py = pybind11;
using namespace cafe;

namespace {

// The Python side only ever sees the graph through its modularity operator.
struct Graph {
    std::shared_ptr<const SampledGraph> g;
    ModularityMatrix q() const { return ModularityMatrix(g); }
};

Graph from_edges(std::size_t n, const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges) {
    std::vector<Edge> e;
    e.reserve(edges.size());
    for (const auto& [u, w, weight] : edges) e.push_back({u, w, weight});
    return {std::make_shared<const SampledGraph>(SampledGraph::from_edges(n, e))};
}

py::dict embedding_dict(const EmbeddingMatrix& e) {
    py::dict d;
    d["h_hat"] = e.h_hat;
    d["source_columns"] = e.source_columns;
    d["warnings"] = e.warnings;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
    py::register_exception<InvariantError>(m, "InvariantError", PyExc_ArithmeticError);
    m.attr("__version__") = CAFE_VERSION;

    py::class_<Graph>(m, "Graph")
        .def_static("from_edges", &from_edges, py::arg("n"), py::arg("edges"),
                    "edges: (u, w, weight) triples over nodes 0..n-1")
        .def_static("read", [](const std::string& path) {
            const auto edges = io::read_edge_list(path);
            return Graph{std::make_shared<const SampledGraph>(SampledGraph::from_edges(edges))};
        })
        .def_property_readonly("n", [](const Graph& g) { return g.g->size(); })
        .def_property_readonly("labels", [](const Graph& g) {
            std::vector<std::string> out;
            for (std::size_t u = 0; u < g.g->size(); ++u) out.push_back(g.g->nodes().label(u));
            return out;
        })
        .def("total_mass", [](const Graph& g) { return g.g->total_mass(); })
        .def("distribution", [](const Graph& g) { return g.g->dense_distribution(); })
        .def("modularity", [](const Graph& g, const std::vector<std::size_t>& part) {
            return partition_modularity(g.q(), part);
        });

    m.def("cafe", [](const Graph& g, std::size_t k, double theta, std::uint64_t seed, std::size_t max_sweeps, double tol) {
        CafeOptions o;
        o.cluster = {.k = k, .theta = theta, .max_sweeps = max_sweeps, .tol = tol, .seed = seed};
        const auto r = cafe_gcn(g.q(), o);
        py::dict d = embedding_dict(r.embedding);
        d["h"] = r.h;
        d["clusters"] = r.clusters;
        d["objective"] = r.objective;
        d["sweeps"] = r.sweeps;
        d["converged"] = r.converged;
        d["trace"] = r.trace;
        return d;
    }, py::arg("graph"), py::arg("k") = 2, py::arg("theta") = 1.0, py::arg("seed") = 0,
       py::arg("max_sweeps") = 200, py::arg("tol") = 1e-9);

    m.def("multilayer", [](const Graph& g, std::size_t k, std::uint64_t seed) {
        MultilayerOptions o;
        o.cluster.k = k;
        o.cluster.seed = seed;
        py::list out;
        for (const auto& l : multilayer(g.q(), o)) {
            py::dict d = embedding_dict(l.embedding);
            d["level"] = l.level;
            d["clusters"] = l.clusters;
            d["modularity"] = l.modularity;
            d["membership"] = l.membership;
            out.append(d);
        }
        return out;
    }, py::arg("graph"), py::arg("k") = 0, py::arg("seed") = 0);

    m.def("sphere", [](const Graph& g, std::size_t k, double beta, std::uint64_t seed, std::size_t max_sweeps, double tol) {
        const auto r = sphere_embed(g.q(), {.k = k, .beta = beta, .seed = seed, .max_sweeps = max_sweeps, .tol = tol});
        py::dict d = embedding_dict(r.embedding);
        d["h"] = r.run.assignment.h;
        d["objective"] = r.run.objective;
        d["sweeps"] = r.run.sweeps;
        d["converged"] = r.run.converged;
        return d;
    }, py::arg("graph"), py::arg("k") = 2, py::arg("beta") = 0.5, py::arg("seed") = 0,
       py::arg("max_sweeps") = 200, py::arg("tol") = 1e-9);

    m.def("eigs", [](const Graph& g, std::size_t topk) {
        EigenOptions o;
        if (topk > 0) {
            o.mode = SpectrumMode::topk;
            o.k = topk;
        }
        const auto s = eigendecompose(g.q(), o);
        return py::make_tuple(s.values, s.vectors);
    }, py::arg("graph"), py::arg("topk") = 0, "eigenvalues descending and matching eigenvector columns");

    m.def("bound_report", [](const Graph& g, const Matrix& h) {
        const auto r = eigenvector_bound(g.q(), h);
        py::dict d;
        d["lambda1"] = r.lambda1;
        d["delta1"] = r.delta1;
        d["epsilon"] = r.epsilon;
        d["cos_x"] = r.cos_x;
        d["cos_qx"] = r.cos_qx;
        d["bound_x"] = r.bound_x;
        d["bound_qx"] = r.bound_qx;
        d["applicable"] = r.applicable;
        d["holds"] = r.holds();
        return d;
    }, py::arg("graph"), py::arg("h"));

    m.def("reduce", [](const Matrix& x, std::size_t k, double theta, const std::string& method, std::uint64_t seed,
                       std::size_t max_sweeps) {
        ReduceOptions o;
        o.k = k;
        o.theta = theta;
        o.seed = seed;
        o.max_sweeps = max_sweeps;
        if (method == "sphere") o.method = ReduceMethod::sphere;
        else if (method != "cafe") throw InputError("method must be cafe or sphere");
        const PointCloud cloud = center(x);
        const auto r = reduce(cloud, o);
        const auto cols = low_residual_columns(r.residuals);
        py::dict d = embedding_dict(r.embedding);
        d["residuals"] = r.residuals;
        d["low_residual_columns"] = cols;
        d["reconstruction"] = reconstruct(cloud, r.embedding.h_hat, cols);
        return d;
    }, py::arg("x"), py::arg("k") = 6, py::arg("theta") = 0.01, py::arg("method") = "cafe", py::arg("seed") = 0,
       py::arg("max_sweeps") = 200);
}
