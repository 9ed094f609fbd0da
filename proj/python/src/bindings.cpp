#include "klr/config.hpp"
#include "klr/deletion.hpp"
#include "klr/lab.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace klr;

namespace
{
    py::int_ to_py(const Count & c)
    {
        return py::int_(py::module_::import("builtins").attr("int")(c.str()));
    }

    PatternGraph pattern_from(const py::object & obj)
    {
        if (py::isinstance<PatternGraph>(obj))
            return obj.cast<PatternGraph>();
        return parse_pattern_spec(obj.cast<std::string>());
    }

    BitMatrix matrix_from(const std::vector<std::vector<int>> & rows)
    {
        const int n = static_cast<int>(rows.size());
        BitMatrix b(n, n);
        for (int r = 0 ; r < n ; ++r) {
            if (static_cast<int>(rows[r].size()) != n)
                throw std::invalid_argument("block must be square");
            for (int c = 0 ; c < n ; ++c)
                if (rows[r][c])
                    b.set(r, c);
        }
        return b;
    }

    py::dict verdict_dict(const RegularityVerdict & v)
    {
        py::dict d;
        d["status"] = to_string(v.status);
        d["mode"] = to_string(v.mode);
        if (v.witness) {
            std::vector<int> rows, cols;
            for (auto r = v.witness->rows.find_first() ; r != Bits::npos ; r = v.witness->rows.find_next(r))
                rows.push_back(static_cast<int>(r));
            for (auto c = v.witness->cols.find_first() ; c != Bits::npos ; c = v.witness->cols.find_next(c))
                cols.push_back(static_cast<int>(c));
            d["witness"] = py::make_tuple(rows, cols, v.witness->density);
        }
        else
            d["witness"] = py::none();
        d["norm_bound"] = v.norm_bound;
        return d;
    }

    RegularityParams params_from(double eps, double lambda, std::optional<double> delta_beta)
    {
        RegularityParams p{eps, lambda, std::nullopt};
        if (delta_beta)
            p.delta = delta_schedule(lambda, *delta_beta);
        return p;
    }

    py::dict report_dict(const EstimateReport & r)
    {
        py::dict d;
        d["total"] = r.total;
        d["regular"] = r.regular;
        d["irregular"] = r.irregular;
        d["unknown"] = r.unknown;
        d["events"] = r.events;
        d["point"] = r.point;
        d["wilson95"] = py::make_tuple(r.wilson95.lo, r.wilson95.hi);
        d["degenerate"] = r.degenerate;
        d["m"] = r.m;
        d["threshold"] = r.threshold;
        return d;
    }

    py::dict trace_dict(const ExposureTrace & t)
    {
        py::dict d;
        d["m_requested"] = t.m_requested;
        d["m_used"] = t.m_used;
        d["rounds"] = t.rounds;
        d["d_sizes"] = t.d_sizes;
        d["g_star"] = t.g_star;
        d["survivors"] = t.survivors;
        d["copies"] = to_py(t.copies);
        return d;
    }
}

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Blow-up graph sampling, canonical counting and lower-regularity checks";

    py::register_exception_translator([] (std::exception_ptr p) {
        try {
            if (p)
                std::rethrow_exception(p);
        }
        catch (const std::length_error & e) {
            PyErr_SetString(PyExc_OverflowError, e.what());
        }
    });

    py::class_<PatternGraph>(m, "Pattern")
        .def(py::init([] (const std::string & spec) { return parse_pattern_spec(spec); }), py::arg("spec"))
        .def_property_readonly("k", &PatternGraph::k)
        .def_property_readonly("edges", [] (const PatternGraph & h) {
            std::vector<std::pair<int, int>> out;
            for (auto & e : h.edges())
                out.emplace_back(e.u, e.v);
            return out;
        })
        .def("has_edge", &PatternGraph::has_edge)
        .def("without_edge", &PatternGraph::without_edge)
        .def("spec", &PatternGraph::to_spec)
        .def("__eq__", [] (const PatternGraph & a, const PatternGraph & b) { return a == b; })
        .def("__repr__", [] (const PatternGraph & h) { return "Pattern('" + h.to_spec() + "')"; });

    m.def("pattern", [] (int k, const std::vector<std::pair<int, int>> & edges) { return validate_pattern(k, edges); },
          py::arg("k"), py::arg("edges"));
    m.def("complete", &complete_pattern);
    m.def("path", &path_pattern);
    m.def("cycle", &cycle_pattern);

    m.def("two_density", [] (const py::object & h) {
        auto t = two_density(pattern_from(h));
        return py::make_tuple(t.value.num, t.value.den, t.convention);
    }, "(numerator, denominator, convention flag)");
    m.def("log_phi", [] (const py::object & h, std::int64_t n, std::int64_t mm) { return phi(pattern_from(h), n, mm).ln; });
    m.def("log_expected_copies", [] (const py::object & h, std::int64_t n, std::int64_t mm, bool rooted) {
        return expected_copies(pattern_from(h), n, mm, rooted).ln;
    }, py::arg("pattern"), py::arg("n"), py::arg("m"), py::arg("rooted") = false);

    py::class_<BlowupGraph>(m, "BlowupGraph")
        .def(py::init([] (const py::object & h, int n) { return BlowupGraph(pattern_from(h), n); }))
        .def_property_readonly("n", &BlowupGraph::n)
        .def_property_readonly("pattern", &BlowupGraph::pattern)
        .def("edge_count", &BlowupGraph::edge_count)
        .def("block_edge_count", &BlowupGraph::block_edge_count)
        .def("add_edge", [] (BlowupGraph & g, int i, int u, int j, int v) {
            if (i < j)
                g.add_edge({PairKey::of(i, j), u, v});
            else
                g.add_edge({PairKey::of(i, j), v, u});
        }, py::arg("i"), py::arg("u"), py::arg("j"), py::arg("v"))
        .def("edges", [] (const BlowupGraph & g) {
            std::vector<std::tuple<int, int, int, int>> out;
            for (auto & e : g.edges())
                out.emplace_back(e.pair.i, e.u, e.pair.j, e.v);
            return out;
        }, "(part i, u, part j, v) with i < j")
        .def("to_json", [] (const BlowupGraph & g) { return to_json(g); })
        .def_static("from_json", &graph_from_json)
        .def("__eq__", [] (const BlowupGraph & a, const BlowupGraph & b) { return a == b; });

    m.def("new_host", [] (const py::object & h, int n, bool complete) {
        return new_host(pattern_from(h), n, complete ? Fill::complete : Fill::empty);
    }, py::arg("pattern"), py::arg("n"), py::arg("complete") = false);
    m.def("unite", &unite);
    m.def("intersect", &intersect);
    m.def("minus_pair", &minus_pair);

    m.def("sample", [] (const py::object & h, int n, std::int64_t mm, std::uint64_t seed, const std::string & label) {
        return sample_gnm_h(pattern_from(h), n, mm, {seed, label});
    }, py::arg("pattern"), py::arg("n"), py::arg("m"), py::arg("seed"), py::arg("label") = "");
    m.def("adversarial_split", [] (int n, std::int64_t mm, std::uint64_t seed, const std::string & label) {
        return adversarial_split(n, mm, {seed, label});
    }, py::arg("n"), py::arg("m"), py::arg("seed"), py::arg("label") = "");
    m.def("partition_exposure", [] (const BlowupGraph & g, int rounds, std::uint64_t seed, const std::string & label) {
        return partition_exposure(g, rounds, {seed, label});
    }, py::arg("graph"), py::arg("rounds"), py::arg("seed"), py::arg("label") = "");

    m.def("count", [] (const BlowupGraph & g, const py::object & h) {
        return to_py(count_canonical(g, h.is_none() ? g.pattern() : pattern_from(h)));
    }, py::arg("graph"), py::arg("pattern") = py::none());
    m.def("degrees", [] (const BlowupGraph & g, int a, int b, const py::object & h) {
        auto dv = degree_vector(g, h.is_none() ? g.pattern() : pattern_from(h), a, b);
        py::list rows;
        for (int u = 0 ; u < g.n() ; ++u) {
            py::list row;
            for (int v = 0 ; v < g.n() ; ++v)
                row.append(to_py(dv.at(u, v)));
            rows.append(row);
        }
        return rows;
    }, py::arg("graph"), py::arg("a"), py::arg("b"), py::arg("pattern") = py::none());
    m.def("glued_identity", [] (const BlowupGraph & g, const py::object & h, int a, int b) {
        auto id = glued_identity(g, pattern_from(h), a, b);
        return py::make_tuple(to_py(id.squares), to_py(id.glued_copies));
    });
    m.def("census", [] (const BlowupGraph & g, const py::object & h, int a, int b, double gamma, std::int64_t mm) {
        auto r = census(g, pattern_from(h), a, b, gamma, mm);
        py::dict d;
        d["z"] = to_py(r.z);
        d["square_sum"] = to_py(r.square_sum);
        d["second_moment"] = r.second_moment;
        d["ln_mu_e"] = r.mu_e.ln;
        d["rich_count"] = r.rich_count;
        d["poor_count"] = r.poor_count;
        d["ratio_t"] = r.ratio_t;
        return d;
    });

    m.def("check_block", [] (const std::vector<std::vector<int>> & rows, double eps, double lambda, const std::string & mode,
                             std::optional<double> delta_beta, std::uint64_t cap) {
        auto b = matrix_from(rows);
        auto p = params_from(eps, lambda, delta_beta);
        switch (parse_mode(mode)) {
        case RegularityMode::exact: return verdict_dict(check_exact(b, p, {cap}));
        case RegularityMode::spectral: return verdict_dict(check_spectral(b, p));
        default: return verdict_dict(check_heuristic(b, p, 8, {0, "python"}));
        }
    }, py::arg("block"), py::arg("eps"), py::arg("lam"), py::arg("mode") = "exact", py::arg("delta_beta") = py::none(),
       py::arg("cap") = 100'000'000ULL);
    m.def("check_graph", [] (const BlowupGraph & g, double eps, double lambda, const std::string & mode, std::uint64_t seed) {
        CheckOptions opt;
        opt.mode = parse_mode(mode);
        opt.seed = {seed, "regularity"};
        auto v = check_blowup(g, {eps, lambda, std::nullopt}, opt);
        py::dict pairs;
        for (auto & [key, verdict] : v.pairs)
            pairs[py::str(key.to_string())] = verdict_dict(verdict);
        py::dict d;
        d["all_certified"] = v.all_certified;
        d["any_irregular"] = v.any_irregular;
        d["pairs"] = pairs;
        return d;
    }, py::arg("graph"), py::arg("eps"), py::arg("lam"), py::arg("mode") = "exact", py::arg("seed") = 0);

    m.def("deletion_set", [] (const BlowupGraph & g, const py::object & h, std::int64_t budget) {
        auto out = deletion_set(g, pattern_from(h), budget);
        py::dict d;
        d["status"] = to_string(out.status);
        d["removed"] = out.removed_size;
        d["residual"] = to_py(out.residual.begin()->second);
        return d;
    });

    m.def("derive_constants", [] (const py::object & h, const py::object & hp, double lambda, double beta, double d, double eps,
                                  double xi_pp, double gamma_pp, double t, std::int64_t n, std::int64_t mm) {
        auto c = derive_constants(pattern_from(h), pattern_from(hp), {lambda, beta, d, eps, xi_pp, gamma_pp, t, n, mm});
        py::dict out;
        out["d0"] = c.d0;
        out["beta1"] = c.beta1;
        out["beta2"] = c.beta2;
        out["xi_prime"] = c.xi_prime;
        out["z"] = c.z;
        out["xi"] = c.xi;
        out["gamma_prime"] = c.gamma_prime;
        out["gamma"] = c.gamma;
        out["m_prime"] = c.m_prime;
        out["ln_mu"] = c.mu.ln;
        out["ln_mu_e"] = c.mu_e.ln;
        return out;
    }, py::arg("pattern"), py::arg("sub"), py::arg("lam"), py::arg("beta"), py::arg("d"), py::arg("eps"), py::arg("xi2"),
       py::arg("gamma2"), py::arg("T"), py::arg("n"), py::arg("m"));

    m.def("wilson_interval", [] (std::size_t k, std::size_t trials) {
        auto w = wilson_interval(k, trials);
        return py::make_tuple(w.lo, w.hi);
    });

    m.def("run_config", [] (const std::string & path, std::optional<std::string> output, bool deterministic) {
        RunOverrides ov;
        ov.output = output;
        ov.deterministic = deterministic;
        RunResult res;
        {
            py::gil_scoped_release release;
            res = run_config(path, ov);
        }
        py::dict d;
        d["experiment"] = res.experiment;
        d["manifest"] = res.manifest;
        d["artifacts"] = res.artifacts;
        if (res.estimate)
            d["report"] = report_dict(*res.estimate);
        if (res.trace)
            d["trace"] = trace_dict(*res.trace);
        return d;
    }, py::arg("path"), py::arg("output") = py::none(), py::arg("deterministic") = false);

    m.def("multi_exposure", [] (const py::object & h, int n, std::int64_t mm, int z, std::uint64_t seed, int a, int b, bool cumulative) {
        return trace_dict(multi_exposure_experiment(pattern_from(h), n, mm, z, a, b, {seed, ""}, cumulative));
    }, py::arg("pattern"), py::arg("n"), py::arg("m"), py::arg("z"), py::arg("seed"), py::arg("a") = 0, py::arg("b") = 1,
       py::arg("cumulative") = true);
}
