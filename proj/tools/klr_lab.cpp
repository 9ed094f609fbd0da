#include "klr/config.hpp"
#include "klr/deletion.hpp"
#include "klr/lab.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

using namespace klr;
using ojson = nlohmann::ordered_json;

namespace
{
    void emit(const std::string & text, const std::string & path)
    {
        if (path.empty() || path == "-") {
            std::cout << text;
            return;
        }
        std::ofstream out(path, std::ios::binary);
        if (! out)
            throw std::runtime_error("cannot write " + path);
        out << text;
    }

    std::string hex64(std::uint64_t x)
    {
        std::ostringstream ss;
        ss << "0x" << std::hex << x;
        return ss.str();
    }

    ojson verdict_json(const RegularityVerdict & v)
    {
        ojson j;
        j["status"] = to_string(v.status);
        j["mode"] = to_string(v.mode);
        if (v.witness) {
            ojson rows = ojson::array(), cols = ojson::array();
            for (auto r = v.witness->rows.find_first() ; r != Bits::npos ; r = v.witness->rows.find_next(r))
                rows.push_back(r);
            for (auto c = v.witness->cols.find_first() ; c != Bits::npos ; c = v.witness->cols.find_next(c))
                cols.push_back(c);
            j["witness"] = {{"rows", rows}, {"cols", cols}, {"density", v.witness->density}};
        }
        if (v.mode == RegularityMode::spectral) {
            j["norm_bound"] = v.norm_bound;
            j["norm_estimate"] = v.norm_estimate;
        }
        return j;
    }

    // "lambda=0.5,beta=0.5,..." into ConstantInputs
    ConstantInputs parse_params(const std::string & text)
    {
        ConstantInputs in;
        std::map<std::string, double *> reals = {
            {"lambda", &in.lambda}, {"beta", &in.beta}, {"d", &in.d}, {"eps", &in.eps},
            {"xi2", &in.xi_pp}, {"gamma2", &in.gamma_pp}, {"T", &in.t},
        };
        std::istringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty())
                continue;
            const auto eq = item.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("--params: expected key=value, got '" + item + "'");
            const auto key = item.substr(0, eq);
            const auto value = item.substr(eq + 1);
            try {
                if (key == "n")
                    in.n = std::stoll(value);
                else if (key == "m")
                    in.m = std::stoll(value);
                else if (auto it = reals.find(key) ; it != reals.end())
                    *it->second = std::stod(value);
                else
                    throw std::invalid_argument("--params: unknown key '" + key + "'");
            }
            catch (const std::logic_error & e) {
                if (dynamic_cast<const std::invalid_argument *>(&e) && std::string(e.what()).starts_with("--params"))
                    throw;
                throw std::invalid_argument("--params: bad value for '" + key + "': " + value);
            }
        }
        return in;
    }

    ojson ledger_json(const ConstantLedger & c)
    {
        ojson j;
        j["inputs"] = {{"lambda", c.inputs.lambda}, {"beta", c.inputs.beta}, {"d", c.inputs.d}, {"eps", c.inputs.eps},
                       {"xi2", c.inputs.xi_pp}, {"gamma2", c.inputs.gamma_pp}, {"T", c.inputs.t}, {"n", c.inputs.n}, {"m", c.inputs.m}};
        j["d0"] = c.d0;
        j["d_effective"] = c.d_eff;
        j["beta1"] = c.beta1;
        j["beta2"] = c.beta2;
        j["xi_prime"] = c.xi_prime;
        j["z"] = c.z;
        j["xi"] = c.xi;
        j["gamma_prime"] = c.gamma_prime;
        j["gamma"] = c.gamma;
        j["m_prime"] = c.m_prime;
        j["ln_mu"] = c.mu.ln;
        j["ln_mu_e"] = c.mu_e.ln;
        return j;
    }
}

int main(int argc, char ** argv)
{
    CLI::App app{"klr-lab: blow-up graph sampling, counting and lower-regularity experiments"};
    app.require_subcommand(1);

    std::string pattern_spec, graph_path, out_path;
    int n = 0;
    std::int64_t m = 0;
    std::uint64_t seed = 0;
    std::string label;

    auto * sample = app.add_subcommand("sample", "draw G^H_{n,m} and print it as JSON");
    sample->add_option("--pattern", pattern_spec, "pattern, e.g. \"k=3;edges=0-1,0-2,1-2\"")->required();
    sample->add_option("--n", n, "part size")->required();
    sample->add_option("--m", m, "edges per pattern block")->required();
    sample->add_option("--seed", seed, "master seed")->required();
    sample->add_option("--label", label, "substream label");
    sample->add_option("--out", out_path, "output file (default stdout)");

    auto * split = app.add_subcommand("split", "the triangle-free split construction on K_3");
    split->add_option("--n", n)->required();
    split->add_option("--m", m)->required();
    split->add_option("--seed", seed)->required();
    split->add_option("--label", label);
    split->add_option("--out", out_path);

    int rounds = 2;
    std::string out_dir;
    auto * expose = app.add_subcommand("expose", "split a graph into equal random chunks");
    expose->add_option("--graph", graph_path)->required();
    expose->add_option("--rounds", rounds)->required();
    expose->add_option("--seed", seed)->required();
    expose->add_option("--label", label);
    expose->add_option("--out-dir", out_dir, "directory for chunk_<i>.json")->required();

    double eps = 0.25, lambda = 0.5, delta_beta = 0;
    std::string mode = "exact";
    int restarts = 8;
    std::uint64_t cap = 100'000'000;
    std::int64_t target_m = -1;
    auto * reg = app.add_subcommand("regularity", "check lower-regularity of every pattern block");
    reg->add_option("--graph", graph_path)->required();
    reg->add_option("--eps", eps);
    reg->add_option("--lambda", lambda);
    reg->add_option("--delta-beta", delta_beta, "use the function form with the extremal schedule for (lambda, beta)");
    reg->add_option("--mode", mode)->check(CLI::IsMember({"exact", "heuristic", "spectral"}));
    reg->add_option("--restarts", restarts);
    reg->add_option("--seed", seed);
    reg->add_option("--cap", cap, "exact-mode enumeration cap");
    reg->add_option("--target-m", target_m, "also report membership in G(H, n, m, eps, lambda)");

    auto * count = app.add_subcommand("count", "number of canonical copies");
    count->add_option("--graph", graph_path)->required();
    count->add_option("--pattern", pattern_spec, "defaults to the graph's pattern");

    int a = 0, b = 1;
    auto * degrees = app.add_subcommand("degrees", "rooted degrees over V_a x V_b as CSV u,v,deg");
    degrees->add_option("--graph", graph_path)->required();
    degrees->add_option("--pattern", pattern_spec);
    degrees->add_option("--a", a)->required();
    degrees->add_option("--b", b)->required();
    degrees->add_option("--out", out_path);

    double gamma = 0.5;
    auto * cen = app.add_subcommand("census", "copies, degree moments, rich and poor pairs");
    cen->add_option("--graph", graph_path)->required();
    cen->add_option("--pattern", pattern_spec);
    cen->add_option("--a", a)->required();
    cen->add_option("--b", b)->required();
    cen->add_option("--gamma", gamma);
    cen->add_option("--m", m, "model edges per block (default: measured)");

    std::int64_t budget = 0;
    double xi = 0, ref_t = 0;
    bool second = false;
    auto * del = app.add_subcommand("delete", "deletion set for a pattern, or for the second moment at (a, b)");
    del->add_option("--graph", graph_path)->required();
    del->add_option("--pattern", pattern_spec);
    del->add_option("--budget", budget);
    del->add_flag("--second-moment", second);
    del->add_option("--a", a);
    del->add_option("--b", b);
    del->add_option("--xi", xi);
    del->add_option("--T", ref_t, "reference ratio");
    del->add_option("--out", out_path, "write G - X here");

    std::string config_path;
    unsigned threads = 0;
    bool deterministic = false;
    auto * exp = app.add_subcommand("experiment", "run a JSON config");
    exp->add_option("--config", config_path)->required();
    exp->add_option("--threads", threads, "worker cap (default KLR_LAB_THREADS or all cores)");
    exp->add_flag("--deterministic", deterministic, "one worker, sequential order");
    exp->add_option("--output", out_dir, "artifact directory (overrides the config)");

    std::string sub_spec, params;
    auto * cons = app.add_subcommand("constants", "the constants chain for (H, H')");
    cons->add_option("--pattern", pattern_spec)->required();
    cons->add_option("--sub", sub_spec, "H' (default H)");
    cons->add_option("--params", params, "lambda=..,beta=..,d=..,eps=..,xi2=..,gamma2=..,T=..,n=..,m=..");

    int z = 2;
    bool per_chunk = false;
    auto * erun = app.add_subcommand("expose-run", "multi-exposure experiment on a fresh sample");
    erun->add_option("--pattern", pattern_spec)->required();
    erun->add_option("--n", n)->required();
    erun->add_option("--m", m)->required();
    erun->add_option("--z", z)->required();
    erun->add_option("--seed", seed)->required();
    erun->add_option("--a", a);
    erun->add_option("--b", b);
    erun->add_flag("--per-chunk", per_chunk, "use chunk i alone in round i instead of chunks 1..i");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sample) {
            emit(to_json(sample_gnm_h(parse_pattern_spec(pattern_spec), n, m, {seed, label})) + "\n", out_path);
        }
        else if (*split) {
            emit(to_json(adversarial_split(n, m, {seed, label})) + "\n", out_path);
        }
        else if (*expose) {
            auto chunks = partition_exposure(load_graph(graph_path), rounds, {seed, label});
            std::filesystem::create_directories(out_dir);
            for (std::size_t i = 0 ; i < chunks.size() ; ++i)
                save_graph(chunks[i], (std::filesystem::path(out_dir) / ("chunk_" + std::to_string(i + 1) + ".json")).string());
        }
        else if (*reg) {
            auto g = load_graph(graph_path);
            RegularityParams prm{eps, lambda, std::nullopt};
            if (delta_beta > 0)
                prm.delta = delta_schedule(lambda, delta_beta);
            CheckOptions opt;
            opt.mode = parse_mode(mode);
            opt.exact.enumeration_cap = cap;
            opt.restarts = restarts;
            opt.seed = {seed, "regularity"};
            if (target_m >= 0)
                opt.target_m = target_m;
            auto v = check_blowup(g, prm, opt);
            ojson j;
            j["all_certified"] = v.all_certified;
            j["any_irregular"] = v.any_irregular;
            if (v.in_family)
                j["in_family"] = *v.in_family;
            ojson pairs;
            for (auto & [key, verdict] : v.pairs)
                pairs[key.to_string()] = verdict_json(verdict);
            j["pairs"] = pairs;
            std::cout << j.dump(2) << "\n";
        }
        else if (*count) {
            auto g = load_graph(graph_path);
            auto h = pattern_spec.empty() ? g.pattern() : parse_pattern_spec(pattern_spec);
            std::cout << count_canonical(g, h).str() << "\n";
        }
        else if (*degrees) {
            auto g = load_graph(graph_path);
            auto h = pattern_spec.empty() ? g.pattern() : parse_pattern_spec(pattern_spec);
            auto dv = degree_vector(g, h, a, b);
            std::ostringstream out;
            out << "u,v,deg\n";
            for (int u = 0 ; u < g.n() ; ++u)
                for (int v = 0 ; v < g.n() ; ++v)
                    out << u << ',' << v << ',' << dv.at(u, v).str() << '\n';
            emit(out.str(), out_path);
        }
        else if (*cen) {
            auto g = load_graph(graph_path);
            auto h = pattern_spec.empty() ? g.pattern() : parse_pattern_spec(pattern_spec);
            const auto model_m = cen->count("--m") ? m : per_block_edges(g, h);
            auto r = census(g, h, a, b, gamma, model_m);
            ojson j;
            j["z"] = r.z.str();
            j["degree_sum"] = r.degree_sum.str();
            j["square_sum"] = r.square_sum.str();
            j["second_moment"] = r.second_moment;
            j["ln_mu_e"] = r.mu_e.ln;
            j["rich_count"] = r.rich_count;
            j["poor_count"] = r.poor_count;
            j["ratio_t"] = r.ratio_t;
            std::cout << j.dump(2) << "\n";
        }
        else if (*del) {
            auto g = load_graph(graph_path);
            auto h = pattern_spec.empty() ? g.pattern() : parse_pattern_spec(pattern_spec);
            auto out = second ? deletion_for_second_moment(g, h, a, b, xi, ref_t) : deletion_set(g, h, budget);
            ojson j;
            j["status"] = to_string(out.status);
            j["removed"] = out.removed_size;
            ojson res;
            for (auto & [key, left] : out.residual)
                res[key] = left.str();
            j["residual"] = res;
            if (second) {
                j["ratio_before"] = out.ratio_before;
                j["measured_t"] = out.measured_t;
                j["below_reference_t"] = out.below_reference_t;
            }
            std::cout << j.dump(2) << "\n";
            if (! out_path.empty())
                save_graph(difference(g, out.removed), out_path);
        }
        else if (*exp) {
            RunOverrides ov;
            if (exp->count("--threads"))
                ov.threads = threads;
            ov.deterministic = deterministic;
            if (! out_dir.empty())
                ov.output = out_dir;
            auto res = run_config(config_path, ov);
            if (res.estimate) {
                auto & r = *res.estimate;
                std::cout << "samples " << r.total << ", regular " << r.regular << ", irregular " << r.irregular
                          << ", unknown " << r.unknown << ", events " << r.events << ", estimate " << r.point
                          << " [" << r.wilson95.lo << ", " << r.wilson95.hi << "]" << (r.degenerate ? " (degenerate)" : "") << "\n";
            }
            else
                std::cout << trace_json(*res.trace);
            for (auto & path : res.artifacts)
                std::cout << "wrote " << path << "\n";
        }
        else if (*cons) {
            auto h = parse_pattern_spec(pattern_spec);
            auto hp = sub_spec.empty() ? h : parse_pattern_spec(sub_spec);
            std::cout << ledger_json(derive_constants(h, hp, parse_params(params))).dump(2) << "\n";
        }
        else if (*erun) {
            auto t = multi_exposure_experiment(parse_pattern_spec(pattern_spec), n, m, z, a, b, {seed, ""}, ! per_chunk);
            std::cout << trace_json(t);
        }
    }
    catch (const std::exception & e) {
        std::cerr << "klr-lab: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
