#include "klr/config.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#ifndef KLR_VERSION
#define KLR_VERSION "0.0.0"
#endif

namespace klr {

using ojson = nlohmann::ordered_json;

namespace
{
    [[noreturn]] void field_error(const std::string & field, const std::string & what)
    {
        throw std::invalid_argument("config: field '" + field + "' " + what);
    }

    const ojson & need(const ojson & j, const std::string & field)
    {
        auto it = j.find(field);
        if (it == j.end())
            field_error(field, "is missing");
        return *it;
    }

    std::int64_t as_int(const ojson & v, const std::string & field)
    {
        if (! v.is_number_integer())
            field_error(field, "must be an integer");
        return v.get<std::int64_t>();
    }

    double as_real(const ojson & v, const std::string & field)
    {
        if (! v.is_number())
            field_error(field, "must be a number");
        return v.get<double>();
    }

    std::string as_text(const ojson & v, const std::string & field)
    {
        if (! v.is_string())
            field_error(field, "must be a string");
        return v.get<std::string>();
    }

    bool as_bool(const ojson & v, const std::string & field)
    {
        if (! v.is_boolean())
            field_error(field, "must be true or false");
        return v.get<bool>();
    }

    const std::set<std::string> known_fields = {
        "experiment", "pattern", "n", "m", "C", "eps", "lambda", "gamma", "samples", "seed", "mode",
        "restarts", "enumeration_cap", "max_n", "output", "threads", "deterministic", "z", "pair", "cumulative",
    };

    ExperimentConfig from_object(const ojson & j)
    {
        if (! j.is_object())
            throw std::invalid_argument("config: top level must be an object");
        for (auto & [key, value] : j.items())
            if (! known_fields.count(key))
                field_error(key, "is not a recognised field");

        ExperimentConfig cfg;
        if (j.contains("experiment")) {
            cfg.experiment = as_text(j["experiment"], "experiment");
            if (cfg.experiment != "estimate" && cfg.experiment != "expose")
                field_error("experiment", "must be \"estimate\" or \"expose\"");
        }
        try {
            cfg.pattern = parse_pattern_spec(as_text(need(j, "pattern"), "pattern"));
        }
        catch (const std::invalid_argument & e) {
            if (std::string(e.what()).starts_with("config:"))
                throw;
            field_error("pattern", std::string("is invalid: ") + e.what());
        }
        cfg.n = static_cast<int>(as_int(need(j, "n"), "n"));
        if (cfg.n < 1)
            field_error("n", "must be positive");
        if (j.contains("m"))
            cfg.m = as_int(j["m"], "m");
        if (j.contains("C"))
            cfg.c = as_real(j["C"], "C");
        if (! cfg.m && ! cfg.c)
            field_error("m", "is missing (give 'm' or 'C')");
        if (cfg.m && cfg.c)
            field_error("C", "conflicts with 'm'");
        const auto seed = as_int(need(j, "seed"), "seed");
        if (seed < 0)
            field_error("seed", "must be non-negative");
        cfg.seed = static_cast<std::uint64_t>(seed);

        const bool estimate = cfg.experiment == "estimate";
        auto real = [&] (const char * field, double & out) {
            if (estimate)
                out = as_real(need(j, field), field);
            else if (j.contains(field))
                out = as_real(j[field], field);
        };
        real("eps", cfg.eps);
        real("lambda", cfg.lambda);
        real("gamma", cfg.gamma);
        if (estimate || j.contains("samples")) {
            const auto s = as_int(need(j, "samples"), "samples");
            if (s < 0)
                field_error("samples", "must be non-negative");
            cfg.samples = static_cast<std::size_t>(s);
        }
        if (j.contains("mode")) {
            try {
                cfg.mode = parse_mode(as_text(j["mode"], "mode"));
            }
            catch (const std::invalid_argument & e) {
                if (std::string(e.what()).starts_with("config:"))
                    throw;
                field_error("mode", e.what());
            }
        }
        if (j.contains("restarts"))
            cfg.restarts = static_cast<int>(as_int(j["restarts"], "restarts"));
        if (j.contains("enumeration_cap"))
            cfg.enumeration_cap = static_cast<std::uint64_t>(as_int(j["enumeration_cap"], "enumeration_cap"));
        if (j.contains("max_n"))
            cfg.max_n = static_cast<int>(as_int(j["max_n"], "max_n"));
        if (j.contains("output"))
            cfg.output = as_text(j["output"], "output");
        if (j.contains("threads")) {
            const auto t = as_int(j["threads"], "threads");
            if (t < 0)
                field_error("threads", "must be non-negative");
            cfg.threads = static_cast<unsigned>(t);
        }
        if (j.contains("deterministic"))
            cfg.deterministic = as_bool(j["deterministic"], "deterministic");

        if (! estimate || j.contains("z")) {
            cfg.z = static_cast<int>(as_int(need(j, "z"), "z"));
            if (cfg.z < 1)
                field_error("z", "must be at least 1");
        }
        if (j.contains("pair")) {
            auto & p = j["pair"];
            if (! p.is_array() || p.size() != 2 || ! p[0].is_number_integer() || ! p[1].is_number_integer())
                field_error("pair", "must be a list of two part indices");
            cfg.a = p[0].get<int>();
            cfg.b = p[1].get<int>();
        }
        if (j.contains("cumulative"))
            cfg.cumulative = as_bool(j["cumulative"], "cumulative");
        return cfg;
    }

    ojson config_object(const ExperimentConfig & cfg)
    {
        ojson j;
        j["experiment"] = cfg.experiment;
        j["pattern"] = cfg.pattern.to_spec();
        j["n"] = cfg.n;
        if (cfg.m)
            j["m"] = *cfg.m;
        if (cfg.c)
            j["C"] = *cfg.c;
        j["eps"] = cfg.eps;
        j["lambda"] = cfg.lambda;
        j["gamma"] = cfg.gamma;
        j["samples"] = cfg.samples;
        j["seed"] = cfg.seed;
        j["mode"] = to_string(cfg.mode);
        j["restarts"] = cfg.restarts;
        j["enumeration_cap"] = cfg.enumeration_cap;
        j["max_n"] = cfg.max_n;
        j["output"] = cfg.output;
        j["threads"] = cfg.threads;
        j["deterministic"] = cfg.deterministic;
        j["z"] = cfg.z;
        j["pair"] = {cfg.a, cfg.b};
        j["cumulative"] = cfg.cumulative;
        return j;
    }

    std::string write_text(const std::filesystem::path & path, const std::string & text)
    {
        std::ofstream out(path, std::ios::binary);
        if (! out)
            throw std::runtime_error("cannot write " + path.string());
        out << text;
        return path.string();
    }

    std::string compiler()
    {
#if defined(__clang__)
        return "clang " __clang_version__;
#elif defined(__GNUC__)
        return "gcc " __VERSION__;
#else
        return "unknown";
#endif
    }
}

ExperimentConfig parse_config(const std::string & text)
{
    ojson j;
    try {
        j = ojson::parse(text);
    }
    catch (const ojson::parse_error & e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    if (j.is_object() && j.contains("config") && j.contains("manifest_version"))
        return from_object(j["config"]);
    return from_object(j);
}

ExperimentConfig load_config(const std::string & path)
{
    std::ifstream in(path, std::ios::binary);
    if (! in)
        throw std::runtime_error("cannot read config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_json(const ExperimentConfig & cfg)
{
    return config_object(cfg).dump(2) + "\n";
}

std::vector<std::string> write_report(const ExperimentConfig & cfg, const EstimateReport & report, const std::string & dir)
{
    std::filesystem::create_directories(dir);
    return {
        write_text(std::filesystem::path(dir) / "report.json", report_json(cfg, report)),
        write_text(std::filesystem::path(dir) / "samples.csv", samples_csv(report)),
    };
}

RunResult run_config(const std::string & path, const RunOverrides & overrides)
{
    return run_config(load_config(path), overrides);
}

RunResult run_config(ExperimentConfig cfg, const RunOverrides & overrides)
{
    if (overrides.threads)
        cfg.threads = *overrides.threads;
    if (overrides.deterministic)
        cfg.deterministic = true;
    if (overrides.output)
        cfg.output = *overrides.output;

    RunResult res;
    res.experiment = cfg.experiment;
    const auto start = std::chrono::steady_clock::now();
    std::int64_t m_used = 0;

    if (cfg.experiment == "estimate") {
        res.estimate = estimate_hfree_probability(cfg);
        m_used = res.estimate->m;
        if (! cfg.output.empty())
            res.artifacts = write_report(cfg, *res.estimate, cfg.output);
    }
    else {
        if (cfg.n > cfg.max_n)
            throw std::invalid_argument("config: n exceeds the cap max_n");
        res.trace = multi_exposure_experiment(cfg.pattern, cfg.n, resolve_m(cfg), cfg.z, cfg.a, cfg.b,
                SeedSpec{cfg.seed, ""}, cfg.cumulative);
        m_used = res.trace->m_used;
        if (! cfg.output.empty()) {
            std::filesystem::create_directories(cfg.output);
            res.artifacts.push_back(write_text(std::filesystem::path(cfg.output) / "trace.json", trace_json(*res.trace)));
        }
    }

    const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
    ojson man;
    man["manifest_version"] = 1;
    man["tool"] = "klr_lab";
    man["version"] = KLR_VERSION;
    man["compiler"] = compiler();
    man["experiment"] = cfg.experiment;
    man["seed"] = cfg.seed;
    man["m_used"] = m_used;
    man["config"] = config_object(cfg);
    man["wall_seconds"] = wall.count();
    ojson names = ojson::array();
    for (auto & a : res.artifacts)
        names.push_back(std::filesystem::path(a).filename().string());
    man["artifacts"] = names;
    res.manifest = man.dump(2) + "\n";
    if (! cfg.output.empty())
        res.artifacts.push_back(write_text(std::filesystem::path(cfg.output) / "manifest.json", res.manifest));
    return res;
}

} // namespace klr
