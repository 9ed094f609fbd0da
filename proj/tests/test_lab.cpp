#include "klr/config.hpp"
#include "klr/lab.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace klr;

namespace
{
    std::string slurp(const std::string & path)
    {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    std::string scratch(const std::string & name)
    {
        auto p = std::filesystem::temp_directory_path() / ("klr_lab_test_" + name);
        std::filesystem::remove_all(p);
        return p.string();
    }
}

TEST_CASE("constants: direct formulas")
{
    auto h = complete_pattern(3);
    ConstantInputs in;
    in.gamma_pp = 1;
    in.t = 1;
    in.lambda = 0.999999;
    in.eps = 0.999999;
    auto c = derive_constants(h, h, in);
    CHECK(c.z == 4);
    CHECK(c.gamma_prime == doctest::Approx(1.0 / 8).epsilon(1e-5));
    CHECK(c.beta2 < c.beta1);
    CHECK(c.beta1 < in.beta);
    CHECK(c.gamma < c.gamma_prime);
    CHECK(c.xi < c.xi_prime);
    CHECK(c.mu.ln == doctest::Approx((c.mu_e * LogScale::of(c.m_prime)).ln));
}

TEST_CASE("constants: decimal recomputation")
{
    auto h = complete_pattern(3);
    auto hp = h.without_edge(1, 2);
    ConstantInputs in{0.5, 0.5, 0.5, 0.1, 0.1, 0.01, 100, 1000, 100000000};
    auto c = derive_constants(h, hp, in);
    auto ref = oracle::ledger(3, 2, in);
    CHECK(c.z == ref.z);
    CHECK(oracle::rel_err(c.beta1, ref.beta1) < 1e-12);
    CHECK(oracle::rel_err(c.beta2, ref.beta2) < 1e-12);
    CHECK(oracle::rel_err(c.xi_prime, ref.xi_prime) < 1e-12);
    CHECK(oracle::rel_err(c.xi, ref.xi) < 1e-12);
    CHECK(oracle::rel_err(c.gamma_prime, ref.gamma_prime) < 1e-12);
    CHECK(oracle::rel_err(c.gamma, ref.gamma) < 1e-12);
    CHECK(oracle::rel_err(c.m_prime, ref.m_prime) < 1e-12);
    CHECK(oracle::rel_err(c.mu.value(), exp(ref.ln_mu)) < 1e-12);
    CHECK(oracle::rel_err(c.mu_e.value(), exp(ref.ln_mu_e)) < 1e-12);
}

TEST_CASE("constants: bad input")
{
    auto h = complete_pattern(3);
    ConstantInputs in;
    CHECK_THROWS(derive_constants(h, validate_pattern(3, {}), in));
    CHECK_THROWS(derive_constants(path_pattern(3), h, in));
    in.t = 0;
    CHECK_THROWS(derive_constants(h, h, in));
    in = {};
    in.beta = 1;
    CHECK_THROWS(derive_constants(h, h, in));
}

TEST_CASE("wilson interval")
{
    auto w = wilson_interval(0, 10);
    CHECK(w.lo == 0);
    CHECK(w.hi == doctest::Approx(0.2775).epsilon(1e-3));
    w = wilson_interval(5, 10);
    CHECK(w.lo == doctest::Approx(0.2366).epsilon(1e-3));
    CHECK(w.hi == doctest::Approx(0.7634).epsilon(1e-3));
    w = wilson_interval(0, 0);
    CHECK(w.lo == 0);
    CHECK(w.hi == 1);
    CHECK_THROWS(wilson_interval(3, 2));
}

TEST_CASE("estimator edge cases")
{
    ExperimentConfig cfg;
    cfg.pattern = complete_pattern(3);
    cfg.n = 5;
    cfg.m = 25;
    cfg.samples = 0;
    auto r = estimate_hfree_probability(cfg);
    CHECK(r.degenerate);
    CHECK(r.wilson95.lo == 0);
    CHECK(r.wilson95.hi == 1);

    // complete host: Z = n^3 is far above gamma times the expectation
    cfg.samples = 5;
    cfg.gamma = 0.5;
    r = estimate_hfree_probability(cfg);
    CHECK(r.regular == 5);
    CHECK(r.events == 0);
    CHECK(r.point == 0);

    cfg.n = 100;
    CHECK_THROWS(estimate_hfree_probability(cfg));
}

TEST_CASE("estimator: threads and order do not matter")
{
    ExperimentConfig cfg;
    cfg.pattern = complete_pattern(3);
    cfg.n = 8;
    cfg.m = 20;
    cfg.samples = 40;
    cfg.gamma = 0.5;
    cfg.deterministic = true;
    auto seq = estimate_hfree_probability(cfg);
    cfg.deterministic = false;
    cfg.threads = 3;
    auto par = estimate_hfree_probability(cfg);
    CHECK(samples_csv(seq) == samples_csv(par));
    CHECK(report_json(cfg, seq) == report_json(cfg, par));

    auto again = summarize(seq.records, seq.m, seq.threshold);
    CHECK(again.events == seq.events);
    CHECK(again.regular == seq.regular);
    CHECK(again.total == seq.total);
    CHECK(seq.events <= seq.regular);
    CHECK(seq.regular + seq.irregular + seq.unknown == seq.total);
}

TEST_CASE("m from the exponent rule")
{
    ExperimentConfig cfg;
    cfg.pattern = complete_pattern(3);
    cfg.n = 16;
    cfg.c = 1.0;
    // m_2(K_3) = 2: ceil(16^1.5) = 64
    CHECK(resolve_m(cfg) == 64);
    cfg.c = 100;
    CHECK(resolve_m(cfg) == 256);
}

TEST_CASE("advancing check")
{
    auto h = complete_pattern(3);
    auto hp = h.without_edge(0, 2);
    ConstantInputs in{0.5, 0.5, 0.5, 0.25, 0.1, 0.5, 1, 4, 16};
    auto ledger = derive_constants(h, hp, in);

    auto full = new_host(h, 4, Fill::complete);
    auto v = advancing_check(full, full, full, {}, ledger, h, hp, 0, 1);
    CHECK(v.clause == AdvancingClause::a);
    CHECK(v.copies == 64);

    auto empty = new_host(h, 4, Fill::empty);
    v = advancing_check(empty, empty, empty, {}, ledger, h, hp, 0, 1);
    CHECK(v.clause == AdvancingClause::neither);
    CHECK(v.copies == 0);

    std::vector<HostEdge> too_many(full.edges().begin(), full.edges().begin() + 20);
    CHECK_THROWS(advancing_check(full, full, full, too_many, ledger, h, hp, 0, 1));
    CHECK_THROWS(advancing_check(full, full, full, {}, ledger, h, hp, 0, 2));
}

TEST_CASE("exposure rounds")
{
    auto h = complete_pattern(3);
    std::vector<BlowupGraph> complete(2, new_host(h, 5, Fill::complete));
    auto sizes = exposure_rounds(h, 0, 1, complete, true);
    CHECK(sizes == std::vector<std::size_t>{25, 0, 0});

    std::vector<BlowupGraph> empty(3, new_host(h, 5, Fill::empty));
    sizes = exposure_rounds(h, 0, 1, empty, true);
    CHECK(sizes == std::vector<std::size_t>{25, 25, 25, 25});

    for (std::uint64_t s = 0 ; s < 10 ; ++s) {
        auto t = multi_exposure_experiment(h, 8, 30, 2, 0, 1, {s, ""});
        CHECK(t.m_used == 28);
        CHECK(t.d_sizes.size() == 5);
        for (std::size_t i = 1 ; i < t.d_sizes.size() ; ++i)
            CHECK(t.d_sizes[i] <= t.d_sizes[i - 1]);
        CHECK(t.survivors <= t.g_star);
        CHECK(t.g_star == 28);
    }
    CHECK_THROWS(multi_exposure_experiment(path_pattern(3), 8, 30, 2, 0, 2, {1, ""}));
    CHECK_THROWS(multi_exposure_experiment(h, 8, 30, 0, 0, 1, {1, ""}));
}

TEST_CASE("config parsing")
{
    const std::string ok = R"({"pattern": "k=3;edges=0-1,0-2,1-2", "n": 6, "m": 10, "eps": 0.25,
        "lambda": 0.5, "gamma": 0.1, "samples": 4, "seed": 3})";
    auto cfg = parse_config(ok);
    CHECK(cfg.n == 6);
    CHECK(*cfg.m == 10);
    auto echo = config_json(cfg);
    for (auto field : {"pattern", "\"n\"", "\"m\"", "eps", "lambda", "gamma", "samples", "seed", "mode", "output"})
        CHECK(echo.find(field) != std::string::npos);
    CHECK(parse_config(echo).seed == 3);

    try {
        parse_config(R"({"pattern": "k=3;edges=0-1", "m": 10, "seed": 1, "eps": 0.2, "lambda": 0.5, "gamma": 0.1, "samples": 1})");
        FAIL("accepted a config without n");
    }
    catch (const std::invalid_argument & e) {
        CHECK(std::string(e.what()).find("'n'") != std::string::npos);
    }
    try {
        parse_config("{\n  \"n\": 6,\n  \"m\": ]\n}");
        FAIL("accepted malformed text");
    }
    catch (const std::invalid_argument & e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK_THROWS(parse_config(R"({"pattern": "k=3;edges=0-1", "n": 4, "m": 1, "seed": 1, "z": 1, "experiment": "expose", "typo": 1})"));
    CHECK_THROWS(parse_config(R"({"pattern": "k=3;edges=0-1", "n": "4", "m": 1, "seed": 1, "z": 1, "experiment": "expose"})"));
}

TEST_CASE("runs are reproducible")
{
    ExperimentConfig cfg;
    cfg.pattern = complete_pattern(3);
    cfg.n = 6;
    cfg.m = 12;
    cfg.samples = 12;
    auto d1 = scratch("run1"), d2 = scratch("run2");
    cfg.output = d1;
    auto r1 = run_config(cfg);
    cfg.output = d2;
    auto r2 = run_config(cfg, RunOverrides{1u, true, std::nullopt});
    CHECK(slurp(d1 + "/samples.csv") == slurp(d2 + "/samples.csv"));
    CHECK(slurp(d1 + "/report.json") == slurp(d2 + "/report.json"));
    CHECK(slurp(d1 + "/samples.csv").starts_with("sample,seed,regular,zcount,event\n"));

    // a manifest is itself a config
    auto again = load_config(d1 + "/manifest.json");
    CHECK(again.seed == cfg.seed);
    CHECK(*again.m == 12);
    std::filesystem::remove_all(d1);
    std::filesystem::remove_all(d2);
}
