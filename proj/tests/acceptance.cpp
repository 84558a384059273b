// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <regex>
#include <sstream>
#include <stdexcept>

#include "oracles.hpp"
#include "support.hpp"
#include "tabcheck/adapter.hpp"
#include "tabcheck/catalog.hpp"
#include "tabcheck/framework.hpp"
#include "tabcheck/importance.hpp"
#include "tabcheck/metrics.hpp"
#include "tabcheck/pps.hpp"
#include "tabcheck/process.hpp"
#include "tabcheck/rng.hpp"
#include "tabcheck/stats.hpp"

using namespace tabcheck;
using testing_support::make_dataset;
using testing_support::num;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
    return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Verdict {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

int failures = 0;

void report(const std::string& name, const std::function<Verdict()>& body) {
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v.ok = false;
        v.detail = std::string("exception: ") + e.what();
    }
    if (!v.ok) ++failures;
    std::cout << (v.ok ? "PASS " : "FAIL ") << name << (v.detail.empty() ? "" : " | " + v.detail) << std::endl;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

SuiteEntryResult run_one(const std::string& id, const CheckContext& ctx) {
    SuiteEntry e;
    e.check = find_check(id);
    return run_suite(Suite{"one", {e}}, ctx).entries.at(0);
}

Verdict duplicates_fidelity() {
    Verdict v;
    const auto start = Clock::now();
    std::vector<std::string> a, b;
    for (int i = 0; i < 100; ++i) a.push_back(std::to_string(i)), b.push_back("k" + std::to_string(i % 17));
    for (int i = 0; i < 7; ++i) a.push_back(a[i * 11]), b.push_back(b[i * 11]);
    CheckContext ctx;
    ctx.train = std::make_shared<Dataset>(make_dataset({{"a", a}, {"b", b}}));
    const auto r = run_one("duplicates", ctx);
    const double fraction = r.check.value.at("fraction").get<double>();
    const double elapsed = seconds_since(start);
    v.require(std::abs(fraction - 7.0 / 107.0) <= 1e-9, "fraction " + fmt(fraction));
    v.require(r.conditions.size() == 1 && r.conditions[0].status == ConditionStatus::Fail, "condition did not fail");
    const std::string detail = r.conditions.empty() ? "" : r.conditions[0].detail;
    v.require(detail.find("6.54%") != std::string::npos, "detail '" + detail + "'");
    v.require(elapsed < 1.0, "runtime " + fmt(elapsed) + " s");
    if (v.ok) v.detail = "fraction=" + fmt(fraction) + " detail='" + detail + "' " + fmt(elapsed) + " s";
    return v;
}

Verdict psi_oracle() {
    Verdict v;
    const double hand = 0.4 * std::log(0.9 / 0.5) + (-0.4) * std::log(0.1 / 0.5);
    const double got = psi(Histogram({"a", "b"}, {0.5, 0.5}), Histogram({"a", "b"}, {0.9, 0.1})).value;
    v.require(std::abs(got - 0.87889) <= 1e-5 && std::abs(got - hand) <= 1e-12, "psi " + fmt(got));
    Rng rng(2024);
    double worst_sym = 0, worst_self = 0;
    for (int t = 0; t < 1000; ++t) {
        const std::size_t k = 2 + rng.below(10);
        std::vector<std::string> labels;
        std::vector<double> p(k), q(k);
        for (std::size_t i = 0; i < k; ++i) {
            labels.push_back("b" + std::to_string(i));
            p[i] = rng.uniform() < 0.2 ? 0.0 : rng.uniform();
            q[i] = rng.uniform() < 0.2 ? 0.0 : rng.uniform();
        }
        p[0] += 1e-3;
        q[k - 1] += 1e-3;
        const auto hp = Histogram::from_counts(labels, p);
        const auto hq = Histogram::from_counts(labels, q);
        worst_sym = std::max(worst_sym, std::abs(psi(hp, hq).value - psi(hq, hp).value));
        worst_self = std::max(worst_self, std::abs(psi(hp, hp).value));
    }
    v.require(worst_sym <= 1e-9, "symmetry gap " + fmt(worst_sym));
    v.require(worst_self <= 1e-9, "psi(p,p) " + fmt(worst_self));
    if (v.ok) v.detail = "psi=" + fmt(got) + " max|psi(p,q)-psi(q,p)|=" + fmt(worst_sym);
    return v;
}

Verdict emd_oracle() {
    Verdict v;
    Rng rng(99);
    double worst = 0;
    for (int t = 0; t < 200; ++t) {
        std::vector<double> a(1 + rng.below(12)), b(1 + rng.below(12));
        const bool lattice = t % 2 == 0;
        for (auto& x : a) x = lattice ? static_cast<double>(rng.below(6)) : rng.uniform() * 10 - 5;
        for (auto& x : b) x = lattice ? static_cast<double>(rng.below(6)) : rng.uniform() * 12 - 4;
        worst = std::max(worst, std::abs(emd_normalized(a, b).value - oracles::emd_by_transport(a, b)));
    }
    v.require(worst <= 1e-9, "max deviation " + fmt(worst));
    const std::vector<double> s{0.3, -1.2, 8.5, 2.0, 2.0};
    v.require(emd_normalized(s, s).value == 0.0, "identical samples nonzero");
    if (v.ok) v.detail = "200 pairs, max |emd - OT| = " + fmt(worst);
    return v;
}

Verdict drift_power() {
    Verdict v;
    const auto start = Clock::now();
    int misses = 0;
    double min_shift = 1e9, max_same = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Rng rng(seed);
        const auto train = testing_support::normal_column(rng, 1000);
        const auto same = testing_support::normal_column(rng, 1000);
        const auto shifted = testing_support::normal_column(rng, 1000, 2.0);
        for (bool shift : {true, false}) {
            CheckContext ctx;
            ctx.train = std::make_shared<Dataset>(make_dataset({{"x", train}}));
            ctx.test = std::make_shared<Dataset>(make_dataset({{"x", shift ? shifted : same}}));
            const auto r = run_one("feature_drift", ctx);
            const double score = r.check.value.at("features").at("x").at("score").get<double>();
            const auto status = r.conditions.at(0).status;
            if (shift) {
                min_shift = std::min(min_shift, score);
                misses += status != ConditionStatus::Fail;
            } else {
                max_same = std::max(max_same, score);
                misses += status != ConditionStatus::Pass;
            }
        }
    }
    const double elapsed = seconds_since(start);
    v.require(misses == 0, std::to_string(misses) + " misclassifications");
    v.require(elapsed < 5.0, "runtime " + fmt(elapsed) + " s");
    if (v.ok) {
        v.detail = "40 runs, min shifted EMD=" + fmt(min_shift) + " max unshifted EMD=" + fmt(max_same) + " " +
                   fmt(elapsed) + " s";
    }
    return v;
}

Verdict pps_sanity() {
    Verdict v;
    Rng base(5);
    std::vector<std::string> y;
    for (int i = 0; i < 1000; ++i) y.push_back(base.uniform() < 0.4 ? "a" : (base.uniform() < 0.5 ? "b" : "c"));
    const auto copy = make_dataset({{"f", y}, {"y", y}}, "y");
    const double c = pps(copy.column("f"), copy.label(), Task::Classification).score;
    v.require(c == 1.0, "copy pps " + fmt(c));
    double worst = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Rng rng(1000 + seed);
        std::vector<std::string> f, lab;
        for (int i = 0; i < 1000; ++i) {
            f.push_back(num(rng.uniform()));
            lab.push_back(rng.uniform() < 0.5 ? "p" : "q");
        }
        const auto ds = make_dataset({{"f", f}, {"y", lab}}, "y");
        worst = std::max(worst, pps(ds.column("f"), ds.label(), Task::Classification).score);
    }
    v.require(worst <= 0.05, "noise pps " + fmt(worst));
    if (v.ok) v.detail = "copy=" + fmt(c) + " max noise over 10 seeds=" + fmt(worst);
    return v;
}

Verdict importance_ordering() {
    Verdict v;
    const auto start = Clock::now();
    Rng rng(42);
    std::vector<std::string> f1, y;
    for (int i = 0; i < 1000; ++i) {
        const double x = testing_support::normal(rng);
        f1.push_back(num(x));
        y.push_back(x > 0 ? "pos" : "neg");
    }
    const auto ds = make_dataset({{"noise_a", testing_support::normal_column(rng, 1000)},
                                  {"f1", f1},
                                  {"noise_b", testing_support::normal_column(rng, 1000)},
                                  {"noise_c", testing_support::normal_column(rng, 1000)},
                                  {"y", y}},
                                 "y");
    PredictAdapter adapter({testing_support::stub_command("threshold f1 0"), 10000, 60});
    const auto classes = ds.label_classes();
    const auto rep = permutation_importance(adapter, ds, classes, {5, 42});
    double share_f1 = 0, worst_noise = 0;
    for (const auto& fi : rep.features) {
        if (fi.feature == "f1") share_f1 = fi.normalized;
        else worst_noise = std::max(worst_noise, fi.normalized);
    }
    const double elapsed = seconds_since(start);
    v.require(share_f1 > 0.9, "share(f1) " + fmt(share_f1));
    v.require(worst_noise < 0.05, "noise share " + fmt(worst_noise));
    v.require(elapsed < 10.0, "runtime " + fmt(elapsed) + " s");
    if (v.ok) v.detail = "share(f1)=" + fmt(share_f1) + " max noise=" + fmt(worst_noise) + " " + fmt(elapsed) + " s";
    return v;
}

Verdict metrics_micro_oracle() {
    Verdict v;
    const std::vector<std::string> classes{"0", "1"};
    int cases = 0;
    for (int t = 0; t < 4; ++t) {
        for (int p = 0; p < 4; ++p) {
            const std::vector<std::string> yt{std::to_string(t >> 1), std::to_string(t & 1)};
            const std::vector<std::string> yp{std::to_string(p >> 1), std::to_string(p & 1)};
            // Independent hand computation from the confusion counts.
            double acc = 0, f1[2], support[2] = {0, 0};
            for (int i = 0; i < 2; ++i) acc += yt[i] == yp[i];
            acc /= 2;
            for (int c = 0; c < 2; ++c) {
                double tp = 0, fp = 0, fn = 0;
                for (int i = 0; i < 2; ++i) {
                    const bool is_t = yt[i] == classes[c], is_p = yp[i] == classes[c];
                    tp += is_t && is_p;
                    fp += !is_t && is_p;
                    fn += is_t && !is_p;
                    support[c] += is_t;
                }
                f1[c] = (2 * tp + fp + fn) == 0 ? 0.0 : 2 * tp / (2 * tp + fp + fn);
            }
            const double macro = (f1[0] + f1[1]) / 2;
            const double weighted = (f1[0] * support[0] + f1[1] * support[1]) / 2;
            const auto m = classification_metrics(yt, yp, classes);
            const bool match = m.accuracy == acc && std::abs(m.macro_f1 - macro) <= 1e-15 &&
                               std::abs(m.weighted_f1 - weighted) <= 1e-15 && m.per_class[0].f1 == f1[0] &&
                               m.per_class[1].f1 == f1[1];
            v.require(match, "mismatch at " + yt[0] + yt[1] + "/" + yp[0] + yp[1]);
            ++cases;
        }
    }
    if (v.ok) v.detail = std::to_string(cases) + " cases";
    return v;
}

std::string strip_timestamps(const std::string& text) {
    static const std::regex ts(R"re("(started_at|finished_at)": "[^"]*")re");
    return std::regex_replace(text, ts, R"("$1": "")");
}

int oracle_exit(const Json& doc, bool strict) {
    bool err = false, fail = false, warn = false;
    for (const auto& c : doc.at("checks")) {
        err |= c.at("status") == "errored";
        for (const auto& k : c.at("conditions")) {
            fail |= k.at("status") == "fail";
            warn |= k.at("status") == "warning";
        }
    }
    return err ? 2 : (fail || (strict && warn) ? 1 : 0);
}

Verdict suite_determinism() {
    Verdict v;
    const auto start = Clock::now();
    const auto dir = testing_support::temp_dir("acceptance_suite");
    Rng rng(7);
    auto write = [&](const std::filesystem::path& p, double shift) {
        std::vector<std::string> a, b, c, y;
        for (int i = 0; i < 1000; ++i) {
            const double x = testing_support::normal(rng) + shift;
            a.push_back(num(x));
            b.push_back(num(testing_support::normal(rng)));
            c.push_back(i % 4 == 0 ? "north" : (i % 4 == 1 ? "south" : "east"));
            y.push_back(x + testing_support::normal(rng) > 0 ? "yes" : "no");
        }
        testing_support::write_text(p, testing_support::to_csv({{"a", a}, {"b", b}, {"c", c}, {"y", y}}));
    };
    write(dir / "train.csv", 0.0);
    write(dir / "test.csv", 0.0);
    const std::string cli = testing_support::shell_quote(TABCHECK_CLI_PATH);
    const std::string common = " run --suite train_test_validation --train " +
                               testing_support::shell_quote((dir / "train.csv").string()) + " --test " +
                               testing_support::shell_quote((dir / "test.csv").string()) + " --label y --predict-cmd " +
                               testing_support::shell_quote(testing_support::stub_command("threshold a 0"));
    std::string reports[2];
    int codes[2];
    for (int k = 0; k < 2; ++k) {
        const auto out = dir / ("r" + std::to_string(k) + ".json");
        const auto r = run_process(cli + common + " --output-json " + testing_support::shell_quote(out.string()), "", {}, 60);
        codes[k] = r.exit_code;
        std::ifstream in(out, std::ios::binary);
        reports[k] = std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    v.require(!reports[0].empty(), "no report written");
    v.require(strip_timestamps(reports[0]) == strip_timestamps(reports[1]), "reports differ");
    const auto doc = Json::parse(reports[0]);
    v.require(codes[0] == oracle_exit(doc, false) && codes[1] == codes[0],
              "exit " + std::to_string(codes[0]) + " vs oracle " + std::to_string(oracle_exit(doc, false)));
    v.require(doc.at("checks").size() == 6, "expected 6 checks");

    const auto strict = run_process(cli + common + " --strict", "", {}, 60);
    v.require(strict.exit_code == oracle_exit(doc, true), "strict exit " + std::to_string(strict.exit_code));
    const auto usage = run_process(cli + " run --suite no_such_suite --train " +
                                       testing_support::shell_quote((dir / "train.csv").string()),
                                   "", {}, 60);
    v.require(usage.exit_code == 3, "usage exit " + std::to_string(usage.exit_code));
    const auto broken = run_process(cli + " run --suite model_evaluation --train " +
                                        testing_support::shell_quote((dir / "train.csv").string()) +
                                        " --label y --predict-cmd false",
                                    "", {}, 60);
    v.require(broken.exit_code == 2, "failing adapter exit " + std::to_string(broken.exit_code));

    // Enumerated status matrix: every pair of per-check outcomes, lax and strict.
    const std::vector<std::pair<CheckStatus, std::vector<ConditionStatus>>> kinds = {
        {CheckStatus::Ran, {}},
        {CheckStatus::Ran, {ConditionStatus::Pass}},
        {CheckStatus::Ran, {ConditionStatus::Warning}},
        {CheckStatus::Ran, {ConditionStatus::Fail}},
        {CheckStatus::Ran, {ConditionStatus::Pass, ConditionStatus::Warning, ConditionStatus::Fail}},
        {CheckStatus::Skipped, {ConditionStatus::Warning}},
        {CheckStatus::Errored, {ConditionStatus::Warning}},
    };
    int mismatches = 0, combos = 0;
    for (const auto& x : kinds) {
        for (const auto& y : kinds) {
            SuiteResult sr;
            Json mirror = {{"checks", Json::array()}};
            for (const auto& kind : {x, y}) {
                SuiteEntryResult e;
                e.check.status = kind.first;
                Json jc = {{"status", to_string(kind.first)}, {"conditions", Json::array()}};
                for (auto s : kind.second) {
                    e.conditions.push_back({"c", s, ""});
                    jc["conditions"].push_back({{"status", to_string(s)}});
                }
                sr.entries.push_back(e);
                mirror["checks"].push_back(jc);
            }
            sr.summary = summarize(sr.entries);
            for (bool s : {false, true}) {
                ++combos;
                mismatches += exit_code(sr, s) != oracle_exit(mirror, s);
            }
        }
    }
    v.require(mismatches == 0, std::to_string(mismatches) + " exit-code mismatches");
    const double elapsed = seconds_since(start);
    v.require(elapsed < 10.0, "runtime " + fmt(elapsed) + " s");
    if (v.ok) {
        v.detail = "identical reports, exit " + std::to_string(codes[0]) + ", " + std::to_string(combos) +
                   " matrix cases, " + fmt(elapsed) + " s";
    }
    return v;
}

Verdict framework_isolation() {
    Verdict v;
    auto boom = std::make_shared<CheckDefinition>();
    boom->id = "deliberate_throw";
    boom->category = Category::Overview;
    boom->run = [](const CheckContext&, const Json&) -> CheckOutput { throw std::logic_error("intentional"); };
    Suite suite = find_builtin_suite("data_integrity");
    SuiteEntry e;
    e.check = boom;
    suite.entries.insert(suite.entries.begin() + 2, e);

    Rng rng(1);
    std::vector<std::string> y;
    for (int i = 0; i < 300; ++i) y.push_back(rng.uniform() < 0.5 ? "a" : "b");
    CheckContext ctx;
    ctx.train = std::make_shared<Dataset>(make_dataset(
        {{"x", testing_support::normal_column(rng, 300)}, {"z", testing_support::normal_column(rng, 300)}, {"y", y}}, "y"));
    const auto r = run_suite(suite, ctx);
    v.require(r.entries.size() == suite.entries.size(), "missing results");
    std::size_t others_ran = 0;
    for (std::size_t i = 0; i < r.entries.size(); ++i) {
        if (i == 2) {
            v.require(r.entries[i].check.status == CheckStatus::Errored, "throwing check not Errored");
            v.require(r.entries[i].check.message.find("intentional") != std::string::npos, "message lost");
        } else {
            others_ran += r.entries[i].check.status == CheckStatus::Ran;
            v.require(r.entries[i].check.check_id == suite.entries[i].check->id, "order changed");
        }
    }
    v.require(others_ran == r.entries.size() - 1, "only " + std::to_string(others_ran) + " others ran");
    v.require(exit_code(r, false) == 2, "exit " + std::to_string(exit_code(r, false)));
    v.require(r.summary.errored == 1, "errored count");
    if (v.ok) v.detail = std::to_string(others_ran) + " other checks ran, exit 2";
    return v;
}

}  // namespace

int main() {
    report("duplicates fidelity", duplicates_fidelity);
    report("PSI oracle", psi_oracle);
    report("EMD oracle", emd_oracle);
    report("drift detection power", drift_power);
    report("PPS sanity", pps_sanity);
    report("permutation importance ordering", importance_ordering);
    report("metrics micro-oracle", metrics_micro_oracle);
    report("suite determinism and exit-code contract", suite_determinism);
    report("framework isolation", framework_isolation);
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
