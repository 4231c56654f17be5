// Command-line front end: tree and excursion samplers, the exact identity
// suite, convergence ladders, and reduced-tree marginals, exported as CSV or
// JSON.  Outputs are deterministic functions of (config, seed); floats are
// printed with 17 significant digits so repeated runs are byte-identical.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stabletree/config.hpp"
#include "stabletree/lattice_path.hpp"
#include "stabletree/levy.hpp"
#include "stabletree/marginals.hpp"
#include "stabletree/offspring.hpp"
#include "stabletree/oracle.hpp"
#include "stabletree/ordered_tree.hpp"
#include "stabletree/rng.hpp"
#include "stabletree/sampler.hpp"
#include "stabletree/stats.hpp"
#include "stabletree/study.hpp"

namespace {

using namespace stabletree;

std::string f17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Minimal JSON writer so numeric output honors the 17-digit contract; the
// vendored parser is only used for reading --config files.
struct JsonWriter {
    std::ostringstream out;
    void raw(const std::string& s) { out << s; }
    void str(const std::string& s) {
        out << '"';
        for (char c : s) {
            if (c == '"' || c == '\\') out << '\\' << c;
            else if (c == '\n') out << "\\n";
            else out << c;
        }
        out << '"';
    }
    void num(double v) { out << f17(v); }
    void num(std::int64_t v) { out << v; }
    template <class T>
    void array(const std::vector<T>& v) {
        out << '[';
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out << ',';
            num(v[i]);
        }
        out << ']';
    }
};

void write_out(const StudyConfig& cfg, const std::string& text) {
    if (cfg.output.empty()) {
        std::fputs(text.c_str(), stdout);
        return;
    }
    std::ofstream f(cfg.output, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file " + cfg.output);
    f << text;
}

std::string join_path(const Path& p) {
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(p[i]);
    }
    return s;
}

int cmd_sample_tree(const StudyConfig& cfg, const std::string& model, std::int64_t p) {
    OffspringLaw law = parse_model(model);
    BridgeSampler sampler(law, p);
    RandomStream rng(cfg.seed, 0);
    ConditionedDraw d = draw_conditioned(sampler, rng);
    Path contour = contour_process(tree_from_walk(d.excursion));

    std::ostringstream text;
    if (cfg.format == "csv") {
        text << "n,w,h\n";
        for (std::int64_t n = 0; n <= p; ++n)
            text << n << ',' << d.excursion[static_cast<std::size_t>(n)] << ','
                 << d.height[static_cast<std::size_t>(n)] << '\n';
        text << "\nt,c\n";
        for (std::size_t t = 0; t < contour.size(); ++t) text << t << ',' << contour[t] << '\n';
    } else {
        JsonWriter j;
        j.raw("{\"p\":");
        j.num(p);
        j.raw(",\"walk\":[");
        for (std::int64_t n = 0; n <= p; ++n) {
            if (n) j.raw(",");
            j.num(static_cast<std::int64_t>(d.excursion[static_cast<std::size_t>(n)]));
        }
        j.raw("],\"height\":[");
        for (std::int64_t n = 0; n <= p; ++n) {
            if (n) j.raw(",");
            j.num(static_cast<std::int64_t>(d.height[static_cast<std::size_t>(n)]));
        }
        j.raw("],\"contour\":[");
        for (std::size_t t = 0; t < contour.size(); ++t) {
            if (t) j.raw(",");
            j.num(static_cast<std::int64_t>(contour[t]));
        }
        j.raw("]}\n");
        write_out(cfg, j.out.str());
        return 0;
    }
    write_out(cfg, text.str());
    return 0;
}

int cmd_sample_excursion(const StudyConfig& cfg, const std::string& alpha_text, std::int64_t n,
                         const std::string& method, const std::string& emit) {
    const double alpha = to_double(parse_rational(alpha_text));
    LevyBridge bridge = method == "walk" ? LevyBridge::walk(OffspringLaw::stable(parse_rational(alpha_text)), n)
                                         : LevyBridge::chaumont(alpha, n);
    RandomStream rng(cfg.seed, 0);
    GridPath e = excursion_path(bridge, rng);
    bool want_path = emit.find("path") != std::string::npos;
    bool want_height = emit.find("height") != std::string::npos;
    if (!want_path && !want_height) throw std::invalid_argument("sample-excursion: --emit needs path and/or height");
    GridPath h;
    if (want_height) h = height_estimate(e, default_resolution(alpha, n), alpha);

    if (cfg.format == "csv") {
        std::ostringstream text;
        text << "j,t";
        if (want_path) text << ",path";
        if (want_height) text << ",height";
        text << '\n';
        for (std::size_t j = 0; j < e.values.size(); ++j) {
            text << j << ',' << f17(double(j) * e.dt);
            if (want_path) text << ',' << f17(e.values[j]);
            if (want_height) text << ',' << f17(h.values[j]);
            text << '\n';
        }
        write_out(cfg, text.str());
    } else {
        JsonWriter j;
        j.raw("{\"dt\":");
        j.num(e.dt);
        if (want_path) {
            j.raw(",\"path\":");
            j.array(e.values);
        }
        if (want_height) {
            j.raw(",\"height\":");
            j.array(h.values);
        }
        j.raw("}\n");
        write_out(cfg, j.out.str());
    }
    return 0;
}

int cmd_verify(const StudyConfig& cfg, const std::string& model, std::int64_t pmax) {
    OffspringLaw law = parse_model(model);
    IdentityReport rep = verify_identities(law, pmax);
    if (cfg.format == "csv") {
        std::ostringstream text;
        text << "identity,p,atoms,pass\n";
        for (const auto& r : rep.results)
            text << r.identity << ',' << r.p << ',' << r.atoms << ',' << (r.pass ? "1" : "0") << '\n';
        write_out(cfg, text.str());
    } else {
        JsonWriter j;
        j.raw("[");
        for (std::size_t i = 0; i < rep.results.size(); ++i) {
            const auto& r = rep.results[i];
            if (i) j.raw(",");
            j.raw("\n{\"identity\":");
            j.str(r.identity);
            j.raw(",\"p\":");
            j.num(r.p);
            j.raw(",\"atoms\":");
            j.num(r.atoms);
            j.raw(",\"pass\":");
            j.raw(r.pass ? "true" : "false");
            j.raw("}");
        }
        j.raw("\n]\n");
        write_out(cfg, j.out.str());
    }
    for (const auto& r : rep.results) {
        if (r.pass) continue;
        std::size_t shown = 0;
        for (const auto& m : r.mismatches) {
            if (shown++ == 5) {
                std::cerr << "  ...\n";
                break;
            }
            std::cerr << r.identity << " p=" << r.p << " mismatch " << m << '\n';
        }
    }
    return rep.all_pass() ? 0 : 1;
}

int cmd_converge(const StudyConfig& cfg) {
    OffspringLaw law = parse_model(cfg.model);
    ConvergenceStudy st = convergence_study(law, cfg.ladder, cfg.times, cfg.replicates, cfg.seed, cfg.threads);
    if (cfg.format == "csv") {
        std::ostringstream text;
        text << "p,t,ks_stat,ks_pvalue,n_samples\n";
        for (const auto& r : st.rows)
            text << r.p << ',' << f17(r.t) << ',' << f17(r.ks_stat) << ',' << f17(r.ks_pvalue) << ','
                 << r.n_samples << '\n';
        for (const auto& [p, q] : st.gap_q99) text << "# gap_q99 p=" << p << ' ' << f17(q) << '\n';
        write_out(cfg, text.str());
    } else {
        JsonWriter j;
        j.raw("{\"rows\":[");
        for (std::size_t i = 0; i < st.rows.size(); ++i) {
            const auto& r = st.rows[i];
            if (i) j.raw(",");
            j.raw("\n{\"p\":");
            j.num(r.p);
            j.raw(",\"t\":");
            j.num(r.t);
            j.raw(",\"ks_stat\":");
            j.num(r.ks_stat);
            j.raw(",\"ks_pvalue\":");
            j.num(r.ks_pvalue);
            j.raw(",\"n_samples\":");
            j.num(r.n_samples);
            j.raw("}");
        }
        j.raw("\n],\"gap_q99\":[");
        for (std::size_t i = 0; i < st.gap_q99.size(); ++i) {
            if (i) j.raw(",");
            j.raw("{\"p\":");
            j.num(st.gap_q99[i].first);
            j.raw(",\"q99\":");
            j.num(st.gap_q99[i].second);
            j.raw("}");
        }
        j.raw("]}\n");
        write_out(cfg, j.out.str());
    }
    return 0;
}

int cmd_marginals(const StudyConfig& cfg, const std::string& alpha_text, int k, const std::string& mc) {
    const Rational alpha = parse_rational(alpha_text);
    std::vector<MarginalRow> rows;
    if (mc.empty()) {
        for (const auto& skel : enumerate_ordered_skeletons(k)) {
            MarginalRow r;
            r.skeleton = tree_to_text(skel);
            r.closed_form = to_double(skeleton_probability(skel, alpha));
            r.mc_freq = -1;  // marks "not run" below
            rows.push_back(r);
        }
    } else {
        std::int64_t p = 0, reps = 0;
        if (std::sscanf(mc.c_str(), "p=%" SCNd64 ",reps=%" SCNd64, &p, &reps) != 2 || p < 1 || reps < 1)
            throw std::invalid_argument("marginals: --mc expects p=<progeny>,reps=<count>");
        OffspringLaw law = alpha == 2 ? OffspringLaw::geometric() : OffspringLaw::stable(alpha);
        rows = marginal_study(law, p, k, reps, cfg.seed, cfg.threads);
    }
    if (cfg.format == "csv") {
        std::ostringstream text;
        text << "skeleton,closed_form,mc_freq,mc_stderr\n";
        for (const auto& r : rows) {
            text << '"' << r.skeleton << "\"," << f17(r.closed_form) << ',';
            if (r.mc_freq >= 0) text << f17(r.mc_freq) << ',' << f17(r.mc_stderr);
            else text << ',';
            text << '\n';
        }
        write_out(cfg, text.str());
    } else {
        JsonWriter j;
        j.raw("[");
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& r = rows[i];
            if (i) j.raw(",");
            j.raw("\n{\"skeleton\":");
            j.str(r.skeleton);
            j.raw(",\"closed_form\":");
            j.num(r.closed_form);
            if (r.mc_freq >= 0) {
                j.raw(",\"mc_freq\":");
                j.num(r.mc_freq);
                j.raw(",\"mc_stderr\":");
                j.num(r.mc_stderr);
            }
            j.raw("}");
        }
        j.raw("\n]\n");
        write_out(cfg, j.out.str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete codings, size-conditioned tree samplers, and stable height-process studies"};
    app.require_subcommand(1);

    StudyConfig cfg;
    std::string config_path;
    app.add_option("--config", config_path, "JSON file mirroring the study configuration");
    auto* opt_seed = app.add_option("--seed", cfg.seed, "RNG seed");
    auto* opt_threads = app.add_option("--threads", cfg.threads, "worker thread count");
    auto* opt_format = app.add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    auto* opt_output = app.add_option("--output", cfg.output, "output file (default stdout)");

    auto* tree = app.add_subcommand("sample-tree", "draw one size-conditioned tree and print its codings");
    std::string tree_model = "geometric";
    std::int64_t tree_p = 10;
    tree->add_option("--model", tree_model, "geometric | stable:alpha=<a> | table:<path>");
    tree->add_option("--p", tree_p, "total progeny")->check(CLI::PositiveNumber);

    auto* exc = app.add_subcommand("sample-excursion", "draw one grid excursion of the stable height machinery");
    std::string exc_alpha = "1.5", exc_method = "walk", exc_emit = "path,height";
    std::int64_t exc_n = 1000;
    exc->add_option("--alpha", exc_alpha, "stable index in (1, 2]");
    exc->add_option("--n", exc_n, "grid steps")->check(CLI::PositiveNumber);
    exc->add_option("--method", exc_method, "walk or chaumont")->check(CLI::IsMember({"walk", "chaumont"}));
    exc->add_option("--emit", exc_emit, "comma list from {path, height}");

    auto* ver = app.add_subcommand("verify", "run the exact identity suite against the enumeration oracle");
    std::string ver_model = "geometric";
    std::int64_t ver_pmax = 8;
    ver->add_option("--model", ver_model, "offspring model spec");
    ver->add_option("--pmax", ver_pmax, "largest size swept (joint laws cap at 8, walk identities at 12)");

    auto* conv = app.add_subcommand("converge", "rescaled-height convergence ladder vs the largest-p reference");
    conv->add_option("--model", cfg.model, "offspring model spec");
    conv->add_option("--ladder", cfg.ladder, "progeny ladder (increasing)");
    conv->add_option("--times", cfg.times, "evaluation times in [0, 1]");
    conv->add_option("--replicates", cfg.replicates, "draws per rung");

    auto* marg = app.add_subcommand("marginals", "reduced-tree skeleton law: closed form and optional MC");
    std::string marg_alpha = "1.5", marg_mc;
    int marg_k = 3;
    marg->add_option("--alpha", marg_alpha, "branching index in (1, 2]");
    marg->add_option("--k", marg_k, "number of sampled leaves")->check(CLI::Range(2, 6));
    marg->add_option("--mc", marg_mc, "run Monte Carlo, e.g. p=20000,reps=20000");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) {
            StudyConfig file_cfg = stabletree::load_config(config_path);
            // explicit flags win over the config file
            if (!*opt_seed) cfg.seed = file_cfg.seed;
            if (!*opt_threads) cfg.threads = file_cfg.threads;
            if (!*opt_format) cfg.format = file_cfg.format;
            if (!*opt_output) cfg.output = file_cfg.output;
            if (!conv->count("--model")) cfg.model = file_cfg.model;
            if (!conv->count("--ladder")) cfg.ladder = file_cfg.ladder;
            if (!conv->count("--times")) cfg.times = file_cfg.times;
            if (!conv->count("--replicates")) cfg.replicates = file_cfg.replicates;
        }
        cfg.validate();

        if (*tree) return cmd_sample_tree(cfg, tree_model, tree_p);
        if (*exc) return cmd_sample_excursion(cfg, exc_alpha, exc_n, exc_method, exc_emit);
        if (*ver) return cmd_verify(cfg, ver_model, ver_pmax);
        if (*conv) return cmd_converge(cfg);
        if (*marg) return cmd_marginals(cfg, marg_alpha, marg_k, marg_mc);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
