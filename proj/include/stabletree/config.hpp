#pragma once

// Study configuration shared by the CLI subcommands: model selection, the
// progeny ladder, the evaluation grid, seeding, output routing, and the
// statistical thresholds.  Mirrors one-to-one onto a JSON object so a
// --config file and command-line flags can describe the same run.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "stabletree/offspring.hpp"
#include "stabletree/rational.hpp"

namespace stabletree {

struct Thresholds {
    double ks_pvalue_min = 0.01;
    double sigma_band = 3.0;
};

struct StudyConfig {
    std::string model = "geometric";     // geometric | stable:alpha=<a> | table:<path>
    double alpha = 1.5;                  // continuum index used where no lattice model enters
    std::vector<std::int64_t> ladder = {100, 1000, 10000};
    std::int64_t replicates = 20000;
    std::vector<double> times = {0.25, 0.5, 0.75};
    std::uint64_t seed = 1;
    int threads = 1;
    std::string format = "csv";          // csv | json
    std::string output;                  // empty = stdout
    Thresholds thresholds;

    void validate() const {
        for (std::size_t i = 0; i + 1 < ladder.size(); ++i)
            if (ladder[i] >= ladder[i + 1]) throw std::invalid_argument("config: ladder must be increasing");
        for (std::int64_t p : ladder)
            if (p < 1) throw std::invalid_argument("config: ladder entries must be positive");
        if (replicates < 1) throw std::invalid_argument("config: replicates must be >= 1");
        for (double t : times)
            if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("config: time grid must lie in [0, 1]");
        if (format != "csv" && format != "json") throw std::invalid_argument("config: format must be csv or json");
        if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
    }
};

inline void to_json(nlohmann::json& j, const Thresholds& t) {
    j = nlohmann::json{{"ks_pvalue_min", t.ks_pvalue_min}, {"sigma_band", t.sigma_band}};
}

inline void from_json(const nlohmann::json& j, Thresholds& t) {
    t.ks_pvalue_min = j.value("ks_pvalue_min", t.ks_pvalue_min);
    t.sigma_band = j.value("sigma_band", t.sigma_band);
}

inline void to_json(nlohmann::json& j, const StudyConfig& c) {
    j = nlohmann::json{{"model", c.model},   {"alpha", c.alpha},
                       {"ladder", c.ladder}, {"replicates", c.replicates},
                       {"times", c.times},   {"seed", c.seed},
                       {"threads", c.threads}, {"format", c.format},
                       {"output", c.output}, {"thresholds", c.thresholds}};
}

inline void from_json(const nlohmann::json& j, StudyConfig& c) {
    c.model = j.value("model", c.model);
    c.alpha = j.value("alpha", c.alpha);
    c.ladder = j.value("ladder", c.ladder);
    c.replicates = j.value("replicates", c.replicates);
    c.times = j.value("times", c.times);
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
    c.format = j.value("format", c.format);
    c.output = j.value("output", c.output);
    c.thresholds = j.value("thresholds", c.thresholds);
}

inline StudyConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    StudyConfig c = j.get<StudyConfig>();
    c.validate();
    return c;
}

// Model specs name the offspring law: "geometric", "stable:alpha=<a>" with
// <a> rational or decimal in (1, 2], or "table:<path>" whose file holds
// whitespace-separated rational probabilities mu(0) mu(1) ...
inline OffspringLaw parse_model(const std::string& spec) {
    if (spec == "geometric") return OffspringLaw::geometric();
    const std::string stable_prefix = "stable:alpha=";
    if (spec.rfind(stable_prefix, 0) == 0) return OffspringLaw::stable(parse_rational(spec.substr(stable_prefix.size())));
    const std::string table_prefix = "table:";
    if (spec.rfind(table_prefix, 0) == 0) {
        std::ifstream in(spec.substr(table_prefix.size()));
        if (!in) throw std::runtime_error("model: cannot open " + spec.substr(table_prefix.size()));
        std::vector<Rational> probs;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            auto comma = line.find(',');
            if (comma == std::string::npos) throw std::runtime_error("model: table line needs k,prob: " + line);
            std::size_t k = std::stoull(line.substr(0, comma));
            if (probs.size() <= k) probs.resize(k + 1, Rational(0));
            probs[k] = parse_rational(line.substr(comma + 1));
        }
        return OffspringLaw::table(probs);
    }
    throw std::invalid_argument("model: unknown spec '" + spec + "'");
}

}  // namespace stabletree
