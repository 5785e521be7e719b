#include "taghash/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "taghash/errors.hpp"

namespace taghash {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
        throw InvalidConfig("'" + key + "' expects a non-negative integer, got '" + v + "'");
    return out;
}

std::size_t parse_size(const std::string& key, const std::string& v) {
    return static_cast<std::size_t>(parse_u64(key, v));
}

double parse_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
        throw InvalidConfig("'" + key + "' expects a finite real, got '" + v + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    throw InvalidConfig("'" + key + "' expects true/false, got '" + v + "'");
}

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <typename T, typename F>
std::string join(const std::vector<T>& xs, F&& f) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        out += f(xs[i]);
    }
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"seed", [](RunConfig& c, const std::string& k, const std::string& v) { c.seed = parse_u64(k, v); }},
        {"n", [](RunConfig& c, const std::string& k, const std::string& v) { c.synth.n = parse_size(k, v); }},
        {"d", [](RunConfig& c, const std::string& k, const std::string& v) { c.synth.d = parse_size(k, v); }},
        {"n_clusters", [](RunConfig& c, const std::string& k, const std::string& v) { c.synth.n_clusters = parse_size(k, v); }},
        {"c", [](RunConfig& c, const std::string& k, const std::string& v) { c.synth.c = parse_size(k, v); }},
        {"tag_noise", [](RunConfig& c, const std::string& k, const std::string& v) { c.synth.tag_noise_rate = parse_double(k, v); }},
        {"cluster_spread", [](RunConfig& c, const std::string& k, const std::string& v) { c.synth.cluster_spread = parse_double(k, v); }},
        {"alpha", [](RunConfig& c, const std::string& k, const std::string& v) { c.train.alpha = parse_double(k, v); }},
        {"beta", [](RunConfig& c, const std::string& k, const std::string& v) { c.train.beta = parse_double(k, v); }},
        {"nu", [](RunConfig& c, const std::string& k, const std::string& v) { c.train.nu = parse_double(k, v); }},
        {"rho", [](RunConfig& c, const std::string& k, const std::string& v) { c.train.rho = parse_double(k, v); }},
        {"mu", [](RunConfig& c, const std::string& k, const std::string& v) { c.train.mu0 = parse_double(k, v); }},
        {"mu_max", [](RunConfig& c, const std::string& k, const std::string& v) { c.train.mu_max = parse_double(k, v); }},
        {"bits", [](RunConfig& c, const std::string& k, const std::string& v) { c.train.r = parse_size(k, v); }},
        {"max_iters", [](RunConfig& c, const std::string& k, const std::string& v) { c.train.max_outer_iters = parse_size(k, v); }},
        {"rel_tol", [](RunConfig& c, const std::string& k, const std::string& v) { c.train.rel_tol = parse_double(k, v); }},
        {"ridge_eps", [](RunConfig& c, const std::string& k, const std::string& v) { c.train.ridge_eps = parse_double(k, v); }},
        {"variant", [](RunConfig& c, const std::string&, const std::string& v) { c.train.variant = parse_variant(v); }},
        {"activation", [](RunConfig& c, const std::string& k, const std::string& v) {
             if (v == "identity") c.fit.activation = Activation::identity;
             else if (v == "tanh") c.fit.activation = Activation::tanh;
             else throw InvalidConfig("'" + k + "' expects identity or tanh");
         }},
        {"center", [](RunConfig& c, const std::string& k, const std::string& v) { c.fit.center = parse_bool(k, v); }},
        {"m", [](RunConfig& c, const std::string& k, const std::string& v) { c.graph.m = parse_size(k, v); }},
        {"s", [](RunConfig& c, const std::string& k, const std::string& v) { c.graph.s = parse_size(k, v); }},
        {"a", [](RunConfig& c, const std::string& k, const std::string& v) { c.graph.a = parse_size(k, v); }},
        {"tag_scale", [](RunConfig& c, const std::string& k, const std::string& v) { c.graph.tag_scale = parse_double(k, v); }},
        {"hyper_sigma", [](RunConfig& c, const std::string& k, const std::string& v) {
             const double s = parse_double(k, v);
             if (!(s > 0.0)) throw InvalidConfig("'hyper_sigma' must be positive");
             c.graph.hyper_sigma_sq = s * s;
         }},
        {"features", [](RunConfig& c, const std::string&, const std::string& v) { c.features_path = v; }},
        {"tags", [](RunConfig& c, const std::string&, const std::string& v) { c.tags_path = v; }},
        {"labels", [](RunConfig& c, const std::string&, const std::string& v) { c.labels_path = v; }},
        {"train_n", [](RunConfig& c, const std::string& k, const std::string& v) { c.train_n = parse_size(k, v); }},
        {"query_n", [](RunConfig& c, const std::string& k, const std::string& v) { c.query_n = parse_size(k, v); }},
        {"out", [](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = v; }},
        {"map_cutoff", [](RunConfig& c, const std::string& k, const std::string& v) {
             const std::size_t cut = parse_size(k, v);
             if (cut == 0) c.map_cutoff.reset(); else c.map_cutoff = cut;
         }},
        {"ablate_variants", [](RunConfig& c, const std::string&, const std::string& v) {
             c.ablate_variants.clear();
             for (const auto& item : split_list(v)) c.ablate_variants.push_back(parse_variant(item));
         }},
        {"ablate_seeds", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.ablate_seeds.clear();
             for (const auto& item : split_list(v)) c.ablate_seeds.push_back(parse_u64(k, item));
         }},
        {"ablate_bits", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.ablate_bits.clear();
             for (const auto& item : split_list(v)) c.ablate_bits.push_back(parse_size(k, item));
         }},
    };
    return table;
}

void load_into(RunConfig& cfg, const std::filesystem::path& path, int depth) {
    if (depth > 16) throw InvalidConfig("config includes nested too deeply at " + path.string());
    std::ifstream in(path);
    if (!in) throw InvalidConfig("cannot open config file " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidConfig(path.string() + ":" + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "include") {
                std::filesystem::path inc(value);
                if (inc.is_relative()) inc = path.parent_path() / inc;
                load_into(cfg, inc, depth + 1);
            } else {
                apply_setting(cfg, key, value);
            }
        } catch (const InvalidConfig& e) {
            if (key == "include") throw;
            throw InvalidConfig(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

}  // namespace

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end()) throw InvalidConfig("unknown config key '" + key + "'");
    it->second(cfg, key, value);
}

void load_config_file(RunConfig& cfg, const std::filesystem::path& path) { load_into(cfg, path, 0); }

RunConfig load_config(const std::filesystem::path& path) {
    RunConfig cfg;
    load_config_file(cfg, path);
    return cfg;
}

void RunConfig::validate() const {
    synth.validate();
    train.validate();
    if (graph.m == 0 || graph.s == 0 || graph.a == 0)
        throw InvalidConfig("m, s and a must be positive");
    if (!(graph.tag_scale >= 0.0)) throw InvalidConfig("tag_scale must be non-negative");
    if (ablate_variants.empty()) throw InvalidConfig("ablate_variants must not be empty");
    for (auto b : ablate_bits)
        if (b == 0) throw InvalidConfig("ablate_bits entries must be positive");
}

std::vector<std::pair<std::string, std::string>> RunConfig::resolved() const {
    const auto u = [](auto v) { return std::to_string(v); };
    return {
        {"seed", u(seed)},
        {"n", u(synth.n)},
        {"d", u(synth.d)},
        {"n_clusters", u(synth.n_clusters)},
        {"c", u(synth.c)},
        {"tag_noise", fmt_double(synth.tag_noise_rate)},
        {"cluster_spread", fmt_double(synth.cluster_spread)},
        {"alpha", fmt_double(train.alpha)},
        {"beta", fmt_double(train.beta)},
        {"nu", fmt_double(train.nu)},
        {"rho", fmt_double(train.rho)},
        {"mu", fmt_double(train.mu0)},
        {"mu_max", fmt_double(train.mu_max)},
        {"bits", u(train.r)},
        {"max_iters", u(train.max_outer_iters)},
        {"rel_tol", fmt_double(train.rel_tol)},
        {"ridge_eps", fmt_double(train.ridge_eps)},
        {"variant", std::string(to_string(train.variant))},
        {"activation", fit.activation == Activation::tanh ? "tanh" : "identity"},
        {"center", fit.center ? "true" : "false"},
        {"m", u(graph.m)},
        {"s", u(graph.s)},
        {"a", u(graph.a)},
        {"tag_scale", fmt_double(graph.tag_scale)},
        {"hyper_sigma", graph.hyper_sigma_sq ? fmt_double(std::sqrt(*graph.hyper_sigma_sq)) : "auto"},
        {"features", features_path},
        {"tags", tags_path},
        {"labels", labels_path},
        {"train_n", u(train_n)},
        {"query_n", u(query_n)},
        {"out", out_dir},
        {"map_cutoff", map_cutoff ? u(*map_cutoff) : "0"},
        {"ablate_variants", join(ablate_variants, [](Variant v) { return std::string(to_string(v)); })},
        {"ablate_seeds", join(ablate_seeds, [](std::uint64_t v) { return std::to_string(v); })},
        {"ablate_bits", join(ablate_bits, [](std::size_t v) { return std::to_string(v); })},
    };
}

}  // namespace taghash
