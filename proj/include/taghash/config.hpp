#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "taghash/alm.hpp"
#include "taghash/dataio.hpp"
#include "taghash/hash_model.hpp"
#include "taghash/pipeline.hpp"

namespace taghash {

// Everything a command needs, resolved from "key = value" config files.
struct RunConfig {
    std::uint64_t seed = 0;
    SynthConfig synth;
    TrainParams train;
    GraphParams graph;
    FitOptions fit;

    std::string features_path;
    std::string tags_path;
    std::string labels_path;
    std::size_t train_n = 0;   // 0: train on the whole retrieval set
    std::size_t query_n = 0;
    std::string out_dir = ".";
    std::optional<std::size_t> map_cutoff;

    std::vector<Variant> ablate_variants = all_variants();
    std::vector<std::uint64_t> ablate_seeds;   // empty: {seed}
    std::vector<std::size_t> ablate_bits;      // empty: {train.r}

    void validate() const;
    // Every key with its resolved value, in a stable order.
    std::vector<std::pair<std::string, std::string>> resolved() const;
};

// Applies one setting; throws InvalidConfig for unknown keys or bad values.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

// Parses a config file. Lines are "key = value"; '#' starts a comment;
// "include = path" pulls in another file (relative to the including file)
// at that point, so later lines override it.
void load_config_file(RunConfig& cfg, const std::filesystem::path& path);
RunConfig load_config(const std::filesystem::path& path);

std::vector<std::string> split_list(const std::string& value);

}  // namespace taghash
