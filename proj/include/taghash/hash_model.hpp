#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "taghash/matrix.hpp"

namespace taghash {

enum class Activation : std::uint8_t { identity = 0, tanh = 1 };

// Linear feature model Phi(x) = act(W^T (x - center)).
struct FeatureModel {
    DenseMatrix w;                       // d x r
    Activation activation = Activation::identity;
    std::optional<DenseVector> center;   // d

    std::size_t dims() const { return static_cast<std::size_t>(w.rows()); }
    std::size_t bits() const { return static_cast<std::size_t>(w.cols()); }

    // Continuous outputs (r x q) for features of shape d x q.
    DenseMatrix outputs(const DenseMatrix& x) const;
};

struct FitOptions {
    bool center = true;
    Activation activation = Activation::identity;
};

// Ridge least squares W = (Xc Xc^T + eps I)^-1 Xc Z^T, where Xc is X minus its
// column mean when centering is on.
FeatureModel fit_linear_hash(const DenseMatrix& x, const DenseMatrix& z, double ridge_eps,
                             const FitOptions& opts = {});

// Same computation as fit_linear_hash; this is the per-iteration refit of the
// quantization-loss model during joint training.
FeatureModel fit_feature_model(const DenseMatrix& x, const DenseMatrix& z, double ridge_eps,
                               const FitOptions& opts = {});

// Codes packed little-endian into 64-bit words, bit set <=> code value +1.
// Bits beyond r in the last word of each code are always zero.
struct PackedCodes {
    std::size_t n = 0;
    std::size_t r = 0;
    std::vector<std::uint64_t> words;

    std::size_t words_per_code() const { return (r + 63) / 64; }
    std::span<const std::uint64_t> code(std::size_t i) const {
        return {words.data() + i * words_per_code(), words_per_code()};
    }
    bool operator==(const PackedCodes&) const = default;
};

// Throws InvalidSign when an entry is not exactly +1 or -1.
PackedCodes pack(const DenseMatrix& signs);
DenseMatrix unpack(const PackedCodes& codes);

struct HashModel {
    FeatureModel feature_model;
    std::size_t bits() const { return feature_model.bits(); }
};

// sgn(W^T (x - center)) packed, with sgn(0) = -1.
PackedCodes encode(const HashModel& model, const DenseMatrix& x);

// Elementwise sign with sgn(v) = +1 iff v > 0.
DenseMatrix sign_matrix(const DenseMatrix& m);

void write_codes(const std::filesystem::path& path, const PackedCodes& codes);
PackedCodes read_codes(const std::filesystem::path& path);
void write_model(const std::filesystem::path& path, const HashModel& model);
HashModel read_model(const std::filesystem::path& path);

}  // namespace taghash
