#include "taghash/hash_model.hpp"

#include <array>
#include <cmath>
#include <string>

#include "taghash/binary_io.hpp"
#include "taghash/errors.hpp"

namespace taghash {

namespace {
constexpr std::array<char, 6> kCodeMagic = {'H', 'C', 'O', 'D', '1', '\0'};
constexpr std::array<char, 6> kModelMagic = {'H', 'M', 'O', 'D', '1', '\0'};
}  // namespace

DenseMatrix FeatureModel::outputs(const DenseMatrix& x) const {
    if (static_cast<std::size_t>(x.rows()) != dims())
        throw DimensionMismatch("feature model expects " + std::to_string(dims()) +
                                "-dimensional inputs, got " + std::to_string(x.rows()));
    DenseMatrix proj = center ? DenseMatrix(w.transpose() * (x.colwise() - *center))
                              : DenseMatrix(w.transpose() * x);
    if (activation == Activation::tanh) proj = proj.array().tanh().matrix();
    return proj;
}

FeatureModel fit_linear_hash(const DenseMatrix& x, const DenseMatrix& z, double ridge_eps,
                             const FitOptions& opts) {
    if (x.cols() == 0) throw DimensionMismatch("cannot fit a hash function on zero samples");
    if (x.cols() != z.cols()) throw DimensionMismatch("features and codes disagree on n");
    FeatureModel fm;
    fm.activation = opts.activation;
    if (opts.center) {
        DenseVector mean = x.rowwise().mean();
        const DenseMatrix xc = x.colwise() - mean;
        fm.w = solve_ridge(xc * xc.transpose(), xc * z.transpose(), ridge_eps);
        fm.center = std::move(mean);
    } else {
        fm.w = solve_ridge(x * x.transpose(), x * z.transpose(), ridge_eps);
    }
    if (!all_finite(fm.w)) throw NumericalError("linear hash fit produced non-finite weights");
    return fm;
}

FeatureModel fit_feature_model(const DenseMatrix& x, const DenseMatrix& z, double ridge_eps,
                               const FitOptions& opts) {
    return fit_linear_hash(x, z, ridge_eps, opts);
}

DenseMatrix sign_matrix(const DenseMatrix& m) {
    return m.unaryExpr([](double v) { return v > 0.0 ? 1.0 : -1.0; });
}

PackedCodes pack(const DenseMatrix& signs) {
    PackedCodes pc;
    pc.r = static_cast<std::size_t>(signs.rows());
    pc.n = static_cast<std::size_t>(signs.cols());
    const std::size_t wpc = pc.words_per_code();
    pc.words.assign(pc.n * wpc, 0);
    for (std::size_t i = 0; i < pc.n; ++i) {
        for (std::size_t b = 0; b < pc.r; ++b) {
            const double v = signs(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(i));
            if (v == 1.0)
                pc.words[i * wpc + b / 64] |= std::uint64_t{1} << (b % 64);
            else if (v != -1.0)
                throw InvalidSign("code entry (" + std::to_string(b) + ", " + std::to_string(i) +
                                  ") is not +1 or -1");
        }
    }
    return pc;
}

DenseMatrix unpack(const PackedCodes& codes) {
    DenseMatrix out(static_cast<Eigen::Index>(codes.r), static_cast<Eigen::Index>(codes.n));
    const std::size_t wpc = codes.words_per_code();
    for (std::size_t i = 0; i < codes.n; ++i)
        for (std::size_t b = 0; b < codes.r; ++b)
            out(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(i)) =
                (codes.words[i * wpc + b / 64] >> (b % 64)) & 1u ? 1.0 : -1.0;
    return out;
}

PackedCodes encode(const HashModel& model, const DenseMatrix& x) {
    const FeatureModel& fm = model.feature_model;
    if (static_cast<std::size_t>(x.rows()) != fm.dims())
        throw DimensionMismatch("encode: model expects d=" + std::to_string(fm.dims()) +
                                ", features have d=" + std::to_string(x.rows()));
    // sgn(tanh(v)) = sgn(v), so the activation never changes the code.
    DenseMatrix proj = fm.center ? DenseMatrix(fm.w.transpose() * (x.colwise() - *fm.center))
                                 : DenseMatrix(fm.w.transpose() * x);
    return pack(sign_matrix(proj));
}

void write_codes(const std::filesystem::path& path, const PackedCodes& codes) {
    ByteWriter w;
    w.magic(kCodeMagic);
    w.u64(codes.n);
    w.u64(codes.r);
    for (auto word : codes.words) w.u64(word);
    w.save(path);
}

PackedCodes read_codes(const std::filesystem::path& path) {
    const std::string bytes = read_binary_file(path);
    ByteReader rd(bytes, path.string());
    rd.expect_magic(kCodeMagic);
    PackedCodes pc;
    pc.n = rd.u64();
    pc.r = rd.u64();
    if (pc.r == 0 && pc.n != 0) throw MalformedFile(path.string() + ": zero code length");
    const std::size_t wpc = pc.words_per_code();
    if (wpc != 0 && pc.n > rd.remaining() / 8 / wpc)
        throw MalformedFile(path.string() + ": declared size exceeds file size");
    if (rd.remaining() != pc.n * wpc * 8) throw MalformedFile(path.string() + ": payload size mismatch");
    pc.words.resize(pc.n * wpc);
    const std::uint64_t tail_mask = pc.r % 64 == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << (pc.r % 64)) - 1;
    for (std::size_t k = 0; k < pc.words.size(); ++k) {
        pc.words[k] = rd.u64();
        if (k % wpc == wpc - 1 && (pc.words[k] & ~tail_mask) != 0)
            throw MalformedFile(path.string() + ": nonzero padding bits");
    }
    return pc;
}

void write_model(const std::filesystem::path& path, const HashModel& model) {
    const FeatureModel& fm = model.feature_model;
    ByteWriter w;
    w.magic(kModelMagic);
    w.u64(fm.dims());
    w.u64(fm.bits());
    w.u8(static_cast<std::uint8_t>(fm.activation));
    w.u8(fm.center ? 1 : 0);
    if (fm.center)
        for (Eigen::Index i = 0; i < fm.center->size(); ++i) w.f64((*fm.center)(i));
    const double* data = fm.w.data();
    for (Eigen::Index k = 0; k < fm.w.size(); ++k) w.f64(data[k]);
    w.save(path);
}

HashModel read_model(const std::filesystem::path& path) {
    const std::string bytes = read_binary_file(path);
    ByteReader rd(bytes, path.string());
    rd.expect_magic(kModelMagic);
    const std::uint64_t d = rd.u64();
    const std::uint64_t r = rd.u64();
    const std::uint8_t act = rd.u8();
    const std::uint8_t has_center = rd.u8();
    if (act > 1) throw MalformedFile(path.string() + ": unknown activation");
    if (has_center > 1) throw MalformedFile(path.string() + ": bad center flag");
    const std::uint64_t expected = (has_center ? d : 0) + d * r;
    if (d != 0 && r > rd.remaining() / 8 / d) throw MalformedFile(path.string() + ": truncated");
    if (rd.remaining() != expected * 8) throw MalformedFile(path.string() + ": payload size mismatch");

    HashModel model;
    FeatureModel& fm = model.feature_model;
    fm.activation = static_cast<Activation>(act);
    if (has_center) {
        DenseVector c(static_cast<Eigen::Index>(d));
        for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = rd.f64();
        fm.center = std::move(c);
    }
    fm.w.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(r));
    double* data = fm.w.data();
    for (Eigen::Index k = 0; k < fm.w.size(); ++k) data[k] = rd.f64();
    if (!all_finite(fm.w) || (fm.center && !fm.center->allFinite()))
        throw MalformedFile(path.string() + ": non-finite model parameters");
    return model;
}

}  // namespace taghash
