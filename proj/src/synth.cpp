#include "ddp/synth.hpp"

#include "ddp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace ddp {

namespace {

enum class Stream : std::uint32_t { Texture = 1, Noise = 2 };

std::mt19937_64 substream(std::uint64_t seed, Stream tag, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

// [-1, 1) from the top 53 bits; avoids implementation-defined distributions.
double symmetric_unit(std::mt19937_64& rng) {
    return 2.0 * static_cast<double>(rng() >> 11) * 0x1p-53 - 1.0;
}

struct Vec3 {
    double x, y, z;
};

Vec3 normalized(Vec3 v) {
    const double n = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
    return {v.x / n, v.y / n, v.z / n};
}

Vec3 grid_direction(const BalloonScenario& s, std::size_t row, std::size_t col) {
    static const Vec3 axis = normalized({1, 1, 1});
    static const Vec3 e1 = normalized({1, -1, 0});
    static const Vec3 e2 = normalized({1, 1, -2});
    const double a = (static_cast<double>(col) - 0.5 * static_cast<double>(s.width - 1)) * s.pitch;
    const double b = (static_cast<double>(row) - 0.5 * static_cast<double>(s.height - 1)) * s.pitch;
    return normalized({axis.x + a * e1.x + b * e2.x, axis.y + a * e1.y + b * e2.y, axis.z + a * e1.z + b * e2.z});
}

double inflation_time(const BalloonScenario& s, std::size_t t) {
    const double tt = static_cast<double>(t);
    if (!s.deflateAfter || t <= *s.deflateAfter) return tt;
    return std::max(0.0, 2.0 * static_cast<double>(*s.deflateAfter) - tt);
}

double weak_extra(const BalloonScenario& s, std::size_t t) {
    const auto& w = *s.weakSpot;
    if (t <= w.onsetFrame) return 0.0;
    const double horizon = static_cast<double>(s.burstFrame ? *s.burstFrame : s.frames);
    const double span = horizon - static_cast<double>(w.onsetFrame);
    return w.depth * std::pow((static_cast<double>(t) - static_cast<double>(w.onsetFrame)) / span, w.exponent);
}

std::vector<double> texture_field(const BalloonScenario& s) {
    auto rng = substream(s.seed, Stream::Texture, 0);
    std::vector<double> tex(s.width * s.height);
    for (auto& v : tex) v = s.texture * symmetric_unit(rng);
    return tex;
}

std::string fmt_real(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

}  // namespace

bool WeakSpot::contains(std::size_t row, std::size_t col) const {
    const double dr = static_cast<double>(row) - centerRow;
    const double dc = static_cast<double>(col) - centerCol;
    return dr * dr + dc * dc <= radius * radius;
}

void BalloonScenario::validate() const {
    if (width == 0 || height == 0) throw ConfigError("scenario grid must be non-empty");
    if (frames < 2) throw ConfigError("scenario needs at least two frames");
    if (burstFrame && (*burstFrame >= frames || *burstFrame < 2))
        throw ConfigError("burst_frame must lie in [2, frames)");
    if (!(baseRadius > 0.0)) throw ConfigError("base_radius must be positive");
    if (!(growthRate >= 0.0)) throw ConfigError("growth_rate must be non-negative");
    if (!(pitch > 0.0) || pitch * static_cast<double>(std::max(width, height)) > 1.0)
        throw ConfigError("pitch must be positive and keep the patch within a steradian");
    if (!(texture >= 0.0) || baseGray - texture < 0.0 || baseGray + texture > 255.0)
        throw ConfigError("base_gray +/- texture must stay within [0,255]");
    for (double n : noise)
        if (!(n >= 0.0)) throw ConfigError("noise fractions must be non-negative");
    if (noiseReferenceRate && !(*noiseReferenceRate > 0.0)) throw ConfigError("noise_reference_rate must be positive");
    if (weakSpot) {
        const std::size_t horizon = burstFrame ? *burstFrame : frames;
        if (weakSpot->onsetFrame >= horizon) throw ConfigError("weak spot onset must precede the burst");
        if (!(weakSpot->exponent > 0.0) || !(weakSpot->depth >= 0.0) || !(weakSpot->radius >= 0.0))
            throw ConfigError("weak spot exponent/depth/radius out of range");
    }
}

BalloonScenario BalloonScenario::fromKeyValues(const KeyValues& kv) {
    kv.rejectUnknown({"name", "width", "height", "frames", "burst_frame", "base_radius", "growth_rate", "pitch",
                      "base_gray", "texture", "weak_row", "weak_col", "weak_radius", "weak_onset", "weak_exponent",
                      "weak_depth", "noise", "noise_x", "noise_y", "noise_z", "noise_m", "noise_reference_rate",
                      "deflate_after", "seed"});
    BalloonScenario s;
    if (auto v = kv.get("name")) s.name = *v;
    if (auto v = kv.getSize("width")) s.width = *v;
    if (auto v = kv.getSize("height")) s.height = *v;
    if (auto v = kv.getSize("frames")) s.frames = *v;
    if (auto v = kv.getSize("burst_frame")) s.burstFrame = *v;
    if (auto v = kv.getReal("base_radius")) s.baseRadius = *v;
    if (auto v = kv.getReal("growth_rate")) s.growthRate = *v;
    if (auto v = kv.getReal("pitch")) s.pitch = *v;
    if (auto v = kv.getReal("base_gray")) s.baseGray = *v;
    if (auto v = kv.getReal("texture")) s.texture = *v;
    if (kv.has("weak_row") || kv.has("weak_col") || kv.has("weak_onset")) {
        WeakSpot w;
        w.centerRow = kv.getReal("weak_row").value_or(0.5 * static_cast<double>(s.height - 1));
        w.centerCol = kv.getReal("weak_col").value_or(0.5 * static_cast<double>(s.width - 1));
        w.radius = kv.getReal("weak_radius").value_or(w.radius);
        w.onsetFrame = kv.getSize("weak_onset").value_or(0);
        w.exponent = kv.getReal("weak_exponent").value_or(w.exponent);
        w.depth = kv.getReal("weak_depth").value_or(w.depth);
        s.weakSpot = w;
    }
    if (auto v = kv.getReal("noise")) s.noise.fill(*v);
    const char* perChannel[] = {"noise_x", "noise_y", "noise_z", "noise_m"};
    for (std::size_t c = 0; c < 4; ++c)
        if (auto v = kv.getReal(perChannel[c])) s.noise[c] = *v;
    if (auto v = kv.getReal("noise_reference_rate")) s.noiseReferenceRate = *v;
    if (auto v = kv.getSize("deflate_after")) s.deflateAfter = *v;
    if (auto v = kv.getInt("seed")) s.seed = static_cast<std::uint64_t>(*v);
    s.validate();
    return s;
}

BalloonScenario BalloonScenario::read(const std::filesystem::path& path) {
    return fromKeyValues(KeyValues::read(path));
}

KeyValues BalloonScenario::toKeyValues() const {
    KeyValues kv;
    kv.set("name", name);
    kv.set("width", std::to_string(width));
    kv.set("height", std::to_string(height));
    kv.set("frames", std::to_string(frames));
    if (burstFrame) kv.set("burst_frame", std::to_string(*burstFrame));
    kv.set("base_radius", fmt_real(baseRadius));
    kv.set("growth_rate", fmt_real(growthRate));
    kv.set("pitch", fmt_real(pitch));
    kv.set("base_gray", fmt_real(baseGray));
    kv.set("texture", fmt_real(texture));
    if (weakSpot) {
        kv.set("weak_row", fmt_real(weakSpot->centerRow));
        kv.set("weak_col", fmt_real(weakSpot->centerCol));
        kv.set("weak_radius", fmt_real(weakSpot->radius));
        kv.set("weak_onset", std::to_string(weakSpot->onsetFrame));
        kv.set("weak_exponent", fmt_real(weakSpot->exponent));
        kv.set("weak_depth", fmt_real(weakSpot->depth));
    }
    kv.set("noise_x", fmt_real(noise[0]));
    kv.set("noise_y", fmt_real(noise[1]));
    kv.set("noise_z", fmt_real(noise[2]));
    kv.set("noise_m", fmt_real(noise[3]));
    if (noiseReferenceRate) kv.set("noise_reference_rate", fmt_real(*noiseReferenceRate));
    if (deflateAfter) kv.set("deflate_after", std::to_string(*deflateAfter));
    kv.set("seed", std::to_string(seed));
    return kv;
}

Frame ideal_frame(const BalloonScenario& s, std::size_t t, bool withWeakSpot) {
    Frame f(s.width, s.height, 4, t);
    const auto tex = texture_field(s);
    const double scale = 1.0 + s.growthRate * inflation_time(s, t);
    const double radius = s.baseRadius * scale;
    const double extra = (withWeakSpot && s.weakSpot) ? weak_extra(s, t) : 0.0;
    for (std::size_t r = 0; r < s.height; ++r)
        for (std::size_t c = 0; c < s.width; ++c) {
            const std::size_t p = f.index(r, c);
            const double w = (extra > 0.0 && s.weakSpot->contains(r, c)) ? extra : 0.0;
            const double stretch = scale * scale * (1.0 + w);
            const double rho = radius * std::sqrt(1.0 + w);
            const Vec3 dir = grid_direction(s, r, c);
            f.setValue(p, 0, rho * dir.x);
            f.setValue(p, 1, rho * dir.y);
            f.setValue(p, 2, rho * dir.z);
            f.setValue(p, 3, (s.baseGray + tex[p]) / stretch);
        }
    return f;
}

std::array<double, 4> noise_amplitudes(const BalloonScenario& s) {
    BalloonScenario ref = s;
    ref.weakSpot.reset();
    ref.deflateAfter.reset();
    ref.growthRate = s.noiseReferenceRate ? *s.noiseReferenceRate : (s.growthRate > 0.0 ? s.growthRate : 0.004);
    const Frame a = ideal_frame(ref, 0, false);
    const Frame b = ideal_frame(ref, 1, false);
    std::array<double, 4> amp{};
    for (std::size_t c = 0; c < 4; ++c) {
        double sum = 0.0;
        for (std::size_t p = 0; p < a.points(); ++p) sum += std::abs(b.value(p, c) - a.value(p, c));
        amp[c] = s.noise[c] * sum / static_cast<double>(a.points());
    }
    return amp;
}

std::vector<Frame> generate(const BalloonScenario& s) {
    s.validate();
    const auto amp = noise_amplitudes(s);
    std::vector<Frame> out;
    out.reserve(s.emittedFrames());
    for (std::size_t t = 0; t < s.emittedFrames(); ++t) {
        Frame f = ideal_frame(s, t);
        auto rng = substream(s.seed, Stream::Noise, t);
        for (std::size_t p = 0; p < f.points(); ++p)
            for (std::size_t c = 0; c < 4; ++c) {
                const double n = symmetric_unit(rng);
                if (amp[c] > 0.0) f.setValue(p, c, f.value(p, c) + amp[c] * n);
            }
        for (std::size_t p = 0; p < f.points(); ++p) f.setValue(p, 3, std::clamp(f.value(p, 3), 0.0, 255.0));
        out.push_back(std::move(f));
    }
    return out;
}

std::vector<Frame> control_sequence(const BalloonScenario& s) {
    if (s.burstFrame || s.weakSpot) throw ConfigError("control scenarios carry neither a burst nor a weak spot");
    return generate(s);
}

KeyValues Manifest::toKeyValues() const {
    KeyValues kv;
    kv.set("run_id", runId);
    kv.set("label", failure ? "burst" : "no-failure");
    if (burstFrame) kv.set("burst_frame", std::to_string(*burstFrame));
    kv.set("frames", std::to_string(frames));
    kv.set("seed", std::to_string(seed));
    return kv;
}

Manifest Manifest::fromKeyValues(const KeyValues& kv) {
    Manifest m;
    m.runId = kv.require("run_id");
    const std::string label = kv.require("label");
    if (label != "burst" && label != "no-failure") throw ConfigError("manifest label must be burst or no-failure");
    m.failure = label == "burst";
    if (auto v = kv.getSize("burst_frame")) m.burstFrame = *v;
    if (m.failure && !m.burstFrame) throw ConfigError("burst manifest lacks burst_frame");
    m.frames = kv.getSize("frames").value_or(0);
    if (auto v = kv.getInt("seed")) m.seed = static_cast<std::uint64_t>(*v);
    return m;
}

Manifest Manifest::read(const std::filesystem::path& path) { return fromKeyValues(KeyValues::read(path)); }

void Manifest::write(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    // fixed key order keeps reruns byte-identical
    const auto kv = toKeyValues();
    for (const char* key : {"run_id", "label", "burst_frame", "frames", "seed"})
        if (auto v = kv.get(key)) out << key << " = " << *v << '\n';
}

Manifest write_sequence(const BalloonScenario& s, const std::filesystem::path& outDir) {
    std::error_code ec;
    std::filesystem::create_directories(outDir, ec);
    if (ec) throw IoError("cannot create " + outDir.string() + ": " + ec.message());
    const auto frames = generate(s);
    for (const auto& f : frames) write_xyzm_file(outDir / frame_file_name(f.timeIndex()), f);
    Manifest m;
    m.runId = s.name;
    m.failure = s.bursts();
    m.burstFrame = s.burstFrame;
    m.frames = frames.size();
    m.seed = s.seed;
    m.write(outDir / kManifestName);
    return m;
}

}  // namespace ddp
