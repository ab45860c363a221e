#pragma once

#include "ddp/config.hpp"
#include "ddp/frame_io.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ddp {

/// Localised region whose areal stretch runs away ahead of the burst.
struct WeakSpot {
    double centerRow = 0.0;
    double centerCol = 0.0;
    double radius = 2.0;         // grid units
    std::size_t onsetFrame = 0;  // stretch starts growing here
    double exponent = 2.0;       // extra stretch ~ (t - onset)^exponent
    double depth = 0.01;         // extra areal stretch reached at the burst frame

    bool contains(std::size_t row, std::size_t col) const;
};

/// Inflating spherical membrane seen by a grid sensor.
///
/// Each grid point is a material point on a sphere around the direction
/// (1,1,1)/sqrt(3), so x, y and z grow with the radius. Grayscale is a
/// textured base value divided by the local areal stretch.
struct BalloonScenario {
    std::string name = "scenario";
    std::size_t width = 10;
    std::size_t height = 10;
    std::size_t frames = 60;
    std::optional<std::size_t> burstFrame;
    double baseRadius = 1.0;
    double growthRate = 0.004;  // fractional radius growth per frame
    double pitch = 0.004;       // angular grid spacing (rad)
    double baseGray = 200.0;
    double texture = 0.3;       // grayscale texture half-amplitude
    std::optional<WeakSpot> weakSpot;
    std::array<double, 4> noise{0.0, 0.0, 0.0, 0.0};  // fraction of each channel's per-frame change
    std::optional<double> noiseReferenceRate;         // growth rate the noise scale refers to
    std::optional<std::size_t> deflateAfter;          // growth reverses after this frame
    std::uint64_t seed = 1;

    void validate() const;
    std::size_t emittedFrames() const { return burstFrame ? *burstFrame : frames; }
    bool bursts() const { return burstFrame.has_value(); }

    static BalloonScenario fromKeyValues(const KeyValues& kv);
    static BalloonScenario read(const std::filesystem::path& path);
    KeyValues toKeyValues() const;
};

/// Noise-free value of every channel at frame t (no clamping of grayscale).
Frame ideal_frame(const BalloonScenario& s, std::size_t t, bool withWeakSpot = true);

/// Per-channel noise half-amplitude in channel units.
std::array<double, 4> noise_amplitudes(const BalloonScenario& s);

/// Frames 0 .. emittedFrames()-1; the sequence ends before the burst frame.
std::vector<Frame> generate(const BalloonScenario& s);

/// Same generator, restricted to scenarios with neither burst nor weak spot.
std::vector<Frame> control_sequence(const BalloonScenario& s);

struct Manifest {
    std::string runId;
    bool failure = false;
    std::optional<std::size_t> burstFrame;
    std::size_t frames = 0;
    std::uint64_t seed = 0;

    KeyValues toKeyValues() const;
    static Manifest fromKeyValues(const KeyValues& kv);
    static Manifest read(const std::filesystem::path& path);
    void write(const std::filesystem::path& path) const;
};

inline constexpr const char* kManifestName = "manifest.txt";

/// Writes frame_<index>.xyzm files plus manifest.txt into outDir.
Manifest write_sequence(const BalloonScenario& s, const std::filesystem::path& outDir);

}  // namespace ddp
