#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ddp {

/// Grid of observation points, each carrying `dims` real channels.
///
/// Channel order for XYZM data is x, y, z, grayscale. Points are stored
/// row-major; point index p = row * width + col. Invalid points keep NaN
/// channel values and are skipped by every pairwise stage.
class Frame {
public:
    Frame() = default;
    Frame(std::size_t width, std::size_t height, std::size_t dims, std::size_t timeIndex = 0);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t dims() const noexcept { return dims_; }
    std::size_t points() const noexcept { return width_ * height_; }
    std::size_t timeIndex() const noexcept { return timeIndex_; }
    void setTimeIndex(std::size_t t) noexcept { timeIndex_ = t; }

    std::size_t index(std::size_t row, std::size_t col) const noexcept { return row * width_ + col; }

    double value(std::size_t point, std::size_t dim) const noexcept { return values_[point * dims_ + dim]; }
    void setValue(std::size_t point, std::size_t dim, double v) noexcept { values_[point * dims_ + dim] = v; }

    std::span<const double> channels(std::size_t point) const noexcept {
        return {values_.data() + point * dims_, dims_};
    }

    bool valid(std::size_t point) const noexcept { return valid_[point] != 0; }
    void setValid(std::size_t point, bool v) noexcept { valid_[point] = v ? 1 : 0; }
    std::size_t validCount() const noexcept;

    /// Extract one channel for every point (NaN where invalid).
    std::vector<double> channel(std::size_t dim) const;

    const std::vector<double>& rawValues() const noexcept { return values_; }

    friend bool operator==(const Frame&, const Frame&) = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::size_t dims_ = 0;
    std::size_t timeIndex_ = 0;
    std::vector<double> values_;
    std::vector<std::uint8_t> valid_;
};

/// Inclusive row/column bounds of an observation window.
struct WindowSpec {
    std::size_t rowStart = 0;
    std::size_t rowEnd = 0;
    std::size_t colStart = 0;
    std::size_t colEnd = 0;

    std::size_t rows() const noexcept { return rowEnd - rowStart + 1; }
    std::size_t cols() const noexcept { return colEnd - colStart + 1; }

    static WindowSpec full(const Frame& f);
    /// Parses `r0:r1,c0:c1`.
    static WindowSpec parse(std::string_view text);
    std::string toString() const;

    friend bool operator==(const WindowSpec&, const WindowSpec&) = default;
};

struct SequenceConfig {
    std::size_t stride = 1;
    std::size_t dims = 4;
    std::optional<WindowSpec> window;  // nullopt = full frame
    std::size_t frameOffset = 0;       // raw frame number of time index 0
};

// ---- XYZM text format ----
//
//   XYZM <width> <height>
//   x y z m        (width*height lines, row-major)
//
// A point written as `nan nan nan -1` is invalid.

Frame parse_xyzm(std::istream& in);
Frame parse_xyzm(std::string_view text);
Frame read_xyzm_file(const std::filesystem::path& path);

void write_xyzm(std::ostream& out, const Frame& f);
std::string to_xyzm(const Frame& f);
void write_xyzm_file(const std::filesystem::path& path, const Frame& f);

Frame extract_window(const Frame& f, const WindowSpec& w);

// ---- sequences ----

/// `frame_000123.xyzm`
std::string frame_file_name(std::size_t index);

/// Sorted list of (index, path) for every `frame_<6 digits>.xyzm` in `dir`.
std::vector<std::pair<std::size_t, std::filesystem::path>> list_frame_files(const std::filesystem::path& dir);

/// Random access to an ordered frame sequence. Implementations may load lazily.
class FrameSource {
public:
    virtual ~FrameSource() = default;
    virtual std::size_t size() const = 0;
    virtual Frame load(std::size_t ordinal) = 0;
};

class DirectoryFrameSource : public FrameSource {
public:
    explicit DirectoryFrameSource(const std::filesystem::path& dir);
    std::size_t size() const override { return files_.size(); }
    Frame load(std::size_t ordinal) override;

private:
    std::vector<std::pair<std::size_t, std::filesystem::path>> files_;
};

class VectorFrameSource : public FrameSource {
public:
    explicit VectorFrameSource(std::span<const Frame> frames) : frames_(frames) {}
    std::size_t size() const override { return frames_.size(); }
    Frame load(std::size_t ordinal) override { return frames_[ordinal]; }

private:
    std::span<const Frame> frames_;
};

/// Ordinals (k*n, (k+1)*n) of every analyzed pair in a sequence of `count` frames.
std::vector<std::pair<std::size_t, std::size_t>> stride_pair_indices(std::size_t count, std::size_t stride);

struct StrideResult {
    std::size_t pairs = 0;
    std::optional<std::string> warning;
};

/// Streams strided pairs through `fn(earlier, later, pairOrdinal)`, holding at
/// most two frames at once; the later frame of one pair is reused as the
/// earlier frame of the next.
StrideResult for_each_stride_pair(FrameSource& source, std::size_t stride,
                                  const std::function<void(const Frame&, const Frame&, std::size_t)>& fn);

}  // namespace ddp
