#include "ddp/frame_io.hpp"

#include "ddp/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <regex>
#include <sstream>

namespace ddp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        const std::size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

bool parse_real(std::string_view tok, double& out) {
    // from_chars does not accept a leading '+'.
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    const auto* end = tok.data() + tok.size();
    const auto res = std::from_chars(tok.data(), end, out);
    return res.ec == std::errc{} && res.ptr == end;
}

bool parse_size(std::string_view tok, std::size_t& out) {
    const auto* end = tok.data() + tok.size();
    const auto res = std::from_chars(tok.data(), end, out);
    return res.ec == std::errc{} && res.ptr == end;
}

void write_real(std::ostream& out, double v) {
    if (std::isnan(v)) {
        out << "nan";
        return;
    }
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, res.ptr - buf);
}

}  // namespace

Frame::Frame(std::size_t width, std::size_t height, std::size_t dims, std::size_t timeIndex)
    : width_(width),
      height_(height),
      dims_(dims),
      timeIndex_(timeIndex),
      values_(width * height * dims, 0.0),
      valid_(width * height, 1) {
    if (width == 0 || height == 0) throw RangeError("frame grid must be non-empty");
    if (dims < 2) throw RangeError("frame needs at least two channels");
}

std::size_t Frame::validCount() const noexcept {
    return static_cast<std::size_t>(std::count(valid_.begin(), valid_.end(), std::uint8_t{1}));
}

std::vector<double> Frame::channel(std::size_t dim) const {
    std::vector<double> out(points());
    for (std::size_t p = 0; p < points(); ++p) out[p] = valid(p) ? value(p, dim) : kNaN;
    return out;
}

WindowSpec WindowSpec::full(const Frame& f) {
    return {0, f.height() - 1, 0, f.width() - 1};
}

WindowSpec WindowSpec::parse(std::string_view text) {
    static const std::regex re(R"(^\s*(\d+):(\d+),(\d+):(\d+)\s*$)");
    std::cmatch m;
    if (!std::regex_match(text.data(), text.data() + text.size(), m, re))
        throw ConfigError("window must look like r0:r1,c0:c1, got '" + std::string(text) + "'");
    WindowSpec w{std::stoul(m[1]), std::stoul(m[2]), std::stoul(m[3]), std::stoul(m[4])};
    if (w.rowEnd < w.rowStart || w.colEnd < w.colStart) throw ConfigError("window bounds are reversed");
    return w;
}

std::string WindowSpec::toString() const {
    return std::to_string(rowStart) + ":" + std::to_string(rowEnd) + "," + std::to_string(colStart) + ":" +
           std::to_string(colEnd);
}

Frame parse_xyzm(std::istream& in) {
    std::string line;
    std::size_t lineNo = 0;
    // header
    while (std::getline(in, line)) {
        ++lineNo;
        if (!trim(line).empty()) break;
    }
    const auto header = split_ws(trim(line));
    std::size_t width = 0, height = 0;
    if (header.size() != 3 || header[0] != "XYZM" || !parse_size(header[1], width) ||
        !parse_size(header[2], height) || width == 0 || height == 0)
        throw FormatError("malformed XYZM header: '" + line + "'");

    Frame f(width, height, 4);
    const std::size_t expected = width * height;
    std::size_t p = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        const auto body = trim(line);
        if (body.empty()) continue;
        if (p >= expected)
            throw TruncationError("more data lines than the " + std::to_string(expected) + " declared by the header");
        const auto toks = split_ws(body);
        if (toks.size() != 4) throw ParseError(lineNo, "expected 4 values, got " + std::to_string(toks.size()));
        double v[4];
        for (int k = 0; k < 4; ++k)
            if (!parse_real(toks[k], v[k])) throw ParseError(lineNo, "non-numeric token '" + std::string(toks[k]) + "'");

        const bool marker = std::isnan(v[0]) && std::isnan(v[1]) && std::isnan(v[2]) && v[3] == -1.0;
        if (marker) {
            for (int k = 0; k < 4; ++k) f.setValue(p, k, kNaN);
            f.setValid(p, false);
        } else {
            for (int k = 0; k < 4; ++k)
                if (!std::isfinite(v[k])) throw ParseError(lineNo, "non-finite value on a valid point");
            if (v[3] < 0.0 || v[3] > 255.0) throw ParseError(lineNo, "grayscale outside [0,255]");
            for (int k = 0; k < 4; ++k) f.setValue(p, k, v[k]);
        }
        ++p;
    }
    if (p != expected)
        throw TruncationError("expected " + std::to_string(expected) + " data lines, found " + std::to_string(p));
    return f;
}

Frame parse_xyzm(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_xyzm(in);
}

Frame read_xyzm_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return parse_xyzm(in);
}

void write_xyzm(std::ostream& out, const Frame& f) {
    if (f.dims() != 4) throw FormatError("XYZM frames carry exactly 4 channels");
    out << "XYZM " << f.width() << ' ' << f.height() << '\n';
    for (std::size_t p = 0; p < f.points(); ++p) {
        if (!f.valid(p)) {
            out << "nan nan nan -1\n";
            continue;
        }
        for (std::size_t k = 0; k < 4; ++k) {
            if (k) out << ' ';
            write_real(out, f.value(p, k));
        }
        out << '\n';
    }
}

std::string to_xyzm(const Frame& f) {
    std::ostringstream out;
    write_xyzm(out, f);
    return out.str();
}

void write_xyzm_file(const std::filesystem::path& path, const Frame& f) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    write_xyzm(out, f);
    if (!out) throw IoError("write failed for " + path.string());
}

Frame extract_window(const Frame& f, const WindowSpec& w) {
    if (w.rowEnd < w.rowStart || w.colEnd < w.colStart || w.rowEnd >= f.height() || w.colEnd >= f.width())
        throw RangeError("window " + w.toString() + " outside " + std::to_string(f.height()) + "x" +
                         std::to_string(f.width()) + " frame");
    Frame out(w.cols(), w.rows(), f.dims(), f.timeIndex());
    for (std::size_t r = 0; r < w.rows(); ++r)
        for (std::size_t c = 0; c < w.cols(); ++c) {
            const std::size_t src = f.index(w.rowStart + r, w.colStart + c);
            const std::size_t dst = out.index(r, c);
            out.setValid(dst, f.valid(src));
            for (std::size_t d = 0; d < f.dims(); ++d) out.setValue(dst, d, f.value(src, d));
        }
    return out;
}

std::string frame_file_name(std::size_t index) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "frame_%06zu.xyzm", index);
    return buf;
}

std::vector<std::pair<std::size_t, std::filesystem::path>> list_frame_files(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) throw IoError("not a readable directory: " + dir.string());
    static const std::regex re(R"(^frame_(\d{6})\.xyzm$)");
    std::vector<std::pair<std::size_t, std::filesystem::path>> out;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        std::smatch m;
        if (entry.is_regular_file() && std::regex_match(name, m, re)) out.emplace_back(std::stoul(m[1]), entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

DirectoryFrameSource::DirectoryFrameSource(const std::filesystem::path& dir) : files_(list_frame_files(dir)) {}

Frame DirectoryFrameSource::load(std::size_t ordinal) {
    Frame f = read_xyzm_file(files_.at(ordinal).second);
    f.setTimeIndex(files_[ordinal].first);
    return f;
}

std::vector<std::pair<std::size_t, std::size_t>> stride_pair_indices(std::size_t count, std::size_t stride) {
    if (stride == 0) throw ConfigError("stride must be >= 1");
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t k = 0; (k + 1) * stride < count; ++k) out.emplace_back(k * stride, (k + 1) * stride);
    return out;
}

StrideResult for_each_stride_pair(FrameSource& source, std::size_t stride,
                                  const std::function<void(const Frame&, const Frame&, std::size_t)>& fn) {
    const auto plan = stride_pair_indices(source.size(), stride);
    StrideResult result;
    if (plan.empty()) {
        result.warning = "sequence of " + std::to_string(source.size()) + " frames is shorter than stride+1 = " +
                         std::to_string(stride + 1);
        return result;
    }
    std::optional<Frame> earlier = source.load(plan.front().first);
    for (std::size_t k = 0; k < plan.size(); ++k) {
        std::optional<Frame> later = source.load(plan[k].second);
        fn(*earlier, *later, k);
        earlier = std::move(later);
        ++result.pairs;
    }
    return result;
}

}  // namespace ddp
