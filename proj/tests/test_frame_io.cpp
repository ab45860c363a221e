#include "ddp/errors.hpp"
#include "ddp/frame_io.hpp"
#include "ddp/rank.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

using namespace ddp;

TEST_CASE("parse a 2x1 frame") {
    const auto f = parse_xyzm("XYZM 2 1\n1 2 3 100\n4 5 6 200\n");
    CHECK(f.width() == 2);
    CHECK(f.height() == 1);
    CHECK(f.points() == 2);
    CHECK(f.validCount() == 2);
    CHECK(f.value(1, 3) == 200.0);
    CHECK(f.value(0, 2) == 3.0);
}

TEST_CASE("invalid marker excludes a point") {
    const auto f = parse_xyzm("XYZM 2 1\n1 2 3 100\nnan nan nan -1\n");
    CHECK(f.validCount() == 1);
    CHECK_FALSE(f.valid(1));
    CHECK(std::isnan(f.channel(0)[1]));
}

TEST_CASE("truncated body") {
    CHECK_THROWS_AS(parse_xyzm("XYZM 2 2\n1 2 3 4\n1 2 3 4\n1 2 3 4\n"), TruncationError);
    CHECK_THROWS_AS(parse_xyzm("XYZM 1 1\n1 2 3 4\n1 2 3 4\n"), TruncationError);
}

TEST_CASE("malformed input") {
    CHECK_THROWS_AS(parse_xyzm("XYZ 1 1\n1 2 3 4\n"), FormatError);
    CHECK_THROWS_AS(parse_xyzm("XYZM 0 1\n"), FormatError);
    CHECK_THROWS_AS(parse_xyzm(""), FormatError);
    try {
        parse_xyzm("XYZM 1 2\n1 2 3 4\n1 2 x 4\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(parse_xyzm("XYZM 1 1\n1 2 3\n"), ParseError);
    CHECK_THROWS_AS(parse_xyzm("XYZM 1 1\n1 2 3 256\n"), ParseError);
    CHECK_THROWS_AS(parse_xyzm("XYZM 1 1\n1 2 3 -0.5\n"), ParseError);
    CHECK_THROWS_AS(parse_xyzm("XYZM 1 1\nnan 2 3 4\n"), ParseError);
}

TEST_CASE("round trip preserves every bit") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> coord(-1e3, 1e3), gray(0.0, 255.0);
    for (int trial = 0; trial < 20; ++trial) {
        Frame f(5, 4, 4);
        for (std::size_t p = 0; p < f.points(); ++p) {
            for (std::size_t d = 0; d < 3; ++d) f.setValue(p, d, coord(rng));
            f.setValue(p, 3, gray(rng));
        }
        f.setValid(3, false);
        for (std::size_t d = 0; d < 4; ++d) f.setValue(3, d, std::nan(""));
        const auto text = to_xyzm(f);
        const auto g = parse_xyzm(text);
        REQUIRE(g.validCount() == f.validCount());
        for (std::size_t p = 0; p < f.points(); ++p) {
            if (!f.valid(p)) continue;
            for (std::size_t d = 0; d < 4; ++d) CHECK(g.value(p, d) == f.value(p, d));
        }
        CHECK(to_xyzm(g) == text);
    }
}

TEST_CASE("window extraction") {
    SUBCASE("10x10 window of a 532x500 frame") {
        Frame big(500, 532, 4);
        for (std::size_t p = 0; p < big.points(); ++p) big.setValue(p, 0, static_cast<double>(p));
        const auto w = WindowSpec::parse("353:362,343:352");
        const auto f = extract_window(big, w);
        CHECK(f.width() == 10);
        CHECK(f.height() == 10);
        CHECK(f.points() == 100);
        CHECK(f.value(0, 0) == static_cast<double>(big.index(353, 343)));
        CHECK(f.value(99, 0) == static_cast<double>(big.index(362, 352)));
    }
    SUBCASE("full window is the identity") {
        const auto f = testing::ramp_frame(4, 3);
        CHECK(extract_window(f, WindowSpec::full(f)) == f);
    }
    SUBCASE("1x1 window then a degenerate pairwise stage") {
        const auto f = testing::ramp_frame(4, 3);
        const auto one = extract_window(f, WindowSpec::parse("1:1,2:2"));
        CHECK(one.points() == 1);
        CHECK_THROWS_AS(borda_count(one, 0), DegenerateInputError);
    }
    SUBCASE("out of bounds") {
        const auto f = testing::ramp_frame(4, 3);
        CHECK_THROWS_AS(extract_window(f, WindowSpec::parse("0:3,0:1")), RangeError);
        CHECK_THROWS_AS(WindowSpec::parse("3:1,0:1"), ConfigError);
        CHECK_THROWS_AS(WindowSpec::parse("a:b"), ConfigError);
    }
}

TEST_CASE("window then analyse equals analyse of the window") {
    // Borda and datum only see points inside the frame they are given, so
    // windowing before or after parsing must agree.
    Frame f(6, 6, 4);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 0.2);
    for (std::size_t p = 0; p < f.points(); ++p)
        for (std::size_t d = 0; d < 4; ++d) f.setValue(p, d, u(rng));
    const WindowSpec w{1, 4, 2, 5};
    const auto viaText = extract_window(parse_xyzm(to_xyzm(f)), w);
    const auto direct = extract_window(f, w);
    CHECK(viaText == direct);
    for (std::size_t d = 0; d < 4; ++d) CHECK(borda_count(viaText, d) == borda_count(direct, d));
}

TEST_CASE("stride pairs") {
    using P = std::vector<std::pair<std::size_t, std::size_t>>;
    CHECK(stride_pair_indices(5, 1) == P{{0, 1}, {1, 2}, {2, 3}, {3, 4}});
    CHECK(stride_pair_indices(5, 2) == P{{0, 2}, {2, 4}});
    const auto big = stride_pair_indices(2383, 100);
    // enumerate directly: k*100 and (k+1)*100 must both be < 2383
    std::size_t count = 0;
    for (std::size_t k = 0;; ++k) {
        if ((k + 1) * 100 >= 2383) break;
        ++count;
    }
    CHECK(big.size() == count);
    CHECK(big.size() == 23);
    CHECK(big.back().second == 2300);
    CHECK(stride_pair_indices(1, 1).empty());
    CHECK_THROWS_AS(stride_pair_indices(5, 0), ConfigError);
}

namespace {

// Counts live frames handed out by the source.
class CountingSource : public FrameSource {
public:
    explicit CountingSource(std::size_t n) : n_(n) {}
    std::size_t size() const override { return n_; }
    Frame load(std::size_t ordinal) override {
        ++loads;
        Frame f = testing::ramp_frame(3, 3);
        f.setTimeIndex(ordinal);
        return f;
    }
    std::size_t loads = 0;

private:
    std::size_t n_;
};

}  // namespace

TEST_CASE("stride streaming loads each frame once and keeps two alive") {
    CountingSource src(11);
    std::vector<std::pair<std::size_t, std::size_t>> seen;
    bool bounded = true;
    const auto res = for_each_stride_pair(src, 2, [&](const Frame& a, const Frame& b, std::size_t k) {
        // pair k has loaded exactly its two frames beyond the k already released
        bounded = bounded && src.loads == k + 2;
        seen.emplace_back(a.timeIndex(), b.timeIndex());
    });
    CHECK(res.pairs == 5);
    CHECK_FALSE(res.warning);
    CHECK(seen.front() == std::pair<std::size_t, std::size_t>{0, 2});
    CHECK(seen.back() == std::pair<std::size_t, std::size_t>{8, 10});
    CHECK(src.loads == 6);
    CHECK(bounded);
}

TEST_CASE("short sequence yields a warning and no pairs") {
    CountingSource src(2);
    const auto res = for_each_stride_pair(src, 3, [](const Frame&, const Frame&, std::size_t) { FAIL("no pair"); });
    CHECK(res.pairs == 0);
    CHECK(res.warning);
}

TEST_CASE("directory listing orders by index") {
    const auto dir = testing::scratch_dir("frame_io_dir");
    const auto f = testing::ramp_frame(2, 2);
    for (std::size_t i : {10u, 2u, 7u}) write_xyzm_file(dir / frame_file_name(i), f);
    std::ofstream(dir / "notes.txt") << "ignored\n";
    const auto files = list_frame_files(dir);
    REQUIRE(files.size() == 3);
    CHECK(files[0].first == 2);
    CHECK(files[2].first == 10);
    CHECK(files[1].second.filename() == "frame_000007.xyzm");
    DirectoryFrameSource src(dir);
    CHECK(src.load(2).timeIndex() == 10);
    CHECK_THROWS_AS(list_frame_files(dir / "missing"), IoError);
    CHECK_THROWS_AS(read_xyzm_file(dir / "missing.xyzm"), IoError);
}
