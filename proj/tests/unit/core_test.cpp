#include "fakebook/core/csv.hpp"
#include "fakebook/core/error.hpp"
#include "fakebook/core/ids.hpp"
#include "fakebook/core/text.hpp"
#include "fakebook/core/time.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace fakebook;

TEST(Csv, ReadsQuotedFieldsAndEscapes) {
    const auto records = csv::read("a,b,c\n1,\"x, y\",\"say \"\"hi\"\"\"\n");
    ASSERT_EQ(records.size(), 2u);
    EXPECT_EQ(records[1].row, 2u);
    EXPECT_EQ(records[1].fields, (std::vector<std::string>{"1", "x, y", "say \"hi\""}));
}

TEST(Csv, CrlfBomAndBlankLines) {
    const auto records = csv::read("\xEF\xBB\xBFh1,h2\r\n\r\nv1,v2\r\n");
    ASSERT_EQ(records.size(), 2u);
    EXPECT_EQ(records[0].fields[0], "h1");
    EXPECT_EQ(records[1].row, 3u);  // blank line still counted
}

TEST(Csv, EmbeddedNewlineStaysInOneRecord) {
    const auto records = csv::read("h\n\"two\nlines\"\nnext\n");
    ASSERT_EQ(records.size(), 3u);
    EXPECT_EQ(records[1].fields[0], "two\nlines");
    EXPECT_EQ(records[2].row, 3u);
}

TEST(Csv, SyntaxErrorsCarryRow) {
    try {
        csv::read("h\nok\n\"open\n");
        FAIL();
    } catch (const csv::SyntaxError& e) {
        EXPECT_EQ(e.row(), 3u);
    }
    EXPECT_THROW(csv::read("a\"b\n"), csv::SyntaxError);
    EXPECT_THROW(csv::read("\"a\"b\n"), csv::SyntaxError);
    EXPECT_THROW(csv::read("a\rb\n"), csv::SyntaxError);
}

TEST(Csv, EscapeOnlyWhenNeeded) {
    EXPECT_EQ(csv::escape("plain"), "plain");
    EXPECT_EQ(csv::escape("a,b"), "\"a,b\"");
    EXPECT_EQ(csv::escape("q\""), "\"q\"\"\"");
    EXPECT_EQ(csv::write({"h"}, {{"1"}, {"2"}}), "h\n1\n2\n");
}

TEST(Csv, RandomRoundTrip) {
    std::mt19937 rng(7);
    const std::string alphabet = "ab ,\"\n\r\xC3\xA9x";
    for (int iter = 0; iter < 2000; ++iter) {
        std::vector<std::vector<std::string>> rows;
        const int cols = 1 + static_cast<int>(rng() % 4);
        const int nrows = 1 + static_cast<int>(rng() % 5);
        for (int r = 0; r < nrows; ++r) {
            std::vector<std::string> row;
            for (int c = 0; c < cols; ++c) {
                std::string f;
                const auto len = rng() % 6;
                for (std::size_t k = 0; k < len; ++k) f += alphabet[rng() % alphabet.size()];
                row.push_back(f);
            }
            // A lone empty field is indistinguishable from a blank line.
            if (cols == 1 && row[0].empty()) row[0] = "e";
            rows.push_back(row);
        }
        std::string bytes;
        for (const auto& row : rows) bytes += csv::write_row(row) + "\n";
        const auto back = csv::read(bytes);
        ASSERT_EQ(back.size(), rows.size()) << bytes;
        for (std::size_t r = 0; r < rows.size(); ++r) EXPECT_EQ(back[r].fields, rows[r]);
    }
}

TEST(Text, Utf8) {
    EXPECT_TRUE(is_valid_utf8("h\xC3\xA9llo \xF0\x9F\x98\x80"));
    EXPECT_FALSE(is_valid_utf8("\xC3"));
    EXPECT_FALSE(is_valid_utf8("\xC0\xAF"));  // overlong
    EXPECT_FALSE(is_valid_utf8("\xED\xA0\x80"));  // surrogate
    EXPECT_EQ(utf8_length("h\xC3\xA9llo \xF0\x9F\x98\x80"), 7u);
}

TEST(Text, ParseIntIsStrict) {
    EXPECT_EQ(parse_int("42"), 42);
    EXPECT_EQ(parse_int("-7"), -7);
    EXPECT_FALSE(parse_int(""));
    EXPECT_FALSE(parse_int(" 1"));
    EXPECT_FALSE(parse_int("1.0"));
    EXPECT_FALSE(parse_int("99999999999999999999"));
}

TEST(Text, SplitJoinTrim) {
    EXPECT_EQ(split("a;b;;c", ';'), (std::vector<std::string>{"a", "b", "", "c"}));
    EXPECT_EQ(join({"a", "b"}, ", "), "a, b");
    EXPECT_EQ(trim("  x \t"), "x");
}

TEST(Time, FormatParseRoundTrip) {
    const auto t = parse_instant("2026-03-02T09:00:00.250Z");
    ASSERT_TRUE(t);
    EXPECT_EQ(format_instant(*t), "2026-03-02T09:00:00.250Z");
    EXPECT_EQ(parse_instant("2026-03-02T09:00:00Z"), *t - Duration{250});
    EXPECT_FALSE(parse_instant("2026-03-02 09:00:00Z"));
    EXPECT_FALSE(parse_instant("2026-02-30T09:00:00Z"));
    EXPECT_FALSE(parse_instant("2026-03-02T25:00:00Z"));
}

TEST(Time, VirtualClockNeverGoesBack) {
    VirtualClock clock(from_millis(1000));
    clock.advance(Duration{500});
    EXPECT_EQ(to_millis(clock.now()), 1500);
    clock.set(from_millis(10));
    EXPECT_EQ(to_millis(clock.now()), 1500);
    EXPECT_THROW(clock.advance(Duration{-1}), Error);
}

TEST(Ids, SequenceIsOrderedAndObservesReloads) {
    IdSequence seq("post-");
    EXPECT_EQ(seq.next(), "post-000001");
    seq.observe("post-000041");
    seq.observe("acc-000099");
    seq.observe("post-abc");
    EXPECT_EQ(seq.next(), "post-000042");
}
