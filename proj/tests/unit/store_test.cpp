#include "fakebook/core/error.hpp"
#include "fakebook/platform/credentials.hpp"
#include "fakebook/platform/store.hpp"

#include <fmt/format.h>
#include <gtest/gtest.h>
#include <sqlite3.h>

#include <filesystem>
#include <memory>

#include <unistd.h>

using namespace fakebook;

namespace {

std::filesystem::path temp_db(const std::string& name) {
    const auto p = std::filesystem::temp_directory_path() / fmt::format("fakebook-{}-{}.db", name, ::getpid());
    for (auto suffix : {"", "-wal", "-shm"}) std::filesystem::remove(p.string() + suffix);
    return p;
}

void raw_exec(const std::filesystem::path& db, const char* sql) {
    sqlite3* h = nullptr;
    ASSERT_EQ(sqlite3_open(db.c_str(), &h), SQLITE_OK);
    ASSERT_EQ(sqlite3_exec(h, sql, nullptr, nullptr, nullptr), SQLITE_OK) << sqlite3_errmsg(h);
    sqlite3_close(h);
}

void exercise(Store& store) {
    std::vector<Mutation> batch{Mutation::put("post", "p2", {{"n", 2}}), Mutation::put("post", "p1", {{"n", 1}}),
                                Mutation::put("account", "a1", {{"x", true}})};
    store.apply(batch);
    store.put("post", "p2", {{"n", 20}});
    const std::vector<Mutation> erase{Mutation::erase("account", "a1"), Mutation::erase("account", "missing")};
    store.apply(erase);
    const auto records = store.load_all();
    ASSERT_EQ(records.size(), 2u);
    EXPECT_EQ(records[0].id, "p2");  // first-insertion order survives updates
    EXPECT_EQ(records[0].body["n"], 20);
    EXPECT_EQ(records[1].id, "p1");
}

}  // namespace

TEST(MemoryStore, PutUpdateErase) {
    MemoryStore store;
    exercise(store);
}

TEST(SqliteStore, PutUpdateEraseAndReload) {
    const auto path = temp_db("basic");
    {
        SqliteStore store(path);
        EXPECT_EQ(store.schema_version(), SqliteStore::latest_schema_version());
        exercise(store);
    }
    SqliteStore reopened(path);
    const auto records = reopened.load_all();
    ASSERT_EQ(records.size(), 2u);
    EXPECT_EQ(records[0].body["n"], 20);
}

TEST(SqliteStore, FailedBatchLeavesNothing) {
    const auto path = temp_db("atomic");
    SqliteStore store(path);
    store.put("post", "keep", {{"n", 1}});
    // Invalid UTF-8 cannot be serialised, so the second mutation throws.
    const std::vector<Mutation> batch{Mutation::put("post", "new", {{"n", 2}}),
                                      Mutation::put("post", "bad", {{"s", std::string("\xFF")}})};
    EXPECT_ANY_THROW(store.apply(batch));
    const auto records = store.load_all();
    ASSERT_EQ(records.size(), 1u);
    EXPECT_EQ(records[0].id, "keep");
}

TEST(SqliteStore, MigratesOlderSchema) {
    const auto path = temp_db("v1");
    raw_exec(path,
             "CREATE TABLE schema_version (version INTEGER NOT NULL);"
             "INSERT INTO schema_version VALUES (1);"
             "CREATE TABLE records (kind TEXT NOT NULL, id TEXT NOT NULL, body TEXT NOT NULL, PRIMARY KEY (kind, id));"
             "INSERT INTO records VALUES ('post', 'old', '{\"n\":1}');");
    SqliteStore store(path);
    EXPECT_EQ(store.schema_version(), 2);
    ASSERT_EQ(store.load_all().size(), 1u);
    EXPECT_EQ(store.load_all()[0].body["n"], 1);
}

TEST(SqliteStore, RefusesNewerSchema) {
    const auto path = temp_db("future");
    raw_exec(path, "CREATE TABLE schema_version (version INTEGER NOT NULL); INSERT INTO schema_version VALUES (99);");
    try {
        SqliteStore store(path);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::schema);
    }
}

TEST(Credentials, HashAndVerify) {
    const auto hash = credentials::hash_password("correct horse", 1000);
    EXPECT_TRUE(hash.starts_with("pbkdf2-sha256$1000$"));
    EXPECT_TRUE(credentials::verify_password("correct horse", hash));
    EXPECT_FALSE(credentials::verify_password("correct horse!", hash));
    EXPECT_NE(credentials::hash_password("correct horse", 1000), hash);  // salted
    EXPECT_FALSE(credentials::verify_password("x", ""));
    EXPECT_FALSE(credentials::verify_password("x", "pbkdf2-sha256$abc$00$00"));
    EXPECT_FALSE(credentials::verify_password("x", "md5$1$00$00"));
}

TEST(Credentials, Tokens) {
    const auto a = credentials::random_token();
    EXPECT_EQ(a.size(), 64u);
    EXPECT_NE(a, credentials::random_token());
    EXPECT_EQ(credentials::token_digest("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
