#include "fakebook/platform/store.hpp"

#include "fakebook/core/error.hpp"

#include <algorithm>

#include <fmt/format.h>
#include <sqlite3.h>

namespace fakebook {

void MemoryStore::apply(std::span<const Mutation> batch) {
    std::lock_guard lock(mutex_);
    for (const auto& m : batch) {
        auto key = std::make_pair(m.kind, m.id);
        if (m.op == Mutation::Op::erase) {
            records_.erase(key);
            continue;
        }
        auto it = records_.find(key);
        if (it == records_.end())
            records_.emplace(std::move(key), std::make_pair(next_seq_++, m.body));
        else
            it->second.second = m.body;
    }
}

std::vector<StoredRecord> MemoryStore::load_all() const {
    std::lock_guard lock(mutex_);
    std::vector<std::pair<std::uint64_t, StoredRecord>> ordered;
    for (const auto& [key, value] : records_) ordered.push_back({value.first, {key.first, key.second, value.second}});
    std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<StoredRecord> out;
    for (auto& [seq, rec] : ordered) out.push_back(std::move(rec));
    return out;
}

// ---------------------------------------------------------------------------

namespace {

const char* const kMigrations[] = {
    // 1
    "CREATE TABLE records (kind TEXT NOT NULL, id TEXT NOT NULL, body TEXT NOT NULL, PRIMARY KEY (kind, id));",
    // 2
    "CREATE INDEX records_by_kind ON records (kind);",
};

struct Statement {
    sqlite3_stmt* stmt = nullptr;
    Statement(sqlite3* db, const char* sql) {
        if (sqlite3_prepare_v2(db, sql, -1, &stmt, nullptr) != SQLITE_OK)
            fail(ErrorCode::internal, fmt::format("sqlite prepare failed: {}", sqlite3_errmsg(db)));
    }
    ~Statement() { sqlite3_finalize(stmt); }
    Statement(const Statement&) = delete;
    Statement& operator=(const Statement&) = delete;

    void bind(int i, const std::string& text) {
        sqlite3_bind_text(stmt, i, text.data(), static_cast<int>(text.size()), SQLITE_TRANSIENT);
    }
};

}  // namespace

SqliteStore::SqliteStore(const std::filesystem::path& file) {
    if (sqlite3_open(file.string().c_str(), &db_) != SQLITE_OK) {
        std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
        sqlite3_close(db_);
        db_ = nullptr;
        fail(ErrorCode::internal, fmt::format("cannot open database '{}': {}", file.string(), msg));
    }
    sqlite3_busy_timeout(db_, 5000);
    exec("PRAGMA journal_mode=WAL;");
    exec("PRAGMA foreign_keys=ON;");
    migrate();
}

SqliteStore::~SqliteStore() { sqlite3_close(db_); }

void SqliteStore::exec(const char* sql) const {
    char* err = nullptr;
    if (sqlite3_exec(db_, sql, nullptr, nullptr, &err) != SQLITE_OK) {
        std::string msg = err ? err : "unknown error";
        sqlite3_free(err);
        fail(ErrorCode::internal, fmt::format("sqlite: {}", msg));
    }
}

int SqliteStore::latest_schema_version() noexcept { return static_cast<int>(std::size(kMigrations)); }

int SqliteStore::schema_version() const {
    std::lock_guard lock(mutex_);
    Statement st(db_, "SELECT version FROM schema_version;");
    return sqlite3_step(st.stmt) == SQLITE_ROW ? sqlite3_column_int(st.stmt, 0) : 0;
}

void SqliteStore::migrate() {
    exec("CREATE TABLE IF NOT EXISTS schema_version (version INTEGER NOT NULL);");
    int current = 0;
    {
        Statement st(db_, "SELECT version FROM schema_version;");
        if (sqlite3_step(st.stmt) == SQLITE_ROW) current = sqlite3_column_int(st.stmt, 0);
    }
    if (current > latest_schema_version())
        fail(ErrorCode::schema, fmt::format("database schema version {} is newer than this build ({})", current,
                                            latest_schema_version()));
    if (current == latest_schema_version()) return;
    exec("BEGIN IMMEDIATE;");
    try {
        for (int v = current; v < latest_schema_version(); ++v) exec(kMigrations[v]);
        exec("DELETE FROM schema_version;");
        const auto set = fmt::format("INSERT INTO schema_version (version) VALUES ({});", latest_schema_version());
        exec(set.c_str());
        exec("COMMIT;");
    } catch (...) {
        sqlite3_exec(db_, "ROLLBACK;", nullptr, nullptr, nullptr);
        throw;
    }
}

void SqliteStore::apply(std::span<const Mutation> batch) {
    std::lock_guard lock(mutex_);
    exec("BEGIN IMMEDIATE;");
    try {
        Statement put(db_,
                      "INSERT INTO records (kind, id, body) VALUES (?1, ?2, ?3) "
                      "ON CONFLICT (kind, id) DO UPDATE SET body = excluded.body;");
        Statement erase(db_, "DELETE FROM records WHERE kind = ?1 AND id = ?2;");
        for (const auto& m : batch) {
            auto& st = m.op == Mutation::Op::put ? put : erase;
            sqlite3_reset(st.stmt);
            sqlite3_clear_bindings(st.stmt);
            st.bind(1, m.kind);
            st.bind(2, m.id);
            if (m.op == Mutation::Op::put) st.bind(3, m.body.dump());
            if (sqlite3_step(st.stmt) != SQLITE_DONE)
                fail(ErrorCode::internal, fmt::format("sqlite write failed: {}", sqlite3_errmsg(db_)));
        }
        exec("COMMIT;");
    } catch (...) {
        sqlite3_exec(db_, "ROLLBACK;", nullptr, nullptr, nullptr);
        throw;
    }
}

std::vector<StoredRecord> SqliteStore::load_all() const {
    std::lock_guard lock(mutex_);
    Statement st(db_, "SELECT kind, id, body FROM records ORDER BY rowid;");
    std::vector<StoredRecord> out;
    int rc;
    while ((rc = sqlite3_step(st.stmt)) == SQLITE_ROW) {
        auto text = [&](int col) {
            return std::string(reinterpret_cast<const char*>(sqlite3_column_text(st.stmt, col)),
                               static_cast<std::size_t>(sqlite3_column_bytes(st.stmt, col)));
        };
        try {
            out.push_back({text(0), text(1), nlohmann::json::parse(text(2))});
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorCode::schema, fmt::format("corrupt record {}/{}: {}", text(0), text(1), e.what()));
        }
    }
    if (rc != SQLITE_DONE) fail(ErrorCode::internal, fmt::format("sqlite read failed: {}", sqlite3_errmsg(db_)));
    return out;
}

}  // namespace fakebook
