#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

struct sqlite3;

namespace fakebook {

/// One persisted entity: a JSON document keyed by (kind, id).
struct StoredRecord {
    std::string kind;
    std::string id;
    nlohmann::json body;
};

struct Mutation {
    enum class Op { put, erase };
    Op op = Op::put;
    std::string kind;
    std::string id;
    nlohmann::json body;

    static Mutation put(std::string kind, std::string id, nlohmann::json body) {
        return {Op::put, std::move(kind), std::move(id), std::move(body)};
    }
    static Mutation erase(std::string kind, std::string id) { return {Op::erase, std::move(kind), std::move(id), {}}; }
};

/// Document persistence. A batch applies completely or not at all; records
/// load back in first-insertion order.
class Store {
public:
    virtual ~Store() = default;
    virtual void apply(std::span<const Mutation> batch) = 0;
    virtual std::vector<StoredRecord> load_all() const = 0;

    void put(std::string kind, std::string id, nlohmann::json body) {
        const Mutation m = Mutation::put(std::move(kind), std::move(id), std::move(body));
        apply({&m, 1});
    }
};

/// Keeps records in memory only.
class MemoryStore final : public Store {
public:
    void apply(std::span<const Mutation> batch) override;
    std::vector<StoredRecord> load_all() const override;

private:
    mutable std::mutex mutex_;
    std::uint64_t next_seq_ = 0;
    std::map<std::pair<std::string, std::string>, std::pair<std::uint64_t, nlohmann::json>> records_;
};

/// SQLite file with versioned schema migrations.
class SqliteStore final : public Store {
public:
    /// Opens or creates the database and applies pending migrations.
    explicit SqliteStore(const std::filesystem::path& file);
    ~SqliteStore() override;
    SqliteStore(const SqliteStore&) = delete;
    SqliteStore& operator=(const SqliteStore&) = delete;

    void apply(std::span<const Mutation> batch) override;
    std::vector<StoredRecord> load_all() const override;

    int schema_version() const;
    static int latest_schema_version() noexcept;

private:
    void exec(const char* sql) const;
    void migrate();

    mutable std::mutex mutex_;
    sqlite3* db_ = nullptr;
};

}  // namespace fakebook
