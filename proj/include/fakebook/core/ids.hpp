#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace fakebook {

/// Opaque string identifier, tagged so ids of different entities do not mix.
template <class Tag>
class Id {
public:
    Id() = default;
    explicit Id(std::string value) : value_(std::move(value)) {}

    const std::string& str() const noexcept { return value_; }
    bool empty() const noexcept { return value_.empty(); }

    friend auto operator<=>(const Id&, const Id&) = default;
    friend bool operator==(const Id&, const Id&) = default;

private:
    std::string value_;
};

struct AccountTag;
struct PostTag;
struct ReactionTag;
struct ExperimentTag;
struct SessionTag;
struct AdTag;
struct EventTag;

using AccountId = Id<AccountTag>;
using PostId = Id<PostTag>;
using ReactionId = Id<ReactionTag>;
using ExperimentId = Id<ExperimentTag>;
using SessionId = Id<SessionTag>;
using AdId = Id<AdTag>;
using EventId = Id<EventTag>;

/// Generates ids of the form `<prefix><zero-padded counter>` so that
/// lexicographic order matches creation order.
class IdSequence {
public:
    explicit IdSequence(std::string prefix) : prefix_(std::move(prefix)) {}

    std::string next();

    /// Advances the counter past an id that already exists (used on reload).
    void observe(std::string_view existing);

private:
    std::string prefix_;
    std::uint64_t next_ = 1;
};

}  // namespace fakebook

template <class Tag>
struct std::hash<fakebook::Id<Tag>> {
    std::size_t operator()(const fakebook::Id<Tag>& id) const noexcept {
        return std::hash<std::string>{}(id.str());
    }
};
