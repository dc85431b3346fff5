#include "fakebook/core/error.hpp"
#include "fakebook/fixture/fixture.hpp"

#include <fmt/format.h>

namespace fakebook {

std::vector<Advertisement> default_advertisements() {
    return {
        Advertisement{AdId{"ad-perfume"}, "Eau de Matin",
                      "A fresh citrus fragrance for long summer days. Discover the new scent now.",
                      "ads/perfume.jpg"},
        Advertisement{AdId{"ad-travel"}, "Island Escapes",
                      "Seven nights by the sea, flights included. Book early and save 20%.", "ads/travel.jpg"},
    };
}

FixtureBundle default_fixture() {
    auto parsed = parse_fixture(default_fixture_files());
    if (!parsed.ok())
        fail(ErrorCode::internal, fmt::format("bundled fixture is broken: {}", parsed.issues.front().to_string()));
    auto bundle = std::move(parsed.records.front());
    bundle.ads = default_advertisements();
    return bundle;
}

}  // namespace fakebook
