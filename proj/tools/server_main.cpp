// HTTP server for participants and administrators. Configured through
// FAKEBOOK_* environment variables.
#include "fakebook/platform/http_api.hpp"
#include "fakebook/platform/platform.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <atomic>
#include <condition_variable>
#include <csignal>
#include <cstdlib>
#include <thread>

namespace {

httplib::Server* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

}  // namespace

int main() {
    using namespace fakebook;
    try {
        const auto config = ServerConfig::from_env([](const char* name) { return std::getenv(name); });

        SystemClock system_clock;
        std::unique_ptr<VirtualClock> virtual_clock;
        const Clock* clock = &system_clock;
        if (config.virtual_clock) {
            virtual_clock = std::make_unique<VirtualClock>(config.virtual_start.value_or(system_clock.now()));
            clock = virtual_clock.get();
            spdlog::warn("virtual clock mode: time starts at {}", format_instant(clock->now()));
        }

        PlatformConfig pc;
        pc.admin_login = config.admin_user;
        pc.admin_password = config.admin_password;
        pc.password_iterations = config.password_iterations;
        std::unique_ptr<Store> store;
        if (config.db == ":memory:")
            store = std::make_unique<MemoryStore>();
        else
            store = std::make_unique<SqliteStore>(config.db);
        if (config.admin_password.empty()) {
            spdlog::warn("FAKEBOOK_ADMIN_PASSWORD unset; no admin account is bootstrapped");
            pc.admin_login.clear();
        }
        Platform platform(std::move(pc), *clock, std::move(store));

        httplib::Server server;
        mount_api(server, platform, virtual_clock.get());
        server.set_logger([](const httplib::Request& req, const httplib::Response& res) {
            spdlog::debug("{} {} -> {}", req.method, req.path, res.status);
        });

        std::atomic<bool> running{true};
        std::mutex m;
        std::condition_variable cv;
        std::thread ticker([&] {
            std::unique_lock lock(m);
            while (running) {
                cv.wait_for(lock, std::chrono::seconds{1});
                if (!running) break;
                try {
                    platform.tick_all();
                } catch (const std::exception& e) {
                    spdlog::error("scheduler tick failed: {}", e.what());
                }
            }
        });

        g_server = &server;
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        spdlog::info("listening on {}:{}", config.bind, config.port);
        const bool ok = server.listen(config.bind, config.port);
        {
            std::lock_guard lock(m);
            running = false;
        }
        cv.notify_all();
        ticker.join();
        if (!ok) {
            spdlog::error("could not listen on {}:{}", config.bind, config.port);
            return 1;
        }
        return 0;
    } catch (const std::exception& e) {
        spdlog::critical("{}", e.what());
        return 1;
    }
}
