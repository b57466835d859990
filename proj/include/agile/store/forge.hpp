#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "agile/store/types.hpp"

namespace agile::store {

// Client for a GitHub-style REST forge. Fetches commits (with per-commit
// diff stats), issues and PR review/issue comments, and writes them as
// archive files (commits.ndjson, issues.ndjson, pr_comments.ndjson) into
// out_dir. Developers and sprint windows are not forge concepts; they are
// supplied separately before load_archive.
struct ForgeOptions {
    std::string base_url = "https://api.github.com";
    std::string repo;   // "owner/name"
    std::string token;  // usually from FORGE_TOKEN; empty = anonymous
    std::optional<UtcSeconds> since;
    int page_size = 100;
    int max_rate_limit_waits = 4;
    int max_wait_seconds = 60;
    // Injectable so tests never sleep for real.
    std::function<void(int seconds)> sleeper;
};

void fetch_forge(const ForgeOptions& options, const std::filesystem::path& out_dir);

}  // namespace agile::store
