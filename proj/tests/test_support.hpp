#pragma once

#include <filesystem>
#include <string>

inline std::filesystem::path data_path(const std::string& rel) {
    return std::filesystem::path(SOCKETBENCH_DATA_DIR) / rel;
}

inline std::filesystem::path catalog_path() { return data_path("paper_catalog.json"); }
inline std::filesystem::path fixture(const std::string& rel) { return data_path("fixtures/" + rel); }
