#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "avtext/corpus.hpp"
#include "avtext/prompt.hpp"

// Shared helpers for the test suites. Repo-relative paths come in through
// compile definitions so the binaries run from any working directory.

#ifndef AVTEXT_REPO_ROOT
#error "AVTEXT_REPO_ROOT must be defined by the build"
#endif

namespace testsup {

inline std::filesystem::path repo_root() { return AVTEXT_REPO_ROOT; }
inline std::filesystem::path fixtures_dir() { return repo_root() / "tests" / "fixtures"; }
inline std::filesystem::path golden_dir() { return repo_root() / "tests" / "golden"; }
inline std::filesystem::path data_dir() { return repo_root() / "data"; }
inline std::filesystem::path templates_dir() { return data_dir() / "templates"; }

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

// Trailing-newline-trimmed fixture text (the .txt files end with one).
inline std::string read_fixture_text(const std::string& name) {
    std::string s = read_file(fixtures_dir() / name);
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
}

inline const avtext::TemplateRegistry& builtin_registry() {
    static avtext::TemplateRegistry reg = avtext::TemplateRegistry::load_dir(templates_dir());
    return reg;
}

// The fixed per-template inputs the golden prompt files were rendered
// with. Shared by the unit suite and the acceptance suite.
inline std::string golden_fixture_input(const std::string& template_id) {
    static const std::vector<avtext::RawMessage> samples =
        avtext::load_corpus(fixtures_dir() / "datis_samples.jsonl");
    if (template_id == "datis_arr_dep_runways") return samples[2].text;
    if (template_id == "datis_surface_conditions") return samples[0].text;
    if (template_id == "datis_closed_runways")
        return "RWY 4L/22R CLOSED. \nILS RWY 4R APCH IN USE. \nDEPG RWY 4R.";
    if (template_id == "datis_closed_taxiways")
        return "TWY A CLOSED. \nTWY E3 CLOSED. \nVISUAL APCH 27 IN USE.";
    if (template_id == "datis_cautioned_objects")
        return "VISUAL APCH 27 IN USE. \nCAUTION BIRDS VICINITY ARPT. \nLASER ACTY RPTD "
               "2 NM WEST.";
    if (template_id == "ntml_timeline") return read_fixture_text("pbi_input.txt");
    if (template_id == "ntml_staffing_tmi") return read_fixture_text("sct_input.txt");
    if (template_id == "transcript_clean")
        return "delta twenty five oh one ground roger make that left turn on foxtrot hold "
               "short of ramp three make the right";
    if (template_id == "metar_decode") return "SH";
    throw std::runtime_error("no golden fixture input for " + template_id);
}

// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::mt19937_64 rng{std::random_device{}()};
        path_ = std::filesystem::temp_directory_path() /
                ("avtext-" + tag + "-" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace testsup
