#pragma once

// Shared test fixtures: temp directories, file writers, CLI runner.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "adarag/types.hpp"

namespace testutil {

namespace fs = std::filesystem;

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        auto base = fs::temp_directory_path();
        for (int i = 0; i < 10000; ++i) {
            auto candidate = base / ("adarag-" + tag + "-" + std::to_string(i));
            std::error_code ec;
            if (fs::create_directory(candidate, ec)) {
                path_ = candidate;
                return;
            }
        }
        throw std::runtime_error("cannot create temp dir");
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

inline std::string write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline adarag::Document doc(std::string id, std::string title, std::string text) {
    return adarag::Document{std::move(id), std::move(title), std::move(text)};
}

inline adarag::QAExample qa(std::string id, std::string question,
                            std::vector<std::string> answers, std::string dataset = "test") {
    adarag::QAExample ex;
    ex.id = std::move(id);
    ex.question = std::move(question);
    ex.answers = std::move(answers);
    ex.dataset = std::move(dataset);
    return ex;
}

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

inline std::string shell_quote(const std::string& s) {
    std::string quoted = "'";
    for (char c : s) {
        if (c == '\'') {
            quoted += "'\\''";
        } else {
            quoted += c;
        }
    }
    quoted += "'";
    return quoted;
}

/// Runs the adarag binary with the given arguments, capturing stdout,
/// stderr and the exit code.
inline CliResult run_cli(const std::vector<std::string>& args, const TempDir& scratch,
                         const std::string& extra_env = "") {
    const std::string out_path = scratch.file("cli-stdout.txt");
    const std::string err_path = scratch.file("cli-stderr.txt");
    std::string cmd = extra_env.empty() ? "" : extra_env + " ";
    cmd += shell_quote(ADARAG_CLI_PATH);
    for (const auto& a : args) cmd += " " + shell_quote(a);
    cmd += " >" + shell_quote(out_path) + " 2>" + shell_quote(err_path);
    const int status = std::system(cmd.c_str());
    CliResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = read_file(out_path);
    result.err = read_file(err_path);
    return result;
}

}  // namespace testutil
