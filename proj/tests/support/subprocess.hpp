#pragma once

#include <array>
#include <cstdio>
#include <string>
#include <vector>

#include <sys/wait.h>

namespace subprocess {

struct CmdResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr interleaved
};

inline std::string shell_quote(const std::string& arg) {
    std::string out = "'";
    for (char c : arg) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out.push_back(c);
        }
    }
    out.push_back('\'');
    return out;
}

inline CmdResult run(const std::vector<std::string>& argv) {
    std::string cmdline;
    for (const auto& arg : argv) {
        if (!cmdline.empty()) cmdline.push_back(' ');
        cmdline += shell_quote(arg);
    }
    cmdline += " 2>&1";

    CmdResult result;
    std::FILE* pipe = ::popen(cmdline.c_str(), "r");
    if (pipe == nullptr) {
        result.output = "popen failed";
        return result;
    }
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) {
        result.output.append(buf.data(), got);
    }
    const int status = ::pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

}  // namespace subprocess
