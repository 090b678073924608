#include <cstdio>
#include <string>
#include <vector>

#include "shearmix/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    const shearmix::ParseOutcome out = shearmix::parse_cli(args);
    if (!out.message.empty()) {
        std::FILE* dst = out.exit_code == shearmix::kExitOk ? stdout : stderr;
        std::fputs(out.message.c_str(), dst);
        std::fputc('\n', dst);
    }
    if (!out.should_run) return out.exit_code;
    return shearmix::run_cli(out.cfg);
}
