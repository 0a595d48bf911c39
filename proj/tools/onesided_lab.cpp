#include <cstdio>

int main() {
    std::puts("onesided_lab: experiment harness (subcommands pending)");
    return 0;
}
