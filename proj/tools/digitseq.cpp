#include "digitseq/cli.hpp"

int main(int argc, char** argv) {
    return digitseq::cli::run({argv + 1, argv + argc});
}
