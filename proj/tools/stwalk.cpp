#include "stwalk_cli.hpp"

int main(int argc, char** argv) {
    return stwalk::cli::run(argc, argv);
}
