#include "commands.hpp"

int main(int argc, char** argv) {
    return syrenn::cli::main(argc, argv);
}
